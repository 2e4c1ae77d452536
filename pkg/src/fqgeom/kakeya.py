"""Kakeya sets in AG(3,q): construction, verification, the integer
multiplicity lower bound, and the fractional-multiplicity pipeline run as
an end-to-end computation at fixed q.

The fractional parameter m = (a - d*a)u + (1 - a - d*a)(u+1) with
d = q^(-1/3) is held exactly (rational plus cube-root term); every
acceptance decision in the sampler and the degree caps is made in exact
arithmetic by cubing, never with floats.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, inf

from .geom import PointSet, affine_space
from .poly import (
    DegreeCap,
    MonomialBasis,
    interpolate_vanishing,
    is_identically_zero_on_space,
    homogeneous_top,
    restrict_to_line,
    sign_frac_plus_cbrt,
)
from .gf import field_of_order


class EvenFieldUnsupported(ValueError):
    pass


class RetryExhausted(RuntimeError):
    pass


class CountingNotInParadoxRegime(RuntimeError):
    """The counting inequality of the fractional argument holds for this K:
    interpolation is infeasible, which is the expected outcome when |K| is
    as large as a true Kakeya set must be."""


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class KakeyaWitness:
    q: int
    pointset: PointSet
    lines: dict  # dir_id -> canonical line fully contained in the set


@dataclass
class MissingDirections:
    q: int
    directions: list  # dir_ids with no fully-contained line


def verify_kakeya(pset: PointSet):
    """Exhaustive check: for each of the q^2+q+1 directions, find a line
    fully contained in the set.  Returns a KakeyaWitness on success, else
    MissingDirections listing every uncovered direction."""
    sp = affine_space(pset.q, pset.n)
    witness = {}
    missing = []
    for d in range(sp.ndirs):
        tab = sp.line_table(d)
        contained = pset.mask[tab].all(axis=1)
        hit = contained.argmax() if contained.any() else None
        if hit is None:
            missing.append(d)
        else:
            pts = tab[int(hit)]
            witness[d] = (d, int(pts.min()))
    if missing:
        return MissingDirections(pset.q, missing)
    return KakeyaWitness(pset.q, pset, witness)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

def build_quadratic_residue_set(q: int) -> PointSet:
    """K = {(x1, x2, t) : x1 + t^2 and x2 + t^2 are squares} union the
    plane {t = 0}; contains, for direction (b1, b2, 1), the line based at
    (b1^2/4, b2^2/4, 0) since a + t*b + t^2 = (t + b/2)^2.

    Exact size: (q-1)((q+1)/2)^2 + q^2 -- the t=0 slice of the residue
    part lies inside the added plane."""
    ctx = field_of_order(q)
    if q % 2 == 0:
        raise EvenFieldUnsupported("quadratic residues need odd q")
    sp = affine_space(q, 3)
    squares = {ctx.mul(y, y) for y in ctx.elements()}  # includes 0
    K = PointSet(q, 3)
    for t in range(q):
        t2 = ctx.mul(t, t)
        good = [x for x in range(q) if ctx.add(x, t2) in squares]
        for x1 in good:
            for x2 in good:
                K.add(sp.index((x1, x2, t)))
    for x1 in range(q):
        for x2 in range(q):
            K.add(sp.index((x1, x2, 0)))
    return K


def qr_set_size(q: int) -> int:
    """Exact cardinality of build_quadratic_residue_set(q)."""
    return (q - 1) * ((q + 1) // 2) ** 2 + q * q


def build_thin_kakeya_set(q: int) -> PointSet:
    """A minimal-style Kakeya set: one line per direction (the lines the
    quadratic-residue construction uses, plus lines through the origin in
    the t = 0 plane).  Size is at most q(q^2+q+1)."""
    ctx = field_of_order(q)
    if q % 2 == 0:
        raise EvenFieldUnsupported("construction needs odd q")
    sp = affine_space(q, 3)
    K = PointSet(q, 3)
    inv2 = ctx.inv(2 % q)
    for b1 in range(q):
        for b2 in range(q):
            h1 = ctx.mul(inv2, b1)
            h2 = ctx.mul(inv2, b2)
            base = sp.index((ctx.mul(h1, h1), ctx.mul(h2, h2), 0))
            d = sp.dir_index[sp.normalize_dir((b1, b2, 1))]
            for p in sp.line_points(d, base):
                K.add(p)
    for d, vec in enumerate(sp.directions):
        if vec[2] == 0:
            for p in sp.line_points(d, 0):
                K.add(p)
    return K


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def integer_multiplicity_bound(q: int, n: int = 3, m: int = 2) -> int:
    """Lower bound ceil(N_q(n,m) / binom(m+n-1, n)) on any Kakeya set."""
    from .poly import count_capped_monomials

    assert m >= 1
    N = count_capped_monomials(n, q, Fraction(m))
    b = comb(m + n - 1, n)
    return -(-N // b)


def leading_term_Nq3(m) -> Fraction:
    """Exact leading q^3 coefficient of N_q(3,m): (-2m^3+9m^2-9m+3)/6,
    valid for 1 <= m <= 2."""
    m = Fraction(m)
    if not 1 <= m <= 2:
        raise ValueError("leading-term formula applies for 1 <= m <= 2")
    return (-2 * m ** 3 + 9 * m ** 2 - 9 * m + 3) / 6


def fractional_coefficient(m, u: int = 1) -> Fraction:
    """Exact asymptotic Kakeya lower-bound coefficient for the fractional
    argument at multiplicity parameter m (u = 1: m in [1,2]; u = 2:
    m in [2,3])."""
    m = Fraction(m)
    if u == 1:
        if not 1 <= m <= 2:
            raise ValueError("u=1 branch needs m in [1,2]")
        num = -2 * m ** 3 + 9 * m ** 2 - 9 * m + 3
        den = 6 * (3 * m - 2)
    elif u == 2:
        if not 2 <= m <= 3:
            raise ValueError("u=2 branch needs m in [2,3]")
        num = m ** 3 - 3 * (m - 1) ** 3 + 3 * (m - 2) ** 3
        den = 6 * (6 * m - 8)
    else:
        raise ValueError("u must be 1 or 2")
    return num / den


def optimize_fractional_bound(tol: float = 1e-12):
    """Maximize the fractional-bound coefficient over both branches.

    The u=1 optimum solves 4m^3 - 13m^2 + 12m - 3 = 0 in (1, 2); found by
    bisection on that derivative polynomial, then compared against the
    u=2 branch (whose best value is the integer bound 5/24 at m=2).
    Returns (m_star, coefficient, details)."""

    def dnum(m):
        # sign of d/dm of the u=1 coefficient (up to a positive factor)
        return -(4 * m ** 3 - 13 * m ** 2 + 12 * m - 3)

    lo, hi = 1.5, 2.0
    assert dnum(lo) > 0 and dnum(hi) < 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if dnum(mid) > 0:
            lo = mid
        else:
            hi = mid
    m1 = (lo + hi) / 2
    c1 = float(fractional_coefficient(Fraction(m1).limit_denominator(10 ** 9), 1))

    # u=2 branch: coefficient is decreasing on [2,3]; optimum at m=2
    best2 = max(
        (float(fractional_coefficient(Fraction(2) + Fraction(j, 1000), 2)), j)
        for j in range(0, 1001)
    )
    m2 = 2 + best2[1] / 1000
    c2 = best2[0]

    if c1 >= c2:
        m_star, coeff = m1, c1
    else:
        m_star, coeff = m2, c2
    assert coeff > 5 / 24
    return m_star, coeff, {"u1": (m1, c1), "u2": (m2, c2)}


# ---------------------------------------------------------------------------
# fractional subset sampling
# ---------------------------------------------------------------------------

@dataclass
class FractionalParams:
    u: int
    alpha: Fraction
    q: int

    @property
    def cap(self) -> DegreeCap:
        return DegreeCap.fractional(self.u, self.alpha)

    @property
    def m_value(self) -> float:
        return self.cap.value(self.q)


@dataclass
class SubsetSample:
    subset: PointSet
    line_counts: dict  # line -> |line ∩ S| over the checked lines
    size: int
    attempts: int


def _within_window(count: int, alpha: Fraction, scale: int, q: int) -> bool:
    """|count - alpha*scale| < alpha*scale*q^(-1/3), exactly (by cubing)."""
    target = alpha * scale
    r = abs(Fraction(count) - target)
    return r ** 3 * q < target ** 3


def sample_fractional_subset(K: PointSet, witness: KakeyaWitness, alpha,
                             seed: int, retry_cap: int = 1000,
                             check_all_lines: bool = False) -> SubsetSample:
    """Random S subset of K with | |S| - alpha|K| | < d*alpha|K| and, for
    each witness line, | |L∩S| - alpha*q | < d*alpha*q, d = q^(-1/3).
    Retries up to retry_cap seeded draws, then raises RetryExhausted."""
    alpha = Fraction(alpha)
    assert 0 < alpha <= 1
    q = K.q
    sp = affine_space(q, K.n)
    rng = random.Random(seed)
    kpts = [int(i) for i in K.indices()]
    lines = list(witness.lines.values())
    if check_all_lines:
        lines = [
            ln for ln in sp.all_lines()
            if all(K.mask[p] for p in sp.line_points(*ln))
        ]
    a = float(alpha)
    for attempt in range(1, retry_cap + 1):
        chosen = [p for p in kpts if rng.random() < a] if alpha < 1 else kpts
        S = PointSet(q, K.n, indices=chosen)
        # repair pass: nudge each out-of-window line by toggling its own
        # points (witness lines pairwise share at most one point, so the
        # nudges barely interact); the draw is re-verified from scratch below
        for ln in lines:
            pts = list(sp.line_points(*ln))
            c = sum(1 for p in pts if S.mask[p])
            for _ in range(q + 1):  # empty integer windows stop here
                if _within_window(c, alpha, q, q):
                    break
                target = float(alpha) * q
                if c < target:
                    off = [p for p in pts if not S.mask[p]]
                    if not off:
                        break
                    S.add(rng.choice(off))
                    c += 1
                else:
                    on = [p for p in pts if S.mask[p]]
                    if not on:
                        break
                    S.discard(rng.choice(on))
                    c -= 1
        if not _within_window(len(S), alpha, len(kpts), q):
            continue
        counts = {}
        ok = True
        for ln in lines:
            c = sum(1 for p in sp.line_points(*ln) if S.mask[p])
            counts[ln] = c
            if not _within_window(c, alpha, q, q):
                ok = False
                break
        if ok:
            return SubsetSample(S, counts, len(S), attempt)
    raise RetryExhausted(
        f"no acceptable subset in {retry_cap} draws (alpha={alpha}, q={q})"
    )


# ---------------------------------------------------------------------------
# the end-to-end fractional pipeline
# ---------------------------------------------------------------------------

@dataclass
class PipelineReport:
    q: int
    u: int
    alpha: Fraction
    seed: int
    construction: str
    m_value: float
    size_K: int
    stage: str
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "q": self.q,
            "u": self.u,
            "alpha": str(self.alpha),
            "seed": self.seed,
            "construction": self.construction,
            "m": self.m_value,
            "sizeK": self.size_K,
            "stage": self.stage,
            "detail": self.detail,
        }


def counting_inequality_holds(q: int, u: int, alpha, size_K: int) -> bool:
    """Exact check of N_q(3,m) <= (a+da)C(2+u,3)|K| + (1-a+da)C(3+u,3)|K|
    with d = q^(-1/3) and m the fractional parameter."""
    alpha = Fraction(alpha)
    cap = DegreeCap.fractional(u, alpha)
    N = len(MonomialBasis(3, q, cap))
    b1 = comb(2 + u, 3)
    b2 = comb(3 + u, 3)
    X = alpha * b1 * size_K + (1 - alpha) * b2 * size_K
    Y = alpha * b1 * size_K + alpha * b2 * size_K  # coefficient of q^(-1/3)
    # N <= X + Y*q^(-1/3)  <=>  (X - N) + (Y/q)*q^(2/3) >= 0
    return sign_frac_plus_cbrt(X - N, Fraction(Y, q), q) >= 0


def fractional_pipeline(q: int, u: int, alpha, seed: int,
                        construction: str = "qr",
                        retry_cap: int = 1000) -> PipelineReport:
    """Run the fractional-multiplicity argument as a computation:
    build K, sample S, interpolate g vanishing with multiplicity u on S
    and u+1 on K\\S, then walk the witness lines counting zeros of the
    restrictions and evaluating the top homogeneous part on every
    direction.  The report names the stage where the run terminates."""
    if u not in (1, 2):
        raise ValueError("u must be 1 or 2")
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    if construction == "qr":
        K = build_quadratic_residue_set(q)
    elif construction == "thin":
        K = build_thin_kakeya_set(q)
    else:
        raise ValueError(f"unknown construction {construction!r}")
    params = FractionalParams(u, alpha, q)
    cap = params.cap
    report = PipelineReport(
        q=q, u=u, alpha=alpha, seed=seed, construction=construction,
        m_value=params.m_value, size_K=len(K), stage="init",
    )

    check = verify_kakeya(K)
    assert isinstance(check, KakeyaWitness), "construction failed verification"

    if alpha == 0:
        S = PointSet(q, 3)
        report.detail["sample"] = {"size": 0, "attempts": 0}
    elif alpha == 1:
        S = K.copy()
        report.detail["sample"] = {"size": len(K), "attempts": 0}
    else:
        try:
            sample = sample_fractional_subset(K, check, alpha, seed, retry_cap)
        except RetryExhausted as e:
            report.stage = "sampler-exhausted"
            report.detail["error"] = str(e)
            return report
        S = sample.subset
        report.detail["sample"] = {"size": sample.size, "attempts": sample.attempts}

    rest = PointSet.from_mask(q, 3, K.mask & ~S.mask)
    basis = MonomialBasis(3, q, cap)
    nconstraints = len(S) * comb(u + 2, 3) + len(rest) * comb(u + 3, 3)
    report.detail["monomials"] = len(basis)
    report.detail["constraints"] = nconstraints
    if nconstraints >= len(basis):
        report.stage = "counting-not-in-paradox-regime"
        report.detail["counting_inequality_holds"] = counting_inequality_holds(
            q, u, alpha, len(K)
        )
        return report

    g = interpolate_vanishing(S, u, rest, u + 1, cap)
    d = g.total_degree
    report.detail["degree"] = d
    g0 = homogeneous_top(g)

    sp = affine_space(q, 3)
    surviving = None
    g0_values = {}
    for dir_id, line in check.lines.items():
        a = sp.coords(line[1])
        b = sp.directions[dir_id]
        f = restrict_to_line(g, a, b)
        g0_values[dir_id] = g0.evaluate(b)
        if f.is_zero():
            continue
        zeros = sum(
            mu if mu is not inf else 0
            for mu in (f.multiplicity_at(t) for t in range(q))
        )
        if surviving is None:
            surviving = {
                "direction": list(b),
                "restriction_degree": int(f.degree),
                "zeros_with_multiplicity": int(zeros),
            }
    if surviving is not None:
        report.stage = "restriction-survives"
        report.detail["witness_direction"] = surviving
        report.detail["g0_zero_directions"] = sum(
            1 for v in g0_values.values() if v == 0
        )
        return report

    # every restriction identically zero -> g0 vanishes on all directions,
    # contradicting nonvanishing of a nonzero polynomial with individual
    # degrees < q; is_identically_zero_on_space raises on that inconsistency.
    assert all(v == 0 for v in g0_values.values())
    report.stage = "g0-vanishes-on-all-directions"
    is_identically_zero_on_space(g0)  # raises AssertionError
    return report  # pragma: no cover
