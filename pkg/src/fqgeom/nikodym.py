"""Nikodym sets in AG(n,q): verification with witness extraction,
union-of-lines constructions and bounds, the coplanar-line bound, the
golden-ratio density threshold, and a seeded exploration harness for
large line families with capped plane occupancy.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, isqrt, sqrt

import numpy as np

from .geom import (
    LineFamily,
    PointSet,
    UnsupportedField,
    affine_space,
    conic_dual_lines,
    max_line_coincidence,
)
from .incidence import count_incidences, mixing_bound_holds, mixing_incidence_bound


class TooFewLines(ValueError):
    pass


class NotNikodym(ValueError):
    pass


class GeneratorInfeasible(ValueError):
    pass


class AssignmentNotInjective(RuntimeError):
    """The set is Nikodym but no injective single-intersection assignment
    was found; surfaced distinctly from non-Nikodym-ness."""


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class NikodymWitness:
    q: int
    pointset: PointSet
    assignment: dict  # complement point index -> line (dir_id, base)

    def complement_size(self) -> int:
        return len(self.pointset.complement())


@dataclass
class FailingPoints:
    q: int
    points: list  # indices with no qualifying line


def verify_nikodym(pset: PointSet):
    """Check that through EVERY point p some line meets the complement in
    at most {p}; extract, for each complement point, the canonical-first
    such line.  The single-intersection structure makes the assignment
    injective automatically (a line determines its unique complement
    point).  Returns NikodymWitness or FailingPoints."""
    sp = affine_space(pset.q, pset.n)
    comp = (~pset.mask).astype(np.int64)
    self_comp = comp.copy()  # required complement count on the line at p
    ok = np.zeros(sp.npoints, dtype=bool)
    assignment = {}
    for d in range(sp.ndirs):
        tab = sp.line_table(d)
        cnt = comp[tab].sum(axis=1)
        good = cnt == self_comp
        for p in np.nonzero(good & ~ok)[0]:
            p = int(p)
            if comp[p] and p not in assignment:
                assignment[p] = sp.canonical_line(d, p)
        ok |= good
    if not ok.all():
        return FailingPoints(pset.q, [int(p) for p in np.nonzero(~ok)[0]])
    lines = list(assignment.values())
    if len(set(lines)) != len(lines):  # pragma: no cover - structurally impossible
        raise AssignmentNotInjective("two complement points share a line")
    return NikodymWitness(pset.q, pset, assignment)


def union_of_lines(L: LineFamily) -> PointSet:
    return L.union_points()


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def union_lower_bound_check(L: LineFamily, fraction=Fraction(62, 100)) -> dict:
    """For |L| >= fraction*q^3 lines, report measured |P(L)| against the
    smallest |P| that the exact mixing inequality allows when every line
    contributes q incidences (I = q|L|)."""
    q = L.space.q
    if Fraction(len(L)) < fraction * q ** 3:
        raise TooFewLines(f"need at least {float(fraction)}*q^3 = {float(fraction) * q**3:.0f} lines")
    P = union_of_lines(L)
    I = q * len(L)
    # smallest nP with the mixing bound >= I; the bound crosses I once in nP
    lo, hi = 0, q ** 3
    while lo < hi:
        mid = (lo + hi) // 2
        if mixing_bound_holds(I, mid, len(L), q):
            hi = mid
        else:
            lo = mid + 1
    implied = lo
    assert len(P) >= implied, "union smaller than the mixing-implied bound"
    return {
        "q": q,
        "nL": len(L),
        "measured": len(P),
        "implied_lower_bound": implied,
        "incidences": I,
        "ratio": len(P) / q ** 3,
    }


def build_conic_dual_line_family(q: int, fraction=Fraction(62, 100)):
    """k = floor(fraction*q) planes through the origin whose normals are
    conic-dual line coefficients (so no three planes share a line); L is
    every line inside their union.

    The report checks the exact identities |L| = k*q(q+1) - C(k,2) and
    |P(L)| = k*q^2 - (q-1)*C(k,2) - (k-1) and the coincidence bound."""
    fraction = Fraction(fraction)
    k = int(fraction * q)
    if q < 5 or k < 3:
        raise UnsupportedField("need q >= 5 and at least 3 planes")
    if k > q + 1:
        raise UnsupportedField(f"only q+1 = {q + 1} conic-dual lines exist")
    duals = conic_dual_lines(q)[:k]
    assert max_line_coincidence(q, duals) <= 2
    sp = affine_space(q, 3)
    fam = LineFamily(sp)
    planes = [(sp.dir_index[sp.normalize_dir(c)], 0) for c in duals]
    for pl in planes:
        for ln in sp.lines_in_plane(pl):
            fam.add(ln)
    P = fam.union_points()
    nL_expected = k * q * (q + 1) - comb(k, 2)
    nP_expected = k * q * q - (q - 1) * comb(k, 2) - (k - 1)
    assert len(fam) == nL_expected
    assert len(P) == nP_expected
    assert len(fam) >= k * q * (q + 1) - comb(k, 2)
    report = {
        "q": q,
        "k": k,
        "planes": len(planes),
        "nL": len(fam),
        "nL_identity": nL_expected,
        "nP": len(P),
        "nP_identity": nP_expected,
        "max_dual_coincidence": max_line_coincidence(q, duals),
        "ratio": len(P) / q ** 3,
    }
    return fam, report


def f2_bound(q: int) -> float:
    """Planar coplanar-line cap q^{3/2} + 1 + q (imported constant plus
    the affine/projective slack of one line at infinity)."""
    return q ** 1.5 + 1 + q


def _leq_f2_bound(count: int, q: int) -> bool:
    """count <= q^{3/2} + 1 + q, exactly (integer squaring)."""
    rest = count - 1 - q
    if rest <= 0:
        return True
    return rest * rest <= q ** 3


def coplanar_line_bound_check(witness: NikodymWitness) -> dict:
    """Count assignment lines inside every plane; assert each count is at
    most q^{3/2} + 1 + q (exact integer comparison); report the busiest
    plane."""
    sp = affine_space(witness.q, witness.pointset.n)
    fam = LineFamily(sp, witness.assignment.values())
    plane, occ = fam.max_plane_occupancy()
    assert _leq_f2_bound(occ, witness.q), (
        f"plane {plane} holds {occ} assignment lines > bound"
    )
    return {
        "q": witness.q,
        "n_lines": len(fam),
        "max_plane": plane,
        "max_occupancy": occ,
        "bound": f2_bound(witness.q),
        "bound_tag": "IMPORTED",
    }


def golden_ratio_threshold(tol: float = 1e-12) -> float:
    """Largest density x with x <= (1-x)x + x*sqrt(1-x): reduces to
    (1-x) + sqrt(1-x) = 1, solved by bisection; the root is (sqrt(5)-1)/2."""

    def f(x):
        return (1 - x) + sqrt(1 - x) - 1

    lo, hi = 0.5, 0.7
    assert f(lo) > 0 > f(hi)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    root = (lo + hi) / 2
    assert abs(root - 0.6180339887) < 1e-8
    return root


def nikodym_complement_bound_check(pset: PointSet) -> dict:
    """For a verified Nikodym set: recount the witness incidences
    (exactly (q-1)|complement|) and assert the exact mixing bound on them;
    report the complement density against the golden-ratio threshold."""
    res = verify_nikodym(pset)
    if isinstance(res, FailingPoints):
        raise NotNikodym(f"{len(res.points)} failing points")
    q = pset.q
    sp = affine_space(q, pset.n)
    fam = LineFamily(sp, res.assignment.values())
    stats = count_incidences(pset, fam)
    assert stats.incidences == (q - 1) * len(fam)
    holds = True
    if fam:
        holds = mixing_bound_holds(stats.incidences, len(pset), len(fam), q)
        assert holds
    return {
        "q": q,
        "complement": len(fam),
        "complement_ratio": len(fam) / q ** pset.n,
        "threshold": golden_ratio_threshold(),
        "witness_incidences": stats.incidences,
        "mixing_bound": mixing_incidence_bound(len(pset), len(fam), q)["bound"]
        if fam else 0.0,
        "mixing_holds": holds,
    }


# ---------------------------------------------------------------------------
# exploration harness
# ---------------------------------------------------------------------------

@dataclass
class ConjectureInstance:
    q: int
    generator: str
    seed: int
    n_lines: int
    max_plane_occupancy: int
    n_covered: int
    ratio: float
    alarm: bool
    extra: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "q": self.q,
            "generator": self.generator,
            "seed": self.seed,
            "nL": self.n_lines,
            "maxPlaneOccupancy": self.max_plane_occupancy,
            "nPL": self.n_covered,
            "ratio": self.ratio,
            "alarm": self.alarm,
            **self.extra,
        }


def _random_family(sp, count, cap, rng) -> LineFamily:
    fam = LineFamily(sp)
    pool = sp.all_lines()
    rng.shuffle(pool)
    for ln in pool:
        if len(fam) == count:
            break
        if cap is not None:
            if any(
                fam.occupancy.get(pl, 0) + 1 > cap
                for pl in sp.planes_through_line(ln)
            ):
                continue
        fam.add(ln)
    if len(fam) < count:
        raise GeneratorInfeasible(
            f"cap {cap} admits only {len(fam)} of {count} requested lines"
        )
    return fam


def conjecture_harness(generator: str, q: int, trials: int, seed: int,
                       n_lines: int | None = None, plane_cap=None,
                       alpha=Fraction(1, 2), alarm_ratio: float = 0.9):
    """Yield ConjectureInstance records for seeded line-family draws.

    generator: 'uniform' (no cap), 'plane-capped' (reject lines that push
    a plane over the cap), 'conic-dual', or 'hermitian' (tangent-line
    families restricted to the affine chart).  Instances whose coverage
    ratio |P(L)|/q^3 falls below alarm_ratio are flagged, never asserted.
    """
    sp = affine_space(q, 3)
    if n_lines is None:
        n_lines = int(q ** 2.5)
    if plane_cap is None and generator == "plane-capped":
        plane_cap = max(int(0.5 * q ** 1.5), 1)
    out = []
    for t in range(trials):
        trial_seed = seed + t
        rng = random.Random(trial_seed)
        extra = {}
        if generator == "uniform":
            fam = _random_family(sp, min(n_lines, q**4 + q**3 + q**2), None, rng)
        elif generator == "plane-capped":
            fam = _random_family(sp, n_lines, plane_cap, rng)
            extra["planeCap"] = plane_cap
        elif generator == "conic-dual":
            fam, rep = build_conic_dual_line_family(q)
            extra["k"] = rep["k"]
        elif generator == "hermitian":
            fam, extra = _hermitian_family(q, alpha, trial_seed)
        else:
            raise ValueError(f"unknown generator {generator!r}")
        P = fam.union_points()
        _, occ = fam.max_plane_occupancy()
        ratio = len(P) / q ** 3
        out.append(ConjectureInstance(
            q, generator, trial_seed, len(fam), occ, len(P), ratio,
            alarm=ratio < alarm_ratio, extra=extra,
        ))
    return out


def _hermitian_family(q: int, alpha, seed: int):
    """Affine restriction of a Hermitian tangent-line family: projective
    tangent lines mapped into AG(3,q) through the x0 = 1 chart."""
    from .hermitian import (
        NonSquareField, build_hermitian, build_tangent_line_family,
        identity_hermitian,
    )

    r = isqrt(q)
    if r * r != q:
        raise GeneratorInfeasible(f"hermitian generator needs square q, got {q}")
    p = None
    for cand in range(2, r + 1):
        if r % cand == 0:
            p = cand if r == cand else None
            break
    if p is None:
        raise GeneratorInfeasible(f"sqrt(q) = {r} must be prime for this generator")
    V = build_hermitian(identity_hermitian(p, 3), 3)
    fam_proj, rep = build_tangent_line_family(V, alpha, seed)
    sp = affine_space(q, 3)
    ctx = sp.ctx
    fam = LineFamily(sp)
    for ln in fam_proj.lines:
        finite = [x for x in ln if x[0] != 0]
        if len(finite) < 2:
            continue
        # x = (1, a1, a2, a3) after scaling by x0^{-1}
        aff = []
        for x in finite:
            inv = ctx.inv(x[0])
            aff.append(tuple(ctx.mul(inv, v) for v in x[1:]))
        d = sp.dir_index[sp.normalize_dir(
            tuple(ctx.sub(a, b) for a, b in zip(aff[0], aff[1]))
        )]
        fam.add(sp.canonical_line(d, sp.index(aff[0])))
    extra = {"alpha": str(Fraction(alpha)), "uncovered": rep["uncovered_variety_points"],
             "coveredProjective": rep["covered_projective"]}
    return fam, extra


def write_records(instances, path: str):
    """JSON-lines dump with deterministic key order."""
    with open(path, "w") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_record(), sort_keys=True) + "\n")
