"""Points, lines and planes of AG(n,q) and PG(n,q), n <= 3.

Affine points are integer indices in [0, q^n) (base-q packing of the
coordinate vector, coordinate 0 least significant).  Directions are
normalized vectors (first nonzero coordinate 1); a line is the pair
(direction id, index of its lexicographically-least point), which makes
dedup and cross-run ordering trivial.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .gf import FieldCtx, field_of_order, NonPrime


class UnsupportedField(ValueError):
    pass


class MismatchedField(ValueError):
    pass


# ---------------------------------------------------------------------------
# affine space
# ---------------------------------------------------------------------------

class AffineSpace:
    """AG(n, q) with precomputed direction and incidence structure."""

    def __init__(self, q: int, n: int):
        if n not in (2, 3):
            raise UnsupportedField(f"n = {n} unsupported (need 2 or 3)")
        try:
            self.ctx: FieldCtx = field_of_order(q)
        except NonPrime as e:
            raise UnsupportedField(str(e))
        self.q = q
        self.n = n
        self.npoints = q ** n
        # normalized directions, sorted by coordinate tuple
        dirs = []
        for v in product(range(q), repeat=n):
            if any(v):
                first = next(x for x in v if x)
                if first == 1:
                    dirs.append(v)
        dirs.sort()
        self.directions = dirs
        self.dir_index = {d: i for i, d in enumerate(dirs)}
        self.ndirs = len(dirs)  # (q^n - 1)/(q - 1)
        # line point table: _line_pts[dir_id][base_idx] -> tuple of q indices
        self._line_pts_cache: dict = {}
        self._canon_cache: dict = {}
        self._perp: list | None = None
        self._np_add = None
        self._np_mul = None
        self._line_tables: dict = {}

    # -- coordinates --

    def coords(self, idx: int):
        q = self.q
        out = []
        for _ in range(self.n):
            out.append(idx % q)
            idx //= q
        return tuple(out)

    def index(self, coords) -> int:
        idx = 0
        for c in reversed(list(coords)):
            idx = idx * self.q + c
        return idx

    def points(self):
        return range(self.npoints)

    def normalize_dir(self, vec):
        """Scale a nonzero vector so its first nonzero coordinate is 1."""
        vec = tuple(vec)
        first = next((x for x in vec if x), None)
        assert first is not None, "zero vector has no direction"
        if first == 1:
            return vec
        inv = self.ctx.inv(first)
        return tuple(self.ctx.mul(inv, x) for x in vec)

    # -- lines --

    def line_points(self, dir_id: int, base_idx: int):
        """Indices of the q points {base + t*dir}, in t order."""
        key = (dir_id, base_idx)
        hit = self._line_pts_cache.get(key)
        if hit is not None:
            return hit
        ctx = self.ctx
        d = self.directions[dir_id]
        b = self.coords(base_idx)
        pts = tuple(
            self.index(tuple(ctx.add(bi, ctx.mul(t, di)) for bi, di in zip(b, d)))
            for t in range(self.q)
        )
        self._line_pts_cache[key] = pts
        return pts

    def _field_tables(self):
        if self._np_add is None:
            q = self.q
            ctx = self.ctx
            if ctx.k == 1:
                grid = np.arange(q)
                self._np_add = (grid[:, None] + grid[None, :]) % q
                self._np_mul = (grid[:, None] * grid[None, :]) % q
            else:
                self._np_add = np.array(
                    [[ctx.add(a, b) for b in range(q)] for a in range(q)],
                    dtype=np.int64,
                )
                self._np_mul = np.array(
                    [[ctx.mul(a, b) for b in range(q)] for a in range(q)],
                    dtype=np.int64,
                )
        return self._np_add, self._np_mul

    def line_table(self, dir_id: int) -> np.ndarray:
        """(npoints, q) array: row p lists the points of the line through p
        with the given direction, in t order."""
        tab = self._line_tables.get(dir_id)
        if tab is not None:
            return tab
        addt, mult = self._field_tables()
        q = self.q
        d = self.directions[dir_id]
        coords = np.empty((self.npoints, self.n), dtype=np.int64)
        idx = np.arange(self.npoints)
        rem = idx.copy()
        for i in range(self.n):
            coords[:, i] = rem % q
            rem //= q
        tab = np.empty((self.npoints, q), dtype=np.int64)
        for t in range(q):
            acc = np.zeros(self.npoints, dtype=np.int64)
            mul = 1
            for i in range(self.n):
                step = mult[t, d[i]]
                col = addt[coords[:, i], step]
                acc += col * mul
                mul *= q
            tab[:, t] = acc
        self._line_tables[dir_id] = tab
        return tab

    def canonical_line(self, dir_id: int, point_idx: int):
        """The line through point_idx with the given direction, as
        (dir_id, least point index on the line)."""
        key = (dir_id, point_idx)
        hit = self._canon_cache.get(key)
        if hit is not None:
            return hit
        pts = self.line_points(dir_id, point_idx)
        line = (dir_id, min(pts))
        for p in pts:
            self._canon_cache[(dir_id, p)] = line
        return line

    def lines_through(self, point_idx: int):
        """All canonical lines through a point (one per direction)."""
        return [self.canonical_line(d, point_idx) for d in range(self.ndirs)]

    def all_lines(self):
        """Every affine line exactly once, in canonical (dir, base) order."""
        out = []
        for d in range(self.ndirs):
            seen = bytearray(self.npoints)
            for p in range(self.npoints):
                if seen[p]:
                    continue
                pts = self.line_points(d, p)
                for x in pts:
                    seen[x] = 1
                out.append((d, min(pts)))
        out.sort()
        return out

    # -- planes (n = 3); a plane is (normal_dir_id, offset) --

    def dot(self, u, v) -> int:
        ctx = self.ctx
        acc = 0
        for a, b in zip(u, v):
            acc = ctx.add(acc, ctx.mul(a, b))
        return acc

    def perp_dir_ids(self, dir_id: int):
        """Ids of normalized vectors orthogonal to the given direction."""
        if self._perp is None:
            self._perp = [None] * self.ndirs
        if self._perp[dir_id] is None:
            d = self.directions[dir_id]
            self._perp[dir_id] = tuple(
                i for i, m in enumerate(self.directions) if self.dot(m, d) == 0
            )
        return self._perp[dir_id]

    def all_planes(self):
        assert self.n == 3
        return [(m, c) for m in range(self.ndirs) for c in range(self.q)]

    def plane_points(self, plane):
        m, c = plane
        normal = self.directions[m]
        return [p for p in self.points() if self.dot(normal, self.coords(p)) == c]

    def planes_through_line(self, line):
        """The q+1 planes of AG(3,q) containing an affine line."""
        assert self.n == 3
        dir_id, base = line
        b = self.coords(base)
        return [(m, self.dot(self.directions[m], b)) for m in self.perp_dir_ids(dir_id)]

    def lines_in_plane(self, plane):
        """The q(q+1) lines contained in a plane, canonical order."""
        assert self.n == 3
        m, c = plane
        normal = self.directions[m]
        out = []
        for d in range(self.ndirs):
            if self.dot(normal, self.directions[d]) != 0:
                continue
            seen = set()
            for p in self.points():
                if p in seen:
                    continue
                if self.dot(normal, self.coords(p)) != c:
                    continue
                pts = self.line_points(d, p)
                seen.update(pts)
                out.append((d, min(pts)))
        out.sort()
        return out

    def project_from_point(self, point_idx: int):
        """Bijection from the lines through a point onto PG(2,q) points
        (each line maps to its normalized direction vector)."""
        assert self.n == 3
        return {
            self.canonical_line(d, point_idx): self.directions[d]
            for d in range(self.ndirs)
        }


@lru_cache(maxsize=None)
def affine_space(q: int, n: int = 3) -> AffineSpace:
    return AffineSpace(q, n)


# ---------------------------------------------------------------------------
# point sets and line families
# ---------------------------------------------------------------------------

class PointSet:
    """Dense membership bitmap over the q^n points of AG(n,q)."""

    def __init__(self, q: int, n: int = 3, indices=None):
        self.q = q
        self.n = n
        self.mask = np.zeros(q ** n, dtype=bool)
        if indices is not None:
            self.mask[list(indices)] = True

    @classmethod
    def from_mask(cls, q, n, mask):
        s = cls(q, n)
        s.mask = np.asarray(mask, dtype=bool).copy()
        return s

    def add(self, idx: int):
        self.mask[idx] = True

    def discard(self, idx: int):
        self.mask[idx] = False

    def __contains__(self, idx: int) -> bool:
        return bool(self.mask[idx])

    def __len__(self) -> int:
        return int(self.mask.sum())

    def indices(self):
        return np.nonzero(self.mask)[0]

    def complement(self) -> "PointSet":
        return PointSet.from_mask(self.q, self.n, ~self.mask)

    def copy(self) -> "PointSet":
        return PointSet.from_mask(self.q, self.n, self.mask)

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and self.q == other.q
            and self.n == other.n
            and bool(np.array_equal(self.mask, other.mask))
        )

    @classmethod
    def full(cls, q, n=3):
        s = cls(q, n)
        s.mask[:] = True
        return s


class LineFamily:
    """Distinct affine lines with an incrementally-maintained per-plane
    occupancy index (n = 3 only for the occupancy part)."""

    def __init__(self, space: AffineSpace, lines=()):
        self.space = space
        self._lines: set = set()
        self.occupancy: dict = {}
        for ln in lines:
            self.add(ln)

    def add(self, line) -> bool:
        if line in self._lines:
            return False
        self._lines.add(line)
        if self.space.n == 3:
            for pl in self.space.planes_through_line(line):
                self.occupancy[pl] = self.occupancy.get(pl, 0) + 1
        return True

    def __contains__(self, line):
        return line in self._lines

    def __len__(self):
        return len(self._lines)

    def lines(self):
        return sorted(self._lines)

    def max_plane_occupancy(self):
        """(plane, count) with the largest member-line count, or (None, 0)."""
        if not self.occupancy:
            return None, 0
        pl = max(self.occupancy, key=lambda k: (self.occupancy[k], k))
        return pl, self.occupancy[pl]

    def union_points(self) -> PointSet:
        s = PointSet(self.space.q, self.space.n)
        for ln in self._lines:
            for p in self.space.line_points(*ln):
                s.mask[p] = True
        return s


def enumerate_lines(q: int, n: int = 3) -> LineFamily:
    """All q^4+q^3+q^2 affine lines of AG(3,q) (or all lines of AG(2,q))."""
    sp = affine_space(q, n)
    fam = LineFamily(sp)
    for ln in sp.all_lines():
        fam.add(ln)
    return fam


# ---------------------------------------------------------------------------
# projective space
# ---------------------------------------------------------------------------

class ProjSpace:
    """PG(n, q): normalized homogeneous coordinate tuples of length n+1."""

    def __init__(self, q: int, n: int):
        try:
            self.ctx = field_of_order(q)
        except NonPrime as e:
            raise UnsupportedField(str(e))
        self.q = q
        self.n = n
        pts = []
        for v in product(range(q), repeat=n + 1):
            if any(v):
                first = next(x for x in v if x)
                if first == 1:
                    pts.append(v)
        pts.sort()
        self.points = pts
        self.point_index = {v: i for i, v in enumerate(pts)}

    def normalize(self, vec):
        ctx = self.ctx
        vec = tuple(vec)
        first = next((x for x in vec if x), None)
        if first is None:
            raise ValueError("zero vector has no projective point")
        inv = ctx.inv(first)
        return tuple(ctx.mul(inv, x) for x in vec)

    def dot(self, u, v) -> int:
        ctx = self.ctx
        acc = 0
        for a, b in zip(u, v):
            acc = ctx.add(acc, ctx.mul(a, b))
        return acc

    def line_points(self, u, v):
        """Point tuples of the projective line through distinct points u, v."""
        ctx = self.ctx
        pts = [self.normalize(v)]
        for lam in range(self.q):
            w = tuple(ctx.add(a, ctx.mul(lam, b)) for a, b in zip(u, v))
            pts.append(self.normalize(w))
        pts = sorted(set(pts))
        assert len(pts) == self.q + 1
        return tuple(pts)

    def all_lines(self):
        """Every projective line once, as a sorted tuple of point tuples."""
        seen = set()
        out = []
        for i, u in enumerate(self.points):
            for v in self.points[i + 1:]:
                ln = self.line_points(u, v)
                key = ln[:2]
                if key not in seen:
                    seen.add(key)
                    out.append(ln)
        out.sort()
        return out

    def hyperplane_points(self, coeffs):
        return [x for x in self.points if self.dot(coeffs, x) == 0]

    def hyperplanes_through_line(self, u, v):
        """Normalized coefficient vectors of hyperplanes containing both."""
        from .linalg import nullspace_basis_ctx

        basis = nullspace_basis_ctx([list(u), list(v)], self.ctx)
        ctx = self.ctx
        out = set()
        for a in range(self.q):
            for b in range(self.q):
                if a == 0 and b == 0:
                    continue
                w = tuple(
                    ctx.add(ctx.mul(a, x), ctx.mul(b, y))
                    for x, y in zip(basis[0], basis[1])
                )
                out.add(self.normalize(w))
        return sorted(out)


@lru_cache(maxsize=None)
def proj_space(q: int, n: int) -> ProjSpace:
    return ProjSpace(q, n)


def conic_dual_lines(q: int):
    """The q+1 lines of PG(2,q) dual to the conic {(t, t^2, 1)} u {(0,1,0)}:
    returned as normalized line-coefficient triples; no point lies on three
    of them."""
    if q < 3:
        raise UnsupportedField("conic dual needs q >= 3")
    pg = proj_space(q, 2)
    ctx = pg.ctx
    out = [pg.normalize((t, ctx.mul(t, t), 1)) for t in range(q)]
    out.append((0, 1, 0))
    return sorted(out)


def max_line_coincidence(q: int, line_coeffs) -> int:
    """Largest number of the given PG(2,q) lines through a single point."""
    pg = proj_space(q, 2)
    best = 0
    for x in pg.points:
        c = sum(1 for ln in line_coeffs if pg.dot(ln, x) == 0)
        best = max(best, c)
    return best
