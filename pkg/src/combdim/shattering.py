"""Shattered centers of integer families and scale-sensitive shattering
dimension of real families.

A center is a coordinate subset with an integer level per coordinate.  An
integer family shatters a center when every above/below sign pattern over
the support is realized with strict inequalities; the maximal dimension
of a shattered center is vc_integer.  For real families, vc_real(A, t) is
the largest support admitting a level function h such that every pattern
is realized with f <= h below and f >= h + t above (non-strict).  The two
notions are implemented exactly as defined and never mixed.

Both searches walk supports in lexicographic order, extending a shattered
center one coordinate at a time; restrictions of shattered centers are
shattered, so every shattered center is reached through its prefix chain.
Witness sets per sign pattern are kept as row bitmasks, which makes the
extension check a handful of integer ANDs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, FamilyError
from .family import CoordinateSubset, FunctionFamily

DEFAULT_BUDGET = 10_000_000


@dataclass(frozen=True)
class Center:
    """Coordinate subset plus one integer level per support coordinate."""

    support: CoordinateSubset
    levels: tuple[int, ...]

    def __post_init__(self):
        if len(self.levels) != len(self.support):
            raise FamilyError("levels length must equal support length")
        object.__setattr__(self, "levels", tuple(int(v) for v in self.levels))

    @property
    def dimension(self) -> int:
        return len(self.support)

    @property
    def is_trivial(self) -> bool:
        return self.dimension == 0

    @classmethod
    def trivial(cls) -> "Center":
        return cls(CoordinateSubset(()), ())


@dataclass(frozen=True)
class ShatterWitness:
    """For each sign pattern over the support, a row index realizing it.

    Patterns are tuples over {-1, +1}, one sign per support coordinate;
    +1 demands a row strictly above the level, -1 strictly below.
    """

    center: Center
    assignments: dict[tuple[int, ...], int]

    def verify(self, family: FunctionFamily) -> bool:
        vals = family.int_values()
        coords = self.center.support.indices
        levels = self.center.levels
        if set(self.assignments) != {
            theta for theta in _sign_patterns(len(coords))
        }:
            return False
        for theta, row in self.assignments.items():
            for i, h, s in zip(coords, levels, theta):
                v = vals[row, i]
                if s == 1 and not v > h:
                    return False
                if s == -1 and not v < h:
                    return False
        return True


def _sign_patterns(d: int):
    for bits in range(1 << d):
        yield tuple(1 if bits >> j & 1 else -1 for j in range(d))


def _check_integer(family: FunctionFamily) -> np.ndarray:
    if not family.is_integer:
        raise FamilyError("operation requires an integer-grid family")
    return family.int_values()


def shatters(family: FunctionFamily, center: Center) -> ShatterWitness | None:
    """Witness that the family shatters the center, or None.

    The trivial center is shattered by every nonempty family.
    """
    vals = _check_integer(family)
    center.support.validate_against(family.domain_size)
    if center.is_trivial:
        return ShatterWitness(center, {(): 0})
    m = family.size
    full = (1 << m) - 1
    assignments: dict[tuple[int, ...], int] = {}
    for theta in _sign_patterns(center.dimension):
        mask = full
        for i, h, s in zip(center.support.indices, center.levels, theta):
            col = vals[:, i]
            sel = col > h if s == 1 else col < h
            bits = 0
            for r in np.flatnonzero(sel):
                bits |= 1 << int(r)
            mask &= bits
            if mask == 0:
                return None
        assignments[theta] = (mask & -mask).bit_length() - 1
    return ShatterWitness(center, assignments)


class _MaskTable:
    """Per-(coordinate, level) bitmasks of rows strictly above / below."""

    def __init__(self, vals: np.ndarray, levels_per_coord: list[list[int]]):
        m, n = vals.shape
        self.above: list[dict[int, int]] = [dict() for _ in range(n)]
        self.below: list[dict[int, int]] = [dict() for _ in range(n)]
        for i in range(n):
            col = vals[:, i]
            for v in levels_per_coord[i]:
                a = b = 0
                for r in range(m):
                    if col[r] > v:
                        a |= 1 << r
                    elif col[r] < v:
                        b |= 1 << r
                self.above[i][v] = a
                self.below[i][v] = b


def _integer_level_candidates(vals: np.ndarray) -> list[list[int]]:
    """Integers strictly between the attained column min and max; levels
    outside that open interval can never be shattered."""
    out = []
    for i in range(vals.shape[1]):
        lo, hi = int(vals[:, i].min()), int(vals[:, i].max())
        out.append(list(range(lo + 1, hi)))
    return out


def _iter_shattered_integer(family: FunctionFamily, max_dim: int, budget: int):
    """Yield (support, levels) for every nontrivial shattered center of
    dimension <= max_dim, in lexicographic order of (support, levels)."""
    vals = _check_integer(family)
    m, n = vals.shape
    cands = _integer_level_candidates(vals)
    table = _MaskTable(vals, cands)
    full = (1 << m) - 1
    checks = 0

    def extend(support: tuple[int, ...], levels: tuple[int, ...], masks: list[int]):
        nonlocal checks
        k = len(support)
        if k >= max_dim or (1 << (k + 1)) > m:
            return
        start = support[-1] + 1 if support else 0
        for i in range(start, n):
            below_i, above_i = table.below[i], table.above[i]
            for v in cands[i]:
                checks += 1
                if checks > budget:
                    raise BudgetError(
                        f"shattered-center enumeration exceeded budget {budget}"
                    )
                bmask, amask = below_i[v], above_i[v]
                new_masks = [w & bmask for w in masks]
                ok = all(new_masks)
                if ok:
                    tops = [w & amask for w in masks]
                    ok = all(tops)
                    if ok:
                        new_masks.extend(tops)
                if ok:
                    yield support + (i,), levels + (v,)
                    yield from extend(support + (i,), levels + (v,), new_masks)

    yield from extend((), (), [full])


def enumerate_shattered_centers(
    family: FunctionFamily,
    max_dim: int,
    budget: int = DEFAULT_BUDGET,
) -> list[Center]:
    """All shattered centers of dimension <= max_dim (trivial one included)."""
    centers = [Center.trivial()]
    for support, levels in _iter_shattered_integer(family, max_dim, budget):
        centers.append(Center(CoordinateSubset(support), levels))
    return centers


def vc_integer(family: FunctionFamily, budget: int = DEFAULT_BUDGET) -> int:
    """Maximal dimension of a center shattered by the integer family."""
    best = 0
    for support, _ in _iter_shattered_integer(family, family.domain_size, budget):
        if len(support) > best:
            best = len(support)
    return best


# ---------------------------------------------------------------------------
# Real families: scale-sensitive shattering with margin t.
# ---------------------------------------------------------------------------

def _real_level_candidates(vals: np.ndarray, t: float) -> list[list[float]]:
    """Attained values only: any feasible level function can be raised
    coordinatewise to the largest attained value below it, so searching
    attained values is complete.  Values v with max(column) < v + t are
    dropped (no row can sit t above them)."""
    out = []
    for i in range(vals.shape[1]):
        col = vals[:, i]
        hi = col.max()
        out.append([float(v) for v in np.unique(col) if hi >= v + t])
    return out


def _iter_shattered_real(family: FunctionFamily, t: float, budget: int):
    vals = family.values
    m, n = vals.shape
    cands = _real_level_candidates(vals, t)
    full = (1 << m) - 1
    checks = 0

    below_tbl: list[dict[float, int]] = [dict() for _ in range(n)]
    above_tbl: list[dict[float, int]] = [dict() for _ in range(n)]
    for i in range(n):
        col = vals[:, i]
        for v in cands[i]:
            b = a = 0
            for r in range(m):
                if col[r] <= v:
                    b |= 1 << r
                if col[r] >= v + t:
                    a |= 1 << r
            below_tbl[i][v] = b
            above_tbl[i][v] = a

    def extend(support: tuple[int, ...], levels: tuple[float, ...], masks: list[int]):
        nonlocal checks
        k = len(support)
        if (1 << (k + 1)) > m:
            return
        start = support[-1] + 1 if support else 0
        for i in range(start, n):
            for v in cands[i]:
                checks += 1
                if checks > budget:
                    raise BudgetError(f"vc search exceeded budget {budget}")
                bmask, amask = below_tbl[i][v], above_tbl[i][v]
                new_masks = [w & bmask for w in masks]
                ok = all(new_masks)
                if ok:
                    tops = [w & amask for w in masks]
                    ok = all(tops)
                    if ok:
                        new_masks.extend(tops)
                if ok:
                    yield support + (i,), levels + (v,)
                    yield from extend(support + (i,), levels + (v,), new_masks)

    yield from extend((), (), [full])


def vc_real_witness(
    family: FunctionFamily, t: float, budget: int = DEFAULT_BUDGET
) -> tuple[int, CoordinateSubset, tuple[float, ...]]:
    """(dimension, support, levels) of a maximum t-shattered set.

    Among maximizers, the lexicographically smallest support is reported
    (the search runs in lexicographic order, so the first maximum found is
    the smallest)."""
    if t <= 0:
        raise ValueError("shattering scale must be positive")
    best = (0, CoordinateSubset(()), ())
    for support, levels in _iter_shattered_real(family, t, budget):
        if len(support) > best[0]:
            best = (len(support), CoordinateSubset(support), levels)
    return best


def vc_real(family: FunctionFamily, t: float, budget: int = DEFAULT_BUDGET) -> int:
    """Maximal cardinality of a set t-shattered by the real family."""
    return vc_real_witness(family, t, budget)[0]


def vc_curve(
    family: FunctionFamily, t_grid, budget: int = DEFAULT_BUDGET
) -> list[tuple[float, int]]:
    """vc_real sampled over a grid of scales (returned sorted ascending)."""
    grid = sorted(float(t) for t in t_grid)
    curve = [(t, vc_real(family, t, budget)) for t in grid]
    dims = [d for _, d in curve]
    assert all(a >= b for a, b in zip(dims, dims[1:])), "vc curve must be non-increasing"
    return curve
