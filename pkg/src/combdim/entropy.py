"""Lp(mu) distances, separation tests, exact and greedy packing/covering.

Conventions: a pair is t-separated when its distance is strictly greater
than t; a ball of radius t uses non-strict membership (distance <= t).
Covering is internal: centers are drawn from the family itself.  With
these conventions the sandwich covering(t) <= packing(t) <= covering(t/2)
holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError
from .family import FunctionFamily, ProbabilityMeasure

PACKING_EXACT_LIMIT = 30
COVERING_EXACT_LIMIT = 25


def lp_distance(f, g, measure: ProbabilityMeasure, p: float = 2.0) -> float:
    """(sum_i w_i |f(i) - g(i)|^p)^(1/p); p = math.inf takes the max over
    coordinates of positive weight."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if f.shape != g.shape or f.ndim != 1:
        raise ValueError(f"row length mismatch: {f.shape} vs {g.shape}")
    if f.shape[0] != measure.size:
        raise ValueError(f"rows have {f.shape[0]} entries, measure has {measure.size}")
    diff = np.abs(f - g)
    if p == math.inf:
        support = measure.weights > 0
        return float(diff[support].max()) if support.any() else 0.0
    if p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p!r}")
    return float(np.dot(measure.weights, diff**p) ** (1.0 / p))


def pairwise_distances(family: FunctionFamily, measure: ProbabilityMeasure, p: float = 2.0) -> np.ndarray:
    """Symmetric m x m matrix of Lp(mu) distances between rows."""
    vals = family.values
    m = family.size
    if p == 2.0:
        # Weighted Gram trick keeps this O(m^2 n) in vectorized numpy.
        w = measure.weights
        gram = (vals * w) @ vals.T
        sq = np.diag(gram)[:, None] + np.diag(gram)[None, :] - 2.0 * gram
        np.fill_diagonal(sq, 0.0)
        return np.sqrt(np.maximum(sq, 0.0))
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            out[i, j] = out[j, i] = lp_distance(vals[i], vals[j], measure, p)
    return out


def first_violating_pair(
    family: FunctionFamily, measure: ProbabilityMeasure, t: float, p: float = 2.0
):
    """First pair (i, j, distance) with distance <= t, or None."""
    dist = pairwise_distances(family, measure, p)
    m = family.size
    for i in range(m):
        for j in range(i + 1, m):
            if dist[i, j] <= t:
                return i, j, float(dist[i, j])
    return None


def is_separated(family: FunctionFamily, measure: ProbabilityMeasure, t: float, p: float = 2.0) -> bool:
    """True iff every pair of distinct rows is at distance strictly > t."""
    if t <= 0:
        raise ValueError(f"separation scale must be positive, got {t!r}")
    return first_violating_pair(family, measure, t, p) is None


# ---------------------------------------------------------------------------
# Packing: maximum subset with all pairwise distances > t.  Exact mode is a
# maximum-clique branch and bound on the "distance > t" graph.
# ---------------------------------------------------------------------------

def _max_clique_size(adj: list[int], n: int) -> int:
    order = sorted(range(n), key=lambda v: (-bin(adj[v]).count("1"), v))
    pos = {v: k for k, v in enumerate(order)}
    radj = [0] * n
    for v in range(n):
        mask = adj[v]
        new = 0
        while mask:
            low = mask & -mask
            new |= 1 << pos[low.bit_length() - 1]
            mask ^= low
        radj[pos[v]] = new
    best = 1 if n else 0

    def expand(cand: int, size: int):
        nonlocal best
        while cand:
            if size + cand.bit_count() <= best:
                return
            v = (cand & -cand).bit_length() - 1
            cand &= cand - 1
            nxt = radj[v] & cand
            if size + 1 + nxt.bit_count() > best:
                expand(nxt, size + 1)
            if size + 1 > best:
                best = size + 1

    expand((1 << n) - 1, 0)
    return best


def _greedy_packing(dist: np.ndarray, t: float) -> int:
    chosen: list[int] = []
    for i in range(dist.shape[0]):
        if all(dist[i, j] > t for j in chosen):
            chosen.append(i)
    return len(chosen)


def packing_number(
    family: FunctionFamily,
    measure: ProbabilityMeasure,
    t: float,
    p: float = 2.0,
    mode: str = "exact",
    size_limit: int = PACKING_EXACT_LIMIT,
    force: bool = False,
) -> tuple[int, str]:
    """Maximal size of a t-separated subset.

    Returns (count, flag) with flag "exact" or "lower-bound" (greedy mode
    reports a maximal-by-inclusion subset, which is a lower bound).
    """
    if t <= 0:
        raise ValueError(f"packing scale must be positive, got {t!r}")
    dist = pairwise_distances(family, measure, p)
    m = family.size
    if mode == "greedy":
        return _greedy_packing(dist, t), "lower-bound"
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if m > size_limit and not force:
        raise BudgetError(
            f"exact packing refused for m={m} > limit {size_limit} (pass force=True)"
        )
    adj = [0] * m
    for i in range(m):
        for j in range(m):
            if i != j and dist[i, j] > t:
                adj[i] |= 1 << j
    return _max_clique_size(adj, m), "exact"


# ---------------------------------------------------------------------------
# Covering: minimum number of balls of radius t centered at family rows.
# Exact mode is a set-cover branch and bound.
# ---------------------------------------------------------------------------

def _greedy_cover(ball: list[int], universe: int) -> list[int]:
    covered = 0
    chosen = []
    while covered != universe:
        gain, pick = -1, -1
        for i, b in enumerate(ball):
            g = (b & ~covered).bit_count()
            if g > gain:
                gain, pick = g, i
        covered |= ball[pick]
        chosen.append(pick)
    return chosen


def _exact_cover_size(ball: list[int], m: int) -> int:
    universe = (1 << m) - 1
    best = len(_greedy_cover(ball, universe))
    max_ball = max(b.bit_count() for b in ball)

    def bnb(covered: int, used: int):
        nonlocal best
        if covered == universe:
            best = min(best, used)
            return
        remaining = (universe & ~covered).bit_count()
        if used + math.ceil(remaining / max_ball) >= best:
            return
        # Branch on the uncovered element with the fewest covering balls.
        elt, options = -1, None
        todo = universe & ~covered
        while todo:
            e = (todo & -todo).bit_length() - 1
            todo &= todo - 1
            opts = [i for i in range(m) if ball[i] >> e & 1]
            if options is None or len(opts) < len(options):
                elt, options = e, opts
        for i in options:
            bnb(covered | ball[i], used + 1)

    bnb(0, 0)
    return best


def covering_number(
    family: FunctionFamily,
    measure: ProbabilityMeasure,
    t: float,
    p: float = 2.0,
    mode: str = "exact",
    size_limit: int = COVERING_EXACT_LIMIT,
    force: bool = False,
) -> tuple[int, str]:
    """Minimal number of radius-t balls centered at rows covering the family.

    Returns (count, flag) with flag "exact" or "upper-bound" (greedy).
    """
    if t <= 0:
        raise ValueError(f"covering scale must be positive, got {t!r}")
    dist = pairwise_distances(family, measure, p)
    m = family.size
    ball = [0] * m
    for i in range(m):
        for j in range(m):
            if dist[i, j] <= t:
                ball[i] |= 1 << j
    if mode == "greedy":
        return len(_greedy_cover(ball, (1 << m) - 1)), "upper-bound"
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if m > size_limit and not force:
        raise BudgetError(
            f"exact covering refused for m={m} > limit {size_limit} (pass force=True)"
        )
    return _exact_cover_size(ball, m), "exact"


@dataclass(frozen=True)
class EntropyReport:
    """Packing and covering numbers at one scale, with exactness flags."""

    scale: float
    packing_count: int
    packing_flag: str
    covering_count: int
    covering_flag: str


def entropy_report(
    family: FunctionFamily,
    measure: ProbabilityMeasure,
    t: float,
    p: float = 2.0,
    mode: str = "exact",
    force: bool = False,
) -> EntropyReport:
    pack, pack_flag = packing_number(family, measure, t, p, mode, force=force)
    cover, cover_flag = covering_number(family, measure, t, p, mode, force=force)
    return EntropyReport(t, pack, pack_flag, cover, cover_flag)
