"""Separating trees for separated function families.

The pipeline: a family that is t-separated in L2(mu) has a coordinate on
which the empirical value distribution (uniform over the rows) has
standard deviation >= t/2; a small-deviation split of that distribution
yields two sub-families separated by a gap t/6 on that coordinate, with
certified mass lower bounds (1 - beta) and beta/2.  Recursing produces a
binary tree whose leaf count is at least sqrt(m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import first_violating_pair
from .errors import NotSeparatedError
from .family import FunctionFamily, ProbabilityMeasure

_CERT_SLACK = 1e-12  # comparison slack for certificate inequalities


@dataclass(frozen=True)
class Distribution:
    """Finite distribution given as (value, probability) atoms."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(v), float(p)) for v, p in self.atoms)
        if not atoms:
            raise ValueError("distribution needs at least one atom")
        if any(p < 0 for _, p in atoms):
            raise ValueError("negative atom probability")
        total = sum(p for _, p in atoms)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"atom probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_sample(cls, values) -> "Distribution":
        """Empirical distribution of a sample, each point weighted 1/len."""
        values = np.asarray(values, dtype=np.float64)
        uniq, counts = np.unique(values, return_counts=True)
        return cls(tuple(zip(uniq.tolist(), (counts / values.size).tolist())))

    def tail_above(self, x: float) -> float:
        return sum(p for v, p in self.atoms if v > x)

    def tail_below(self, x: float) -> float:
        return sum(p for v, p in self.atoms if v < x)


def variance(dist: Distribution) -> tuple[float, float]:
    """(variance, pair expectation E|X - X'|^2) of the distribution.

    The two are computed independently (moment form vs. double sum over
    atom pairs) so that the identity pair = 2 * variance is a genuine
    cross-check rather than an algebraic tautology.
    """
    mean = sum(p * v for v, p in dist.atoms)
    var = sum(p * (v - mean) ** 2 for v, p in dist.atoms)
    pair = sum(
        pi * pj * (vi - vj) ** 2 for vi, pi in dist.atoms for vj, pj in dist.atoms
    )
    return var, pair


@dataclass(frozen=True)
class SplitCertificate:
    """Witness that a distribution splits into a heavy and a light tail.

    With g = gap_halfwidth, p_upper = P{X > a + g} and
    p_lower = P{X < a - g}; side "upper-heavy" certifies
    p_upper >= 1 - beta and p_lower >= beta/2, "lower-heavy" the mirror.
    """

    threshold: float
    beta: float
    gap_halfwidth: float
    side: str
    p_upper: float
    p_lower: float

    def heavy_light(self) -> tuple[float, float]:
        if self.side == "upper-heavy":
            return self.p_upper, self.p_lower
        return self.p_lower, self.p_upper

    def is_valid_for(self, dist: Distribution) -> bool:
        """Re-derive both tail masses from the distribution and re-check."""
        if not (0.0 < self.beta <= 0.5) or self.gap_halfwidth <= 0:
            return False
        p_up = dist.tail_above(self.threshold + self.gap_halfwidth)
        p_lo = dist.tail_below(self.threshold - self.gap_halfwidth)
        if abs(p_up - self.p_upper) > 1e-12 or abs(p_lo - self.p_lower) > 1e-12:
            return False
        heavy, light = (p_up, p_lo) if self.side == "upper-heavy" else (p_lo, p_up)
        return heavy >= 1.0 - self.beta - _CERT_SLACK and light >= self.beta / 2.0 - _CERT_SLACK


def _beta_grid(dist: Distribution) -> list[float]:
    """Candidate beta values: clipped partial sums of atom probabilities."""
    probs = [p for _, p in sorted(dist.atoms)]
    grid = {0.5}
    acc = 0.0
    for p in probs:
        acc += p
        for s in (acc, 1.0 - acc):
            if s > _CERT_SLACK:
                grid.add(min(s, 0.5))
    return sorted(grid)


def small_dev_split(dist: Distribution, gap_halfwidth: float | None = None) -> SplitCertificate:
    """Find a split certificate with gap sigma(X)/6 (or a given gap).

    For every nonzero-variance distribution such a certificate exists, so
    failure of the direct search is a software defect.  Candidate
    thresholds cover every regime of the two tail functions; beta runs
    over partial sums of atom probabilities.  Among valid certificates the
    one maximizing min(p_heavy - (1 - beta), p_light - beta/2) wins, ties
    broken toward larger beta, then toward the upper-heavy side.
    """
    var, _ = variance(dist)
    if var <= 0.0:
        raise ValueError("small-deviation split needs nonzero variance")
    gap = float(gap_halfwidth) if gap_halfwidth is not None else math.sqrt(var) / 6.0
    if gap <= 0:
        raise ValueError("gap halfwidth must be positive")
    values = sorted({v for v, _ in dist.atoms})
    candidates = set(values)
    candidates.update((a + b) / 2.0 for a, b in zip(values, values[1:]))
    breaks = sorted({v - gap for v in values} | {v + gap for v in values})
    candidates.update(breaks)
    candidates.update((a + b) / 2.0 for a, b in zip(breaks, breaks[1:]))

    betas = _beta_grid(dist)
    best = None
    best_key = None
    for a in sorted(candidates):
        p_up = dist.tail_above(a + gap)
        p_lo = dist.tail_below(a - gap)
        for side, heavy, light in (
            ("upper-heavy", p_up, p_lo),
            ("lower-heavy", p_lo, p_up),
        ):
            for beta in betas:
                score = min(heavy - (1.0 - beta), light - beta / 2.0)
                if score < -_CERT_SLACK:
                    continue
                key = (score, beta, 1 if side == "upper-heavy" else 0, -a)
                if best_key is None or key > best_key:
                    best_key = key
                    best = SplitCertificate(a, beta, gap, side, p_up, p_lo)
    assert best is not None, "no split certificate found for a nonzero-variance distribution"
    return best


def _reinterpret_gap(cert: SplitCertificate, dist: Distribution, gap: float) -> SplitCertificate:
    """Shrink the certificate gap (tails only grow, so validity persists)."""
    out = SplitCertificate(
        cert.threshold,
        cert.beta,
        gap,
        cert.side,
        dist.tail_above(cert.threshold + gap),
        dist.tail_below(cert.threshold - gap),
    )
    assert out.is_valid_for(dist), "certificate lost validity when shrinking the gap"
    return out


def coordinate_distributions(family: FunctionFamily) -> list[Distribution]:
    """Per-coordinate empirical distribution over the rows (weight 1/m)."""
    return [Distribution.from_sample(family.values[:, i]) for i in range(family.domain_size)]


def find_separating_coordinate(
    family: FunctionFamily,
    measure: ProbabilityMeasure,
    t: float,
) -> tuple[int, SplitCertificate]:
    """Coordinate whose row-value distribution splits with gap t/12.

    Requires the family to be t-separated in L2(measure) with m >= 2; the
    argument via the pair-difference variance identity guarantees a
    coordinate with sigma(values) >= t/2, whose sigma/6 split certificate
    remains valid at gap t/12.  Coordinates are scanned in order of
    decreasing variance (ties toward smaller index).
    """
    if family.size < 2:
        raise NotSeparatedError("need at least two rows to separate", pair=None)
    bad = first_violating_pair(family, measure, t)
    if bad is not None:
        i, j, d = bad
        raise NotSeparatedError(
            f"family is not {t}-separated: rows {i} and {j} at distance {d}",
            pair=(i, j),
            distance=d,
        )
    dists = coordinate_distributions(family)
    variances = [variance(d)[0] for d in dists]
    order = sorted(range(family.domain_size), key=lambda i: (-variances[i], i))
    for i in order:
        # Exact comparison: sigma/6 >= t/12 makes the gap reinterpretation
        # below a shrink, under which tail masses can only grow.
        if math.sqrt(variances[i]) / 6.0 >= t / 12.0:
            cert = small_dev_split(dists[i])
            return i, _reinterpret_gap(cert, dists[i], t / 12.0)
    raise AssertionError(
        f"no coordinate with sigma >= {t / 2} found on a {t}-separated family"
    )


@dataclass(frozen=True, eq=False)
class TreeNode:
    """Node of a separating tree: a subset of row indices, and for
    non-leaves the split coordinate, threshold and gap between sons."""

    indices: tuple[int, ...]
    coordinate: int | None = None
    threshold: float | None = None
    gap: float | None = None
    plus_son: "TreeNode | None" = None
    minus_son: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.plus_son is None and self.minus_son is None

    def to_dict(self) -> dict:
        doc = {"indices": list(self.indices)}
        if not self.is_leaf:
            doc["coordinate"] = self.coordinate
            doc["threshold"] = self.threshold
            doc["gap"] = self.gap
            doc["plus"] = self.plus_son.to_dict()
            doc["minus"] = self.minus_son.to_dict()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "TreeNode":
        if "plus" in doc:
            return cls(
                tuple(int(i) for i in doc["indices"]),
                int(doc["coordinate"]),
                float(doc["threshold"]),
                float(doc["gap"]),
                cls.from_dict(doc["plus"]),
                cls.from_dict(doc["minus"]),
            )
        return cls(tuple(int(i) for i in doc["indices"]))


@dataclass(frozen=True, eq=False)
class SeparatingTree:
    """Binary tree of sub-families; the two sons of every non-leaf are
    separated by a fixed gap on a single coordinate."""

    root: TreeNode
    scale: float
    gap: float

    def leaf_count(self) -> int:
        def count(node: TreeNode) -> int:
            if node.is_leaf:
                return 1
            return count(node.plus_son) + count(node.minus_son)

        return count(self.root)

    def leaves(self) -> list[tuple[int, ...]]:
        out: list[tuple[int, ...]] = []

        def walk(node: TreeNode):
            if node.is_leaf:
                out.append(node.indices)
            else:
                walk(node.plus_son)
                walk(node.minus_son)

        walk(self.root)
        return out

    def to_dict(self) -> dict:
        return {"scale": self.scale, "gap": self.gap, "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, doc: dict) -> "SeparatingTree":
        return cls(TreeNode.from_dict(doc["root"]), float(doc["scale"]), float(doc["gap"]))


def build_separating_tree(
    family: FunctionFamily,
    measure: ProbabilityMeasure,
    t: float,
) -> SeparatingTree:
    """Recursive (t/6)-separating tree with at least sqrt(m) leaves.

    Each non-leaf splits on a certified coordinate: the plus son keeps the
    rows with value > a + t/12, the minus son those with value < a - t/12;
    rows in the middle band are dropped.  The certificate guarantees both
    sons are nonempty and together hold at least (1 - beta/2) of the rows,
    which drives the leaf-count bound leaf_count^2 >= m.
    """
    if t <= 0:
        raise ValueError("tree scale must be positive")

    values = family.values

    def build(indices: tuple[int, ...]) -> TreeNode:
        if len(indices) == 1:
            return TreeNode(indices)
        sub = family.subfamily(indices)
        coord, cert = find_separating_coordinate(sub, measure, t)
        col = values[list(indices), coord]
        hi = cert.threshold + cert.gap_halfwidth
        lo = cert.threshold - cert.gap_halfwidth
        plus = tuple(r for r, v in zip(indices, col) if v > hi)
        minus = tuple(r for r, v in zip(indices, col) if v < lo)
        assert plus and minus, "split certificate produced an empty son"
        return TreeNode(indices, coord, cert.threshold, t / 6.0, build(plus), build(minus))

    root = build(tuple(range(family.size)))
    return SeparatingTree(root, t, t / 6.0)


@dataclass(frozen=True)
class TreeValidation:
    ok: bool
    failure: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def validate_tree(tree: SeparatingTree, family: FunctionFamily, gap: float) -> TreeValidation:
    """Exhaustively re-check the separating-tree conditions at a given gap.

    Independent of the construction path: reads the raw values and checks,
    for every non-leaf, that the sons are disjoint nonempty subsets of the
    parent and that every plus-row beats every minus-row by more than
    `gap` on the stored coordinate.
    """
    values = family.values
    m, n = values.shape

    def check(node: TreeNode) -> TreeValidation:
        if not node.indices:
            return TreeValidation(False, "empty node")
        if any(r < 0 or r >= m for r in node.indices):
            return TreeValidation(False, f"row index out of range in node {node.indices}")
        if node.is_leaf:
            return TreeValidation(True)
        if node.plus_son is None or node.minus_son is None:
            return TreeValidation(False, f"non-leaf {node.indices} lacks two sons")
        if node.coordinate is None or not (0 <= node.coordinate < n):
            return TreeValidation(False, f"bad split coordinate at node {node.indices}")
        pset, mset = set(node.plus_son.indices), set(node.minus_son.indices)
        if pset & mset:
            return TreeValidation(False, f"sons overlap at node {node.indices}: {sorted(pset & mset)}")
        if not (pset <= set(node.indices) and mset <= set(node.indices)):
            return TreeValidation(False, f"sons escape their parent at node {node.indices}")
        if not pset or not mset:
            return TreeValidation(False, f"empty son at node {node.indices}")
        i = node.coordinate
        for f in node.plus_son.indices:
            for g in node.minus_son.indices:
                if not values[f, i] > values[g, i] + gap:
                    return TreeValidation(
                        False,
                        f"gap violated at node {node.indices}: rows {f},{g} on "
                        f"coordinate {i} differ by {values[f, i] - values[g, i]!r} <= {gap!r}",
                    )
        for son in (node.plus_son, node.minus_son):
            res = check(son)
            if not res:
                return res
        return TreeValidation(True)

    return check(tree.root)
