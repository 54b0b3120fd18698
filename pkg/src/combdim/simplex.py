"""Small dense LP solver: two-phase primal simplex with Bland's rule.

Problems are stated as: minimize c @ x subject to a_ub @ x <= b_ub,
a_eq @ x = b_eq, x >= 0.  Bland's anti-cycling rule (always the smallest
eligible index) makes the solver deterministic and finite; sizes here are
desk scale, so a dense tableau is simplest and fast enough.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IterationCapError

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-9
RATIO_TIE = 1e-12


@dataclass(frozen=True)
class LPProblem:
    c: np.ndarray
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=np.float64))
        object.__setattr__(self, "c", c)
        n = c.size
        for name in ("a_ub", "a_eq"):
            mat = getattr(self, name)
            vec = getattr(self, "b" + name[1:])
            if mat is None:
                if vec is not None:
                    raise ValueError(f"{name} is None but its rhs is not")
                continue
            mat = np.atleast_2d(np.asarray(mat, dtype=np.float64))
            vec = np.atleast_1d(np.asarray(vec, dtype=np.float64))
            if mat.shape[1] != n:
                raise ValueError(f"{name} has {mat.shape[1]} columns, expected {n}")
            if mat.shape[0] != vec.size:
                raise ValueError(f"{name} and its rhs disagree on row count")
            object.__setattr__(self, name, mat)
            object.__setattr__(self, "b" + name[1:], vec)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float | None


def _pivot(tableau: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and abs(tableau[r, col]) > 0.0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col
    # Roundoff can push basic values a hair below zero; clamp the drift so
    # it cannot compound across pivots.
    rhs = tableau[:, -1]
    np.copyto(rhs, 0.0, where=(rhs < 0.0) & (rhs > -1e-9))


def _run_simplex(
    tableau: np.ndarray,
    basis: list[int],
    cost: np.ndarray,
    allowed: np.ndarray,
    max_iter: int,
) -> str:
    """Minimize cost over the current tableau in place.  `allowed` masks
    the columns that may enter the basis.  Returns "optimal"/"unbounded".
    """
    m = tableau.shape[0]
    ncols = tableau.shape[1] - 1
    for _ in range(max_iter):
        # Reduced costs from scratch each iteration: O(m * n), numerically
        # self-correcting and cheap at these sizes.
        reduced = cost.copy()
        for r in range(m):
            cb = cost[basis[r]]
            if cb != 0.0:
                reduced -= cb * tableau[r, :ncols]
        basic = set(basis)
        entering = -1
        for j in np.flatnonzero(allowed & (reduced < -FEAS_TOL)):
            if int(j) not in basic:
                entering = int(j)  # Bland: smallest eligible index
                break
        if entering < 0:
            return "optimal"
        leaving, best_ratio = -1, None
        for r in range(m):
            a = tableau[r, entering]
            if a <= PIVOT_TOL:
                continue
            ratio = tableau[r, -1] / a
            if best_ratio is None or ratio < best_ratio - RATIO_TIE:
                leaving, best_ratio = r, ratio
            elif ratio <= best_ratio + RATIO_TIE and basis[r] < basis[leaving]:
                leaving, best_ratio = r, min(ratio, best_ratio)
        if leaving < 0:
            return "unbounded"
        _pivot(tableau, basis, leaving, entering)
    raise IterationCapError(f"simplex exceeded {max_iter} iterations")


def lp_solve(problem: LPProblem, max_iter: int | None = None) -> LPResult:
    """Solve the LP; optimal points satisfy all constraints within 1e-9."""
    n = problem.c.size
    a_ub = problem.a_ub if problem.a_ub is not None else np.zeros((0, n))
    b_ub = problem.b_ub if problem.b_ub is not None else np.zeros(0)
    a_eq = problem.a_eq if problem.a_eq is not None else np.zeros((0, n))
    b_eq = problem.b_eq if problem.b_eq is not None else np.zeros(0)
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    m = m_ub + m_eq

    # Columns: [x (n) | slacks (m_ub) | artificials (m)].
    n_slack = m_ub
    n_art = m
    ncols = n + n_slack + n_art
    tableau = np.zeros((m, ncols + 1))
    tableau[:m_ub, :n] = a_ub
    tableau[:m_ub, n : n + n_slack] = np.eye(m_ub)
    tableau[:m_ub, -1] = b_ub
    tableau[m_ub:, :n] = a_eq
    tableau[m_ub:, -1] = b_eq
    for r in range(m):
        if tableau[r, -1] < 0:
            tableau[r] = -tableau[r]
    art_start = n + n_slack
    basis: list[int] = []
    for r in range(m):
        slack = n + r if r < m_ub else -1
        if slack >= 0 and tableau[r, slack] == 1.0:
            basis.append(slack)
        else:
            tableau[r, art_start + r] = 1.0
            basis.append(art_start + r)

    if max_iter is None:
        max_iter = 200 * (m + ncols + 10)

    has_artificial = any(b >= art_start for b in basis)
    if has_artificial:
        cost1 = np.zeros(ncols)
        cost1[art_start:] = 1.0
        allowed = np.ones(ncols, dtype=bool)
        status = _run_simplex(tableau, basis, cost1, allowed, max_iter)
        assert status == "optimal", "phase-1 objective is bounded below by 0"
        infeas = sum(tableau[r, -1] for r in range(m) if basis[r] >= art_start)
        if infeas > FEAS_TOL:
            return LPResult("infeasible", None, None)
        # Pivot remaining zero-level artificials out, dropping redundant rows.
        keep = []
        for r in range(m):
            if basis[r] < art_start:
                keep.append(r)
                continue
            pivot_col = -1
            for j in range(art_start):
                if abs(tableau[r, j]) > PIVOT_TOL:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                _pivot(tableau, basis, r, pivot_col)
                keep.append(r)
        if len(keep) < m:
            tableau = tableau[keep]
            basis = [basis[r] for r in keep]
            m = len(keep)

    cost2 = np.zeros(ncols)
    cost2[:n] = problem.c
    allowed = np.ones(ncols, dtype=bool)
    allowed[art_start:] = False
    status = _run_simplex(tableau, basis, cost2, allowed, max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, None)

    x = np.zeros(n)
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = tableau[r, -1]
    objective = float(problem.c @ x)
    _verify(problem, x)
    return LPResult("optimal", x, objective)


def _verify(problem: LPProblem, x: np.ndarray) -> None:
    if np.any(x < -FEAS_TOL):
        raise AssertionError("simplex returned a negative component")
    if problem.a_ub is not None:
        slack = problem.a_ub @ x - problem.b_ub
        if np.any(slack > FEAS_TOL * (1.0 + np.abs(problem.b_ub))):
            raise AssertionError("simplex returned an infeasible point (ub)")
    if problem.a_eq is not None:
        gap = np.abs(problem.a_eq @ x - problem.b_eq)
        if np.any(gap > FEAS_TOL * (1.0 + np.abs(problem.b_eq))):
            raise AssertionError("simplex returned an infeasible point (eq)")


def lp_feasible(a_eq: np.ndarray, b_eq: np.ndarray, n_nonneg: int) -> LPResult:
    """Feasibility of {x >= 0 : a_eq x = b_eq} via a zero objective."""
    return lp_solve(LPProblem(np.zeros(n_nonneg), None, None, a_eq, b_eq))
