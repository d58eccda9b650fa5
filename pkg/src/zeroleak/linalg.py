"""Dense rank/nullity, a small two-phase simplex solver, and vertex enumeration.

Problem sizes here are tiny (tens of variables, alphabets up to ~20), so the
solver favors transparency over speed: an explicit tableau, Bland's
anti-cycling rule, and reduced costs recomputed from scratch each pivot.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, NumericalFailure

TAU_LP = 1e-9
TAU_VERTEX = 1e-8
RANK_TOL = 1e-10


def rank_and_nullity(m, tol: float = RANK_TOL) -> tuple[int, int]:
    """Rank and nullity of a dense matrix by Gaussian elimination.

    Pivots smaller than ``tol`` (relative to the largest entry) are treated
    as zero. Returns (rank, ncols - rank).
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("rank_and_nullity needs a nonempty 2-d matrix")
    scale = max(np.abs(a).max(), 1.0)
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        piv = rank + int(np.argmax(np.abs(a[rank:, c])))
        if abs(a[piv, c]) <= tol * scale:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank] = a[rank] / a[rank, c]
        below = np.arange(rows) > rank
        a[below] -= np.outer(a[below, c], a[rank])
        rank += 1
    return rank, cols - rank


@dataclass(frozen=True)
class LinearProgram:
    """min or max objective . x  subject to  eq_lhs @ x = eq_rhs, x >= 0,
    and optionally one extra inequality coef . x <= bound."""

    objective: np.ndarray
    eq_lhs: np.ndarray
    eq_rhs: np.ndarray
    extra_ineq: tuple[np.ndarray, float] | None = None
    sense: str = "min"


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float
    point: np.ndarray | None


def _pivot(t: np.ndarray, b: np.ndarray, basis: list[int], row: int, col: int) -> None:
    piv = t[row, col]
    t[row] /= piv
    b[row] /= piv
    for i in range(t.shape[0]):
        if i != row and t[i, col] != 0.0:
            f = t[i, col]
            t[i] -= f * t[row]
            b[i] -= f * b[row]
    basis[row] = col


def _bland_iterate(t, b, basis, costs, n_allowed, tol) -> str:
    """Run simplex pivots under Bland's rule until optimal or unbounded.

    Only columns with index < n_allowed may enter (used to shut out
    artificials in phase 2).
    """
    m = t.shape[0]
    cap = 10_000 + 100 * (m + t.shape[1])
    for _ in range(cap):
        red = costs - costs[basis] @ t
        enter = -1
        for j in range(n_allowed):
            if red[j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        col = t[:, enter]
        best = np.inf
        leave = -1
        for i in range(m):
            if col[i] > tol:
                r = b[i] / col[i]
                if r < best - 1e-12:
                    best, leave = r, i
                elif r <= best + 1e-12 and leave >= 0 and basis[i] < basis[leave]:
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(t, b, basis, leave, enter)
    raise NumericalFailure(f"simplex exceeded {cap} pivots without certifying a status")


def solve_lp(lp: LinearProgram, tol: float = TAU_LP) -> LpOutcome:
    """Two-phase primal simplex on the standard-form tableau.

    Raises NumericalFailure when the final point does not satisfy the
    constraints within tolerance (a certificate could not be produced).
    """
    c = np.asarray(lp.objective, dtype=float).copy()
    a = np.array(lp.eq_lhs, dtype=float, ndmin=2)
    b = np.asarray(lp.eq_rhs, dtype=float).copy()
    n = c.size
    if a.shape != (b.size, n):
        raise ValueError(f"LP shape mismatch: A {a.shape}, b {b.size}, c {n}")
    if lp.extra_ineq is not None:
        coef, bound = lp.extra_ineq
        a = np.vstack([a, np.asarray(coef, dtype=float)])
        b = np.append(b, float(bound))
        a = np.hstack([a, np.zeros((a.shape[0], 1))])
        a[-1, -1] = 1.0  # slack for the single <= row
        c = np.append(c, 0.0)
        n += 1
    if lp.sense not in ("min", "max"):
        raise ValueError(f"unknown sense {lp.sense!r}")
    sign = 1.0 if lp.sense == "min" else -1.0
    c = sign * c

    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0
    m = a.shape[0]

    # Phase 1: artificial basis, minimize total artificial mass.
    t = np.hstack([a, np.eye(m)])
    rhs = b.copy()
    basis = list(range(n, n + m))
    phase1 = np.concatenate([np.zeros(n), np.ones(m)])
    _bland_iterate(t, rhs, basis, phase1, n + m, tol)
    scale = 1.0 + float(np.abs(b).sum())
    if phase1[basis] @ rhs > tol * scale:
        return LpOutcome("infeasible", float("nan"), None)

    # Drive leftover artificials out of the basis; drop redundant rows.
    keep = []
    for i in range(m):
        if basis[i] < n:
            keep.append(i)
            continue
        row = t[i, :n]
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > tol:
            _pivot(t, rhs, basis, i, j)
            keep.append(i)
    t = t[keep][:, :n]
    rhs = rhs[keep]
    basis = [basis[i] for i in keep]

    status = _bland_iterate(t, rhs, basis, c, n, tol)
    if status == "unbounded":
        return LpOutcome("unbounded", sign * float("-inf"), None)

    x = np.zeros(n)
    x[basis] = rhs
    resid = float(np.abs(a @ x - b).max()) if m else 0.0
    if resid > 100 * tol * scale or x.min() < -100 * tol:
        raise NumericalFailure(
            f"simplex finished with residual {resid:.3g}, min entry {x.min():.3g}"
        )
    x = np.clip(x, 0.0, None)
    if lp.extra_ineq is not None:
        x = x[:-1]
    value = float(np.asarray(lp.objective, dtype=float) @ x)
    return LpOutcome("optimal", value, x)


def _independent_rows(a: np.ndarray, b: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Reduce [A|b] to a maximal set of independent rows of A.

    Raises Infeasible when elimination exposes a row 0 = nonzero.
    """
    aug = np.hstack([a, b[:, None]]).astype(float)
    scale = max(np.abs(aug).max(), 1.0)
    rows, cols = a.shape
    rank = 0
    work = aug.copy()
    for c in range(cols):
        if rank == rows:
            break
        piv = rank + int(np.argmax(np.abs(work[rank:, c])))
        if abs(work[piv, c]) <= tol * scale:
            continue
        work[[rank, piv]] = work[[piv, rank]]
        work[rank] /= work[rank, c]
        others = np.arange(rows) != rank
        work[others] -= np.outer(work[others, c], work[rank])
        rank += 1
    for i in range(rank, rows):
        if abs(work[i, -1]) > 1e-7 * scale:
            raise Infeasible("equality system is inconsistent")
    return work[:rank, :cols], work[:rank, -1]


def enumerate_vertices(
    eq_lhs,
    eq_rhs,
    tol: float = TAU_LP,
    dedup_tol: float = TAU_VERTEX,
) -> np.ndarray:
    """All basic feasible solutions of {x >= 0 : eq_lhs @ x = eq_rhs}.

    Iterates over column subsets of size rank(eq_lhs), solving each square
    subsystem and keeping nonnegative consistent solutions. Degenerate
    subsets are skipped; duplicates within ``dedup_tol`` (infinity norm) are
    merged. Rows are returned in canonical (lexicographic) order. Raises
    Infeasible when no basic feasible solution exists.
    """
    a = np.array(eq_lhs, dtype=float, ndmin=2)
    b = np.asarray(eq_rhs, dtype=float)
    if a.shape[0] != b.size:
        raise ValueError(f"shape mismatch: A {a.shape}, b {b.size}")
    red_a, red_b = _independent_rows(a, b, RANK_TOL)
    r = red_a.shape[0]
    ncols = a.shape[1]
    found: list[np.ndarray] = []
    for cols in itertools.combinations(range(ncols), r):
        sub = red_a[:, cols]
        if r:
            if abs(np.linalg.det(sub)) <= RANK_TOL:
                continue
            try:
                sol = np.linalg.solve(sub, red_b)
            except np.linalg.LinAlgError:
                continue
        else:
            sol = np.zeros(0)
        x = np.zeros(ncols)
        x[list(cols)] = sol
        if x.min() < -tol:
            continue
        x = np.clip(x, 0.0, None)
        if np.abs(a @ x - b).max() > max(tol, 1e-9):
            continue
        if any(np.abs(x - v).max() <= dedup_tol for v in found):
            continue
        found.append(x)
    if not found:
        raise Infeasible("polytope has no basic feasible solution")
    found.sort(key=lambda v: tuple(v))
    return np.array(found)
