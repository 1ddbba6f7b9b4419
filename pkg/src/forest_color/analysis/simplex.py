"""Dense two-phase simplex over a numpy tableau.

Small, deterministic and self-contained: it solves

    maximize    c @ x
    subject to  A_ub @ x <= b_ub,  A_eq @ x == b_eq,  x >= 0

Pivoting uses Dantzig's rule and falls back to Bland's rule after a run of
degenerate pivots, which rules out cycling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import structlog

logger = structlog.get_logger(__name__)

PIVOT_TOLERANCE = 1e-9
DEGENERATE_STREAK = 50


class LpInfeasibleError(RuntimeError):
    """The constraint system has no non-negative solution."""


class LpUnboundedError(RuntimeError):
    """The objective grows without bound over the feasible region."""


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    duals_ub: np.ndarray
    duals_eq: np.ndarray
    max_reduced_cost: float
    duality_gap: float
    iterations: int
    exact_verified: bool | None = None


@dataclass
class _StandardForm:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    n_original: int
    row_sign: np.ndarray
    n_ub: int
    basis: list[int]
    artificial: list[int]


def _standardize(
    c: np.ndarray, A_ub: np.ndarray, b_ub: np.ndarray, A_eq: np.ndarray, b_eq: np.ndarray
) -> _StandardForm:
    n = c.size
    m_ub, m_eq = b_ub.size, b_eq.size
    m = m_ub + m_eq
    rows = np.vstack([A_ub.reshape(m_ub, n), A_eq.reshape(m_eq, n)])
    rhs = np.concatenate([b_ub, b_eq]).astype(float)
    sign = np.where(rhs < 0, -1.0, 1.0)
    slack = np.zeros((m, m_ub))
    slack[:m_ub, :m_ub] = np.eye(m_ub)
    body = np.hstack([rows, slack]) * sign[:, None]
    rhs = rhs * sign

    basis: list[int] = []
    need_artificial: list[int] = []
    for i in range(m):
        if i < m_ub and sign[i] > 0:
            basis.append(n + i)
        else:
            basis.append(-1)
            need_artificial.append(i)
    art = np.zeros((m, len(need_artificial)))
    artificial: list[int] = []
    for k, i in enumerate(need_artificial):
        art[i, k] = 1.0
        basis[i] = n + m_ub + k
        artificial.append(n + m_ub + k)
    A = np.hstack([body, art])
    c_full = np.concatenate([c, np.zeros(m_ub + len(need_artificial))])
    return _StandardForm(A, rhs, c_full, n, sign, m_ub, basis, artificial)


def _pivot(T: np.ndarray, r: int, col: int) -> None:
    T[r] /= T[r, col]
    for i in range(T.shape[0]):
        if i != r and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[r]


def _iterate(T: np.ndarray, basis: list[int], allowed: np.ndarray, max_iter: int) -> int:
    """Run simplex pivots on tableau ``T`` (objective row last). Returns pivot count."""
    bland = False
    streak = 0
    for it in range(max_iter):
        reduced = T[-1, :-1]
        candidates = np.where(allowed & (reduced < -PIVOT_TOLERANCE))[0]
        if candidates.size == 0:
            return it
        col = int(candidates[0]) if bland else int(candidates[np.argmin(reduced[candidates])])
        column = T[:-1, col]
        rows = np.where(column > PIVOT_TOLERANCE)[0]
        if rows.size == 0:
            raise LpUnboundedError(f"column {col} can grow without bound")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[np.abs(ratios - best) <= PIVOT_TOLERANCE]
        r = int(min(ties, key=lambda i: basis[i]))
        if best <= PIVOT_TOLERANCE:
            streak += 1
            if streak > DEGENERATE_STREAK and not bland:
                bland = True
                logger.debug("Switching to Bland's rule", iteration=it)
        else:
            streak = 0
        _pivot(T, r, col)
        basis[r] = col
    raise RuntimeError(f"simplex did not converge within {max_iter} pivots")


def maximize(
    c: np.ndarray,
    A_ub: np.ndarray,
    b_ub: np.ndarray,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    *,
    max_iter: int = 10_000,
    exact: bool = True,
) -> SimplexResult:
    """Solve the LP; raise ``LpInfeasibleError`` or ``LpUnboundedError`` otherwise."""
    sf = _standardize(c, A_ub, b_ub, A_eq, b_eq)
    m, width = sf.A.shape
    T = np.zeros((m + 1, width + 1))
    T[:m, :width] = sf.A
    T[:m, -1] = sf.b
    basis = list(sf.basis)
    iterations = 0

    if sf.artificial:
        T[-1, sf.artificial] = 1.0
        for i, j in enumerate(basis):
            if j in sf.artificial:
                T[-1] -= T[i]
        allowed = np.ones(width, dtype=bool)
        iterations += _iterate(T, basis, allowed, max_iter)
        if T[-1, -1] < -1e-7:
            raise LpInfeasibleError(f"phase one ended with infeasibility {-T[-1, -1]:.3g}")
        art = set(sf.artificial)
        keep_rows = []
        for i in range(m):
            if basis[i] in art:
                cols = [j for j in range(width) if j not in art and abs(T[i, j]) > PIVOT_TOLERANCE]
                if cols:
                    _pivot(T, i, cols[0])
                    basis[i] = cols[0]
                    keep_rows.append(i)
            else:
                keep_rows.append(i)
        live = [j for j in range(width) if j not in art]
        T = np.vstack([T[keep_rows][:, live + [width]], np.zeros((1, len(live) + 1))])
        remap = {j: k for k, j in enumerate(live)}
        basis = [remap[basis[i]] for i in keep_rows]
        A = sf.A[keep_rows][:, live]
        b = sf.b[keep_rows]
        c_std = sf.c[live]
    else:
        keep_rows = list(range(m))
        A, b, c_std = sf.A, sf.b, sf.c

    T[-1, :-1] = -c_std
    T[-1, -1] = 0.0
    for i, j in enumerate(basis):
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[i]
    iterations += _iterate(T, basis, np.ones(T.shape[1] - 1, dtype=bool), max_iter)

    x_std = np.zeros(T.shape[1] - 1)
    for i, j in enumerate(basis):
        x_std[j] = T[i, -1]
    x = x_std[: sf.n_original]

    B = A[:, basis]
    y = np.linalg.solve(B.T, c_std[basis])
    reduced = c_std - A.T @ y
    duals = np.zeros(m)
    duals[keep_rows] = y
    duals *= sf.row_sign
    result = SimplexResult(
        x=x,
        objective=float(c @ x),
        duals_ub=duals[: sf.n_ub],
        duals_eq=duals[sf.n_ub :],
        max_reduced_cost=float(reduced.max(initial=0.0)),
        duality_gap=float(abs(b @ y - c_std @ x_std)),
        iterations=iterations,
    )
    if exact:
        result.exact_verified = verify_basis_exactly(A, b, c_std, basis)
    logger.debug("Simplex finished", iterations=iterations, objective=result.objective)
    return result


# ---------------------------------------------------------------------------
# Exact rational check
# ---------------------------------------------------------------------------


def _rational(v: float) -> Fraction:
    """Recover small rationals (like 5/7) exactly; other floats keep their binary value."""
    approx = Fraction(v).limit_denominator(10_000)
    return approx if abs(float(approx) - v) < 1e-12 else Fraction(v)


def _solve_exact(M: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    n = len(M)
    aug = [row[:] + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


def verify_basis_exactly(A: np.ndarray, b: np.ndarray, c: np.ndarray, basis: list[int]) -> bool:
    """Recheck primal and dual feasibility of ``basis`` in rational arithmetic."""
    m = len(basis)
    Aq = [[_rational(float(v)) for v in row] for row in A]
    bq = [_rational(float(v)) for v in b]
    cq = [Fraction(float(v)) for v in c]
    B = [[Aq[i][j] for j in basis] for i in range(m)]
    x_b = _solve_exact(B, bq)
    if x_b is None or any(v < 0 for v in x_b):
        return False
    Bt = [[B[i][k] for i in range(m)] for k in range(m)]
    y = _solve_exact(Bt, [cq[j] for j in basis])
    if y is None:
        return False
    for j in range(len(cq)):
        if j in basis:
            continue
        if cq[j] - sum(Aq[i][j] * y[i] for i in range(m)) > 0:
            return False
    return True
