"""Dense linear programming.

A two-phase tableau simplex with Bland's anti-cycling rule handles the small
programs that dominate the package (dual norms of sections, gauges, small
minimal-projection problems).  Programs whose tableau would exceed
``SIMPLEX_MAX_ENTRIES`` are routed to HiGHS through :func:`scipy.optimize.linprog`.

Every result carries a primal feasibility residual and, for the simplex path,
a duality gap computed from the final basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog as _scipy_linprog

SIMPLEX_MAX_ENTRIES = 60_000


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    fun: float
    method: str
    residual: float
    dual_gap: float
    iterations: int = 0


def _bland_simplex(T: np.ndarray, basis: list[int], n_cols: int, tol: float, max_iter: int,
                   pivot_tol: float = 1e-9) -> int:
    """Run simplex pivots in place on tableau ``T`` (last row = reduced costs).

    Entering column: smallest index with negative reduced cost.  Leaving row:
    among ratio-test ties the largest pivot element, then the smallest basic
    index; degenerate programs otherwise drift onto round-off-sized pivots.
    Only the first ``n_cols`` columns may enter.  Returns the pivot count.
    """
    m = T.shape[0] - 1
    it = 0
    while True:
        costs = T[-1, :n_cols]
        candidates = np.flatnonzero(costs < -tol)
        if candidates.size == 0:
            return it
        j = int(candidates[0])
        col = T[:m, j]
        pos = col > pivot_tol
        if not pos.any():
            raise UnboundedError("objective unbounded below")
        ratios = np.full(m, np.inf)
        rhs = np.maximum(T[:m, -1], 0.0)
        ratios[pos] = rhs[pos] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        r = max(ties, key=lambda i: (col[i], -basis[i]))
        T[r] /= T[r, j]
        others = T[:, j] != 0
        others[r] = False
        T[others] -= np.outer(T[others, j], T[r])
        T[:m, -1][np.abs(T[:m, -1]) < 1e-14] = 0.0
        basis[r] = j
        it += 1
        if it > max_iter:
            raise LPError(f"simplex exceeded {max_iter} pivots")


def simplex_standard(c, A, b, tol: float = 1e-11, max_iter: int = 50_000):
    """Solve ``min c.x  s.t.  A x = b, x >= 0`` by two-phase simplex.

    Returns ``(x, y, iterations)`` with ``y`` the equality multipliers of the
    rows that survived redundancy removal (zero for dropped rows).
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    iters = _bland_simplex(T, basis, n + m, tol, max_iter)
    scale = max(1.0, np.abs(b).max(initial=0.0))
    if -T[-1, -1] > 1e-8 * scale:
        raise InfeasibleError(f"phase-1 optimum {-T[-1, -1]:.3e} > 0")

    # drive artificials out of the basis, dropping redundant rows
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] >= n:
            row = T[r, :n]
            nz = np.flatnonzero(np.abs(row) > 1e-9)
            if nz.size == 0:
                keep[r] = False
                continue
            j = int(nz[0])
            T[r] /= T[r, j]
            others = np.arange(m + 1) != r
            T[others] -= np.outer(T[others, j], T[r])
            basis[r] = j
    rows = np.flatnonzero(keep)
    T2 = np.zeros((rows.size + 1, n + 1))
    T2[:-1, :n] = T[rows, :n]
    T2[:-1, -1] = T[rows, -1]
    basis2 = [basis[r] for r in rows]
    T2[-1, :n] = c
    for i, j in enumerate(basis2):
        if T2[-1, j] != 0:
            T2[-1] -= T2[-1, j] * T2[i]
    iters += _bland_simplex(T2, basis2, n, tol, max_iter)

    x = np.zeros(n)
    x[basis2] = T2[:-1, -1]
    y = np.zeros(m)
    Bmat = A[np.ix_(rows, basis2)]
    y_rows = np.linalg.lstsq(Bmat.T, c[basis2], rcond=None)[0]
    y[rows] = y_rows
    y[flip] *= -1
    return x, y, iters


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, free=None,
             method: str = "auto") -> LPResult:
    """Minimize ``c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    Variables flagged in the boolean mask ``free`` are unrestricted; all others
    are nonnegative.  ``method`` is ``"simplex"``, ``"highs"`` or ``"auto"``.
    """
    c = np.asarray(c, dtype=float)
    n = c.size

    def _mat(A):
        if A is None:
            return np.zeros((0, n))
        if sp.issparse(A):
            return sp.csr_matrix(A, dtype=float)
        return np.atleast_2d(np.asarray(A, dtype=float)).reshape(-1, n)

    A_ub, A_eq = _mat(A_ub), _mat(A_eq)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    free = np.zeros(n, dtype=bool) if free is None else np.asarray(free, dtype=bool)

    # row equilibration
    def _scale(A, b):
        if sp.issparse(A):
            s = np.asarray(abs(A).max(axis=1).todense()).ravel() if A.shape[0] else np.zeros(0)
            s[s == 0] = 1.0
            return sp.diags(1.0 / s) @ A, b / s
        s = np.abs(A).max(axis=1, initial=0.0)
        s[s == 0] = 1.0
        return A / s[:, None], b / s

    A_ub_s, b_ub_s = _scale(A_ub, b_ub)
    A_eq_s, b_eq_s = _scale(A_eq, b_eq)

    n_free = int(free.sum())
    m1, m2 = A_ub.shape[0], A_eq.shape[0]
    n_std = n + n_free + m1
    if method == "auto":
        small = (m1 + m2 + 1) * (n_std + m1 + m2 + 1) <= SIMPLEX_MAX_ENTRIES
        if small:
            try:
                return solve_lp(c, A_ub, b_ub, A_eq, b_eq, free, method="simplex")
            except (InfeasibleError, UnboundedError, LPError):
                pass  # numerical trouble in the dense tableau: let HiGHS decide
        method = "highs"

    if method == "highs":
        bounds = [(None, None) if f else (0, None) for f in free]
        res = _scipy_linprog(c, A_ub=A_ub_s if m1 else None, b_ub=b_ub_s if m1 else None,
                             A_eq=A_eq_s if m2 else None, b_eq=b_eq_s if m2 else None,
                             bounds=bounds, method="highs")
        if res.status == 2:
            raise InfeasibleError(res.message)
        if res.status == 3:
            raise UnboundedError(res.message)
        if res.status != 0:
            raise LPError(res.message)
        x = res.x
        gap = 0.0
        if m1 or m2:
            duals_ub = res.ineqlin.marginals if m1 else np.zeros(0)
            duals_eq = res.eqlin.marginals if m2 else np.zeros(0)
            gap = abs(float(c @ x) - float(b_ub_s @ duals_ub + b_eq_s @ duals_eq))
        iters = int(getattr(res, "nit", 0))
    elif method == "simplex":
        if sp.issparse(A_ub_s):
            A_ub_s, A_ub = A_ub_s.toarray(), A_ub.toarray()
        if sp.issparse(A_eq_s):
            A_eq_s, A_eq = A_eq_s.toarray(), A_eq.toarray()
        # x = [x_plain, x_free_minus, slacks], free vars use x_plain as the plus part
        cols_free = np.flatnonzero(free)
        A_std = np.zeros((m1 + m2, n_std))
        A_std[:m1, :n] = A_ub_s
        A_std[m1:, :n] = A_eq_s
        A_std[:m1, n:n + n_free] = -A_ub_s[:, cols_free]
        A_std[m1:, n:n + n_free] = -A_eq_s[:, cols_free]
        A_std[:m1, n + n_free:] = np.eye(m1)
        c_std = np.concatenate([c, -c[cols_free], np.zeros(m1)])
        b_std = np.concatenate([b_ub_s, b_eq_s])
        if A_std.shape[0] == 0:
            if (c_std < 0).any():
                raise UnboundedError("objective unbounded below")
            x_std, y, iters = np.zeros(n_std), np.zeros(0), 0
        else:
            x_std, y, iters = simplex_standard(c_std, A_std, b_std)
        x = x_std[:n].copy()
        x[cols_free] -= x_std[n:n + n_free]
        gap = abs(float(c_std @ x_std) - float(b_std @ y))
    else:
        raise ValueError(f"unknown LP method {method!r}")

    residual = 0.0
    if m1:
        residual = max(residual, float(np.max(A_ub @ x - b_ub, initial=0.0)))
    if m2:
        residual = max(residual, float(np.abs(A_eq @ x - b_eq).max()))
    if (~free).any():
        residual = max(residual, float(np.max(-x[~free], initial=0.0)))
    return LPResult(x=x, fun=float(c @ x), method=method, residual=residual,
                    dual_gap=gap, iterations=iters)
