"""Linear programs over affine families of operators.

Given terms ``M_e(theta) = base_e + sum_r theta_r dir_e[r]`` acting between
polyhedral spaces, :func:`minimize_max_norm` solves

    minimize t   s.t.   ||M_e(theta)|| <= t       (terms without a bound)
                        ||M_e(theta)|| <= bound_e  (terms with a bound)

exactly.  The operator norm is written through the codomain's facet
functionals ``f``: ``||M|| = max_f ||M^T f||_*`` where ``||.||_*`` is the
domain's dual norm, and every dual norm used here is LP-representable:

* plain l_inf domain: ``||u||_1``;
* plain l_1 domain: ``||u||_inf``;
* enumerable ball vertices ``V``: ``max |V u|``;
* facet/section domains (``||x|| = max |G x|``): ``min sum|lam|`` with
  ``G^T lam = u`` (Hahn-Banach extension);
* sections of l_1 (``||x|| = ||L x||_1``): ``min ||g||_inf`` with ``L^T g = u``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .lp import LPResult, solve_lp
from .spaces import NoExactStrategyError, NormedSpace

VERTEX_LIMIT = 4000


@dataclass
class NormTerm:
    base: np.ndarray
    directions: np.ndarray
    domain: NormedSpace
    codomain: NormedSpace
    bound: float | None = None


def representable(space: NormedSpace) -> bool:
    if space.plain and space.p in (1.0, np.inf):
        return True
    if space.kind == "lp" and space.p == 1:
        return True
    V = space.vertex_matrix
    if V is not None and len(V) <= VERTEX_LIMIT:
        return True
    return space.is_polyhedral and space.facet_matrix is not None


class _Builder:
    def __init__(self, n_params: int):
        self.n_params = n_params
        self.n_vars = n_params + 1  # theta..., t
        self.ub_rows: list[tuple[np.ndarray, np.ndarray, float]] = []  # (cols, vals, rhs)
        self.eq_rows: list[tuple[np.ndarray, np.ndarray, float]] = []
        self.free = [True] * n_params + [False]

    @property
    def t(self) -> int:
        return self.n_params

    def new_vars(self, k: int, free: bool = False) -> np.ndarray:
        idx = np.arange(self.n_vars, self.n_vars + k)
        self.n_vars += k
        self.free.extend([free] * k)
        return idx

    def add_ub(self, cols, vals, rhs):
        self.ub_rows.append((np.asarray(cols), np.asarray(vals, dtype=float), float(rhs)))

    def add_eq(self, cols, vals, rhs):
        self.eq_rows.append((np.asarray(cols), np.asarray(vals, dtype=float), float(rhs)))

    def _sparse(self, rows):
        if not rows:
            return None, None
        r = np.concatenate([np.full(len(c), i) for i, (c, _, _) in enumerate(rows)])
        c = np.concatenate([c for c, _, _ in rows])
        v = np.concatenate([v for _, v, _ in rows])
        A = sp.csr_matrix((v, (r, c)), shape=(len(rows), self.n_vars))
        b = np.array([rhs for _, _, rhs in rows])
        return A, b

    def solve(self, method: str) -> LPResult:
        c = np.zeros(self.n_vars)
        c[self.t] = 1.0
        A_ub, b_ub = self._sparse(self.ub_rows)
        A_eq, b_eq = self._sparse(self.eq_rows)
        return solve_lp(c, A_ub, b_ub, A_eq, b_eq, free=np.array(self.free), method=method)


def _bound_cols(b: _Builder, bound):
    """Columns/values for the right-hand side ``t`` (or a constant bound)."""
    if bound is None:
        return [b.t], [-1.0], 0.0
    return [], [], float(bound)


def _add_dual_norm_le(b: _Builder, dom: NormedSpace, a0: np.ndarray, A: np.ndarray, bound):
    """Constrain ``||a0 + A theta||_{dom*} <= t`` (or ``<= bound``)."""
    R = b.n_params
    tc, tv, rhs = _bound_cols(b, bound)
    theta = np.arange(R)
    d = dom.dim

    def affine_row(coef_theta, const, extra_cols=(), extra_vals=(), rhs_shift=0.0):
        nz = np.flatnonzero(coef_theta)
        cols = np.concatenate([theta[nz], np.asarray(extra_cols, dtype=int)])
        vals = np.concatenate([coef_theta[nz], np.asarray(extra_vals, dtype=float)])
        return cols, vals, rhs_shift - const

    if dom.plain and np.isinf(dom.p):
        s = b.new_vars(d)
        for i in range(d):
            for sg in (1.0, -1.0):
                cols, vals, r = affine_row(sg * A[i], sg * a0[i], [s[i]], [-1.0])
                b.add_ub(cols, vals, r)
        b.add_ub(np.concatenate([s, tc]), np.concatenate([np.ones(d), tv]), rhs)
        return
    if dom.plain and dom.p == 1:
        for i in range(d):
            for sg in (1.0, -1.0):
                cols, vals, r = affine_row(sg * A[i], sg * a0[i], tc, tv, rhs)
                b.add_ub(cols, vals, r)
        return
    V = dom.vertex_matrix
    if V is not None and len(V) <= VERTEX_LIMIT:
        VA, va = V @ A, V @ a0
        for k in range(len(V)):
            for sg in (1.0, -1.0):
                cols, vals, r = affine_row(sg * VA[k], sg * va[k], tc, tv, rhs)
                b.add_ub(cols, vals, r)
        return
    if dom.kind == "lp" and dom.p == 1:
        L = dom.transform
        g = b.new_vars(L.shape[0], free=True)
        for i in range(d):  # L^T g - A theta = a0
            cols = np.concatenate([g, np.arange(R)])
            vals = np.concatenate([L[:, i], -A[i]])
            b.add_eq(cols, vals, a0[i])
        for gi in g:
            for sg in (1.0, -1.0):
                b.add_ub(np.concatenate([[gi], tc]), np.concatenate([[sg], tv]), rhs)
        return
    G = dom.facet_matrix
    if G is None:
        raise NoExactStrategyError(f"dual norm of {dom.describe()} is not LP-representable")
    k = len(G)
    lam = b.new_vars(k, free=True)
    s = b.new_vars(k)
    for i in range(d):  # G^T lam - A theta = a0
        cols = np.concatenate([lam, np.arange(R)])
        vals = np.concatenate([G[:, i], -A[i]])
        b.add_eq(cols, vals, a0[i])
    for j in range(k):
        for sg in (1.0, -1.0):
            b.add_ub([lam[j], s[j]], [sg, -1.0], 0.0)
    b.add_ub(np.concatenate([s, tc]), np.concatenate([np.ones(k), tv]), rhs)


def minimize_max_norm(terms: list[NormTerm], n_params: int, method: str = "auto",
                      theta_eq: tuple[np.ndarray, np.ndarray] | None = None):
    """Return ``(theta, t, lp_result)`` minimizing the max of the unbounded terms.

    ``theta_eq = (C, d)`` adds the linear side constraint ``C theta = d``.
    """
    b = _Builder(n_params)
    if theta_eq is not None:
        C, d = theta_eq
        for row, rhs in zip(np.atleast_2d(C), np.atleast_1d(d)):
            nz = np.flatnonzero(row)
            b.add_eq(nz, row[nz], rhs)
    for term in terms:
        F = term.codomain.facet_matrix
        if F is None:
            raise NoExactStrategyError(f"codomain {term.codomain.describe()} has no enumerable facets")
        if not representable(term.domain):
            raise NoExactStrategyError(f"dual norm of {term.domain.describe()} is not LP-representable")
        D = np.asarray(term.directions).reshape(n_params, *term.base.shape)
        for f in F:
            a0 = term.base.T @ f
            A = np.einsum("rkd,k->dr", D, f) if n_params else np.zeros((term.base.shape[1], 0))
            _add_dual_norm_le(b, term.domain, a0, A, term.bound)
    res = b.solve(method)
    return res.x[:n_params], float(res.x[n_params]), res
