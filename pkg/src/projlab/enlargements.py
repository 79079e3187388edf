"""Sufficient-enlargement bodies, containment of projected balls, and the l_1-sum construction.

An :class:`Enlargement` is a Minkowski sum of scaled bodies living in a
target space ``X`` (coordinates of ``X``).  Each body is the unit ball of a
small normed space ``N`` placed into ``X`` by a basis matrix, so an ``l_p``
ball on a subspace and a polytope given by vertices or facets are handled
uniformly: ``h(f) = ||B^T f||_{N*}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .lp import solve_lp
from .minproj import embed_into_linf, lambda_relative
from .normlp import NormTerm, minimize_max_norm
from .projections import Projection, coords_in
from .spaces import (
    DEFAULT_TOL,
    LinearMap,
    NoExactStrategyError,
    NormedSpace,
    Space,
    Subspace,
    Tolerances,
    frame,
    half_representatives,
    induced,
    operator_norm,
    quotient_norm,
)


@dataclass(frozen=True, eq=False)
class Body:
    """Image ``B(ball of space)`` of a unit ball under an injective ``basis``."""
    space: NormedSpace
    basis: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.shape[1] != self.space.dim:
            raise ValueError("basis columns must match the body's dimension")
        if B.shape[1] and np.linalg.matrix_rank(B) < B.shape[1]:
            raise ValueError("body basis must be injective")
        object.__setattr__(self, "basis", B)

    @classmethod
    def lp_ball(cls, p: float, basis) -> "Body":
        B = np.atleast_2d(np.asarray(basis, dtype=float))
        if B.shape[1] == 1:
            # every norm on a line is a segment
            return cls(NormedSpace.from_vertices([[1.0]]), B)
        return cls(NormedSpace.lp(B.shape[1], p), B)

    @classmethod
    def polytope(cls, vertices) -> "Body":
        V = np.atleast_2d(np.asarray(vertices, dtype=float))
        d = V.shape[1]
        # work in the span of the vertices
        u, s, vt = np.linalg.svd(V, full_matrices=False)
        r = int(np.sum(s > 1e-12 * max(1.0, s[0])))
        Q = vt[:r].T
        return cls(NormedSpace.from_vertices(V @ Q), Q) if r < d else cls(NormedSpace.from_vertices(V), np.eye(d))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def is_polyhedral(self) -> bool:
        return self.space.is_polyhedral

    def support(self, f) -> float:
        return float(self.space.dual_norm(self.basis.T @ np.asarray(f, dtype=float))[0])


@dataclass(frozen=True, eq=False)
class Enlargement:
    space: Space
    summands: tuple = ()   # pairs (scale, Body)

    def __post_init__(self):
        items = tuple((float(s), b) for s, b in self.summands)
        for s, b in items:
            if not s > 0:
                raise ValueError("summand scales must be positive")
            if b.dim != self.space.dim:
                raise ValueError(f"summand of dimension {b.dim} in a space of dimension {self.space.dim}")
        object.__setattr__(self, "summands", items)

    @classmethod
    def ball(cls, space: Space, scale: float = 1.0) -> "Enlargement":
        """``scale`` times the unit ball of ``space``."""
        return cls(space, ((scale, Body(induced(space), np.eye(space.dim))),))

    def scaled(self, factor: float) -> "Enlargement":
        return Enlargement(self.space, tuple((s * factor, b) for s, b in self.summands))

    def __add__(self, other: "Enlargement") -> "Enlargement":
        if other.space.dim != self.space.dim:
            raise ValueError("Minkowski sum of bodies in different spaces")
        return Enlargement(self.space, self.summands + other.summands)

    def lift(self, target: Space, inclusion: np.ndarray) -> "Enlargement":
        """The same body seen in ``target`` via ``inclusion`` (target coords of this space's basis)."""
        J = np.asarray(inclusion, dtype=float)
        return Enlargement(target, tuple((s, Body(b.space, J @ b.basis)) for s, b in self.summands))

    # support function and gauge
    def support(self, f) -> float:
        return float(sum(s * b.support(f) for s, b in self.summands))

    def _direct_sum(self):
        """``(pinv of stacked bases, offsets)`` when the summand spans are independent."""
        if not self.summands:
            return None
        B = np.hstack([b.basis for _, b in self.summands])
        if np.linalg.matrix_rank(B) < B.shape[1]:
            return None
        offs = np.cumsum([0] + [b.space.dim for _, b in self.summands])
        return B, np.linalg.pinv(B), offs

    def facet_functionals(self) -> np.ndarray | None:
        """Rows ``g`` with ``gauge(x) = max |g x|`` on the span of the body, if available."""
        ds = self._direct_sum()
        if ds is None:
            return None
        _, Binv, offs = ds
        rows = []
        for i, (s, b) in enumerate(self.summands):
            F = b.space.facet_matrix
            if F is None:
                return None
            rows.append(F @ Binv[offs[i]:offs[i + 1]] / s)
        return np.vstack(rows)

    def gauge(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if not self.summands:
            return 0.0 if not np.any(x) else np.inf
        ds = self._direct_sum()
        if ds is not None:
            B, Binv, offs = ds
            c = Binv @ x
            if np.abs(B @ c - x).max() > 1e-9 * max(1.0, np.abs(x).max()):
                return np.inf
            return float(max(b.space.norm(c[offs[i]:offs[i + 1]]) / s
                             for i, (s, b) in enumerate(self.summands)))
        if all(b.is_polyhedral for _, b in self.summands):
            return self._gauge_lp(x)
        return self._gauge_dual(x)

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.gauge(x) <= 1.0 + tol

    def _gauge_lp(self, x) -> float:
        # x = sum_i B_i c_i with ||c_i||_{N_i} <= t * s_i; minimize t
        d = self.space.dim
        blocks = []
        n_c = sum(b.space.dim for _, b in self.summands)
        # variables: c (free), t, auxiliary per-summand
        ub_rows = []
        var = n_c + 1
        extra = []
        off = 0
        for s, b in self.summands:
            k = b.space.dim
            F = b.space.facet_matrix
            if F is not None:
                # |F c| <= t s
                for sg in (1.0, -1.0):
                    ub_rows.append((off, k, sg * F, s))
            else:
                V = b.space.vertex_matrix
                if V is None:
                    raise NoExactStrategyError("summand has neither facets nor vertices")
                extra.append((off, k, V, s, var))
                var += 2 * len(V)
            blocks.append(b.basis)
            off += k
        n = var
        c = np.zeros(n)
        c[n_c] = 1.0
        A_ub, b_ub = [], []
        for o, k, M, s in ub_rows:
            A = np.zeros((len(M), n))
            A[:, o:o + k] = M
            A[:, n_c] = -s
            A_ub.append(A)
            b_ub.append(np.zeros(len(M)))
        A_eq = [np.hstack([np.hstack(blocks), np.zeros((d, n - n_c))])]
        b_eq = [x]
        for o, k, V, s, v0 in extra:
            # c = V^T (lp - lm), sum(lp + lm) <= t s
            m = len(V)
            A = np.zeros((k, n))
            A[:, o:o + k] = np.eye(k)
            A[:, v0:v0 + m] = -V.T
            A[:, v0 + m:v0 + 2 * m] = V.T
            A_eq.append(A)
            b_eq.append(np.zeros(k))
            row = np.zeros((1, n))
            row[0, v0:v0 + 2 * m] = 1.0
            row[0, n_c] = -s
            A_ub.append(row)
            b_ub.append(np.zeros(1))
        free = np.zeros(n, dtype=bool)
        free[:n_c] = True
        res = solve_lp(c, np.vstack(A_ub) if A_ub else None, np.concatenate(b_ub) if b_ub else None,
                       np.vstack(A_eq), np.concatenate(b_eq), free=free)
        return float(res.fun)

    def _gauge_dual(self, x) -> float:
        # gauge(x) = 1 / min { h(f) : f.x = 1 }, solved on the hyperplane f = x/|x|^2 + N z
        from scipy.optimize import minimize

        nx = float(x @ x)
        if nx == 0:
            return 0.0
        f0 = x / nx
        u, s, vt = np.linalg.svd(x[None, :])
        N = vt[1:].T
        h = lambda z: self.support(f0 + N @ z)
        z = np.zeros(N.shape[1])
        for method in ("Powell", "Nelder-Mead"):
            z = minimize(h, z, method=method,
                         options={"xtol": 1e-12, "ftol": 1e-15, "maxiter": 20000} if method == "Powell"
                         else {"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000}).x
        val = h(z)
        return float(1.0 / val) if val > 0 else np.inf

    def to_json(self) -> dict:
        out = []
        for s, b in self.summands:
            sp = b.space
            if sp.kind == "lp":
                body = {"kind": "lp_ball", "p": "inf" if np.isinf(sp.p) else sp.p,
                        "basis": b.basis.T.tolist()}
            else:
                body = {"kind": "polytope", "vertices": (sp.vertex_matrix @ b.basis.T).tolist()}
            out.append({"scale": s, "body": body})
        return {"summands": out}


@dataclass
class Containment:
    holds: bool
    margin: float
    witness: np.ndarray | None
    route: str


def contains_image(P: Projection, A: Enlargement, tol: Tolerances = DEFAULT_TOL,
                   slack: float = 1e-8) -> Containment:
    """Decide ``P(B_Z) subset A``; ``margin = min over extreme points v of 1 - gauge_A(P v)``."""
    Z = induced(P.domain)
    M = P.matrix
    if A.space.dim != P.image.dim:
        raise ValueError("enlargement must live in the image of the projection")
    G = A.facet_functionals()
    ds = A._direct_sum()
    if G is not None:
        B, Binv, _ = ds
        # image must lie in the span of the body
        off = M - B @ (Binv @ M)
        if np.abs(off).max(initial=0.0) > 1e-9:
            return Containment(False, -np.inf, None, "facets")
        rows = G @ M
        best, arg = -np.inf, None
        for g in rows:
            val, x = Z.dual_norm(g)
            if val > best:
                best, arg = val, x
        margin = 1.0 - best
        return Containment(margin >= -slack, margin, arg if margin < -slack else None, "facets")

    V = Z.vertex_matrix
    if V is None and Z.plain and np.isinf(Z.p) and Z.dim <= tol.enum_cap:
        from .spaces import _sign_chunks
        chunks = _sign_chunks(Z.dim)
    elif V is not None:
        chunks = [V]
    else:
        raise NoExactStrategyError(
            f"containment needs enumerable extreme points of the domain ball; got {Z.describe()}")
    worst, arg = -np.inf, None
    for chunk in chunks:
        for v in chunk:
            gval = A.gauge(M @ v)
            if gval > worst:
                worst, arg = gval, v
    margin = 1.0 - worst
    return Containment(margin >= -slack, margin, arg if margin < -slack else None, "vertices")


# ----------------------------------------------------------------------------
# l_1-sum construction


class ConditionError(ValueError):
    def __init__(self, msg, x=None, y=None):
        super().__init__(msg)
        self.x, self.y = x, y


Realizer = Callable[[NormedSpace, Subspace, Subspace], np.ndarray]


def lp_realizer(Z: NormedSpace, X: Subspace, Y: Subspace) -> np.ndarray:
    """Minimal-norm projection onto ``X`` among those vanishing on ``Y`` (rows: X coords)."""
    dX, N = X.dim, Z.dim
    R = dX * N
    dirs = np.zeros((R, dX, N))
    dirs[np.arange(R), np.repeat(np.arange(dX), N), np.tile(np.arange(N), dX)] = 1.0
    K = np.hstack([X.basis, Y.basis])
    target = np.hstack([np.eye(dX), np.zeros((dX, Y.dim))])
    k = K.shape[1]
    C = np.zeros((dX * k, R))
    for a in range(dX):
        for c in range(k):
            C[a * k + c, a * N:(a + 1) * N] = K[:, c]
    term = NormTerm(np.zeros((dX, N)), dirs, Z, X.induced)
    theta, _, _ = minimize_max_norm([term], R, theta_eq=(C, target.ravel()))
    W = theta.reshape(dX, N)
    return W - (W @ K - target) @ np.linalg.pinv(K)


def coordinate_realizer(coords, W0: np.ndarray) -> Realizer:
    """Realizer ``z -> W0 z[coords]`` for copies whose private coordinates are ``coords``."""
    coords = np.asarray(coords)

    def realize(Z: NormedSpace, X: Subspace, Y: Subspace) -> np.ndarray:
        W = np.zeros((X.dim, Z.dim))
        W[:, coords] = W0
        return W

    return realize


@dataclass
class L1SumResult:
    projection: Projection
    P_X: np.ndarray
    P_Y: np.ndarray
    Q_X: np.ndarray
    Q_Y: np.ndarray
    enlargement: Enlargement
    containment: Containment
    residuals: dict = field(default_factory=dict)
    conditions: dict = field(default_factory=dict)


def check_sum_conditions(Z: NormedSpace, X: Subspace, Y: Subspace, tol: Tolerances = DEFAULT_TOL) -> dict:
    """``||x|| <= ||x + y||`` and ``||y|| <= ||x + y||`` as norms of the two oblique projections."""
    W = X + Y
    if W.dim != X.dim + Y.dim:
        raise ConditionError("X and Y intersect nontrivially")
    Bw = np.hstack([X.basis, Y.basis])
    W = Subspace(Z, Bw)
    out = {}
    for name, sl in (("X", slice(0, X.dim)), ("Y", slice(X.dim, X.dim + Y.dim))):
        D = np.zeros((W.dim, W.dim))
        D[sl, sl] = np.eye(sl.stop - sl.start)
        if sl.stop == sl.start:
            out[name] = {"norm": 0.0, "certificate": "exact"}
            continue
        r = operator_norm(LinearMap(W, W, D), tol)
        out[name] = {"norm": r.value, "certificate": r.certificate if r.certificate == "exact" else "sampled"}
        bad = r.lower if r.certificate != "exact" else r.value
        if bad > 1.0 + 1e-9:
            w = r.witness
            x, y = Bw[:, :X.dim] @ w[:X.dim], Bw[:, X.dim:] @ w[X.dim:]
            raise ConditionError(f"condition for {name} fails: oblique projection norm {bad:.6g} > 1", x, y)
    return out


def l1_sum_construction(X: Subspace, Y: Subspace, Z: NormedSpace, A_X: Enlargement,
                        A_Y: Enlargement | None, realizer: Realizer = lp_realizer,
                        tol: Tolerances = DEFAULT_TOL) -> L1SumResult:
    """Projection ``Pz = (P_X z, P_Y z)`` of ``Z`` onto ``X + Y`` with ``P(B_Z)`` inside ``A_X + A_Y``.

    ``P_X = Q_X phi_Y`` where ``phi_Y: Z -> Z/Y`` is the quotient map (coordinates
    on the Euclidean complement of ``Y``) and ``Q_X`` is the realizer's
    projection read on the quotient.
    """
    if X.ambient.dim != Z.dim or Y.ambient.dim != Z.dim:
        raise ValueError("X and Y must be subspaces of Z")
    conditions = check_sum_conditions(Z, X, Y, tol)
    Bw = np.hstack([X.basis, Y.basis])
    W = Subspace(Z, Bw, label="X+Y")

    def side(S: Subspace, T: Subspace):
        if S.dim == 0:
            return np.zeros((0, Z.dim)), np.zeros((0, Z.dim - T.dim))
        Pm = np.asarray(realizer(Z, S, T), dtype=float)
        Nq = T.complement                         # quotient coordinates of Z/T
        Q = Pm @ Nq                               # the realizer read on Z/T
        return Q @ Nq.T, Q                        # P_S = Q_S phi_T

    P_X, Q_X = side(X, Y)
    P_Y, Q_Y = side(Y, X)
    M = np.vstack([P_X, P_Y])
    P = Projection(Z, W, M)
    residuals = {
        "identity_on_sum": float(np.abs(M @ Bw - np.eye(W.dim)).max(initial=0.0)),
        "P_X_on_Y": float(np.abs(P_X @ Y.basis).max(initial=0.0)),
        "P_Y_on_X": float(np.abs(P_Y @ X.basis).max(initial=0.0)),
    }
    # consistency of the quotient route: ||P_X z|| <= ||Q_X|| ||z + Y|| on a few points
    if Y.dim and X.dim and Z.is_polyhedral:
        rng = np.random.default_rng(0)
        worst = 0.0
        for z in rng.standard_normal((4, Z.dim)):
            q = quotient_norm(Z, Y, z, tol)
            worst = max(worst, float(np.abs(P_X @ (z - q.minimizer) - P_X @ z).max()))
        residuals["quotient_factorization"] = worst

    nX = X.dim
    parts = A_X.lift(W, np.vstack([np.eye(nX), np.zeros((W.dim - nX, nX))]))
    if A_Y is not None and Y.dim:
        parts = parts + A_Y.lift(W, np.vstack([np.zeros((nX, Y.dim)), np.eye(Y.dim)]))
    cont = contains_image(P, parts, tol)
    return L1SumResult(P, P_X, P_Y, Q_X, Q_Y, parts, cont, residuals, conditions)


# ----------------------------------------------------------------------------
# experiments around Euclidean sums


def product_embedding(k: int, n: int, m: int, n_angles: int = 7, cross: int = 8,
                      seed: int = 0, tol: Tolerances = DEFAULT_TOL):
    """Copy of ``l_2^k (+) l_2^(n-k)`` in ``l_inf^M`` with a Euclidean-type joint norm.

    Coordinates: ``m`` functionals of each factor (each factor alone is its
    ``m``-point embedding), then mixed functionals
    ``(cos t) u + (sin t) v`` over ``n_angles`` angles in ``(0, pi/2)`` and
    ``cross``-point subsamples of both grids.
    """
    eX = embed_into_linf(NormedSpace.l2(k), m, seed=seed, tol=tol)
    eY = embed_into_linf(NormedSpace.l2(n - k), m, seed=seed + 1, tol=tol)
    UX, UY = eX.functionals, eY.functionals
    sx = UX[np.linspace(0, m - 1, min(cross, m)).astype(int)]
    sy = UY[np.linspace(0, m - 1, min(cross, m)).astype(int)]
    rows = [np.hstack([UX, np.zeros((m, n - k))]), np.hstack([np.zeros((m, k)), UY])]
    for t in (np.arange(1, n_angles + 1) * (np.pi / 2) / (n_angles + 1)):
        for sgn in (1.0, -1.0):
            a = np.repeat(sx, len(sy), axis=0) * np.cos(t)
            b = np.tile(sy, (len(sx), 1)) * np.sin(t) * sgn
            rows.append(np.hstack([a, b]))
    mixed = half_representatives(np.vstack(rows[2:]))
    U = np.vstack(rows[:2] + [mixed])
    Z = NormedSpace.linf(len(U))
    X = Subspace(Z, U[:, :k], label=f"l2^{k}")
    Y = Subspace(Z, U[:, k:], label=f"l2^{n - k}")
    return Z, X, Y, eX, eY


@dataclass
class Sqrt2Report:
    k: int
    n: int
    m: int
    lambda_k: float
    lambda_nk: float
    lambda_n: float
    lhs: float
    rhs: float
    inequality_holds: bool
    slack: float
    p2_norm: float
    p2_bound_holds: bool
    containment_margin: float
    ambient_dim: int
    residuals: dict


def sqrt2_bound_check(k: int, n: int, m: int = 64, n_angles: int = 7, cross: int = 8,
                      tol: Tolerances = DEFAULT_TOL, seed: int = 0, estimates: dict | None = None) -> Sqrt2Report:
    """Compare ``sqrt(lam_k^2 + lam_(n-k)^2)`` with ``sqrt(2) lam_n`` and build the sum projection."""
    if not 1 <= k < n:
        raise ValueError("need 1 <= k < n")
    est = {} if estimates is None else estimates

    def lam(j, emb=None):
        if j not in est:
            e = emb or embed_into_linf(NormedSpace.l2(j), m, tol=tol)
            est[j] = lambda_relative(e.copy, e.ambient, tol=tol)
        return est[j]

    Z, X, Y, eX, eY = product_embedding(k, n, m, n_angles, cross, seed, tol)
    rk = lambda_relative(eX.copy, eX.ambient, tol=tol)
    rnk = lambda_relative(eY.copy, eY.ambient, tol=tol)
    est.setdefault(k, rk)
    est.setdefault(n - k, rnk)
    rn = lam(n)
    lk, lnk, ln = rk.lam, rnk.lam, rn.lam
    lhs = float(np.hypot(lk, lnk))
    rhs = float(np.sqrt(2.0) * ln)
    A_X = Enlargement.ball(X, lk)
    A_Y = Enlargement.ball(Y, lnk)
    res_x = coordinate_realizer(np.arange(m), rk.projection.matrix)
    res_y = coordinate_realizer(np.arange(m, 2 * m), rnk.projection.matrix)

    def realizer(Zs, S, T):
        return res_x(Zs, S, T) if S is X else res_y(Zs, S, T)

    out = l1_sum_construction(X, Y, Z, A_X, A_Y, realizer, tol)
    p2 = operator_norm(out.projection.map, tol).value
    return Sqrt2Report(k, n, m, lk, lnk, ln, lhs, rhs, lhs < rhs, rhs - lhs, p2,
                       p2 <= lhs + 1e-3, out.containment.margin, Z.dim, out.residuals)


@dataclass
class ExampleReport:
    k: int
    n: int
    m: int
    tau: float
    lambda_n: float
    lambda_k: float
    eta: float
    composite_norm: float
    gap_ratio: float
    lower_bound: float
    bound_holds: bool
    exceeds_lambda_k: bool


def example_experiment(k: int, n: int, m: int = 64, tau: float = 0.01,
                       tol: Tolerances = DEFAULT_TOL) -> ExampleReport:
    """Orthogonal ``P1: l_2^n -> l_2^k`` after a near-minimal ``P2: l_inf^m -> l_2^n``."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    e = embed_into_linf(NormedSpace.l2(n), m, tol=tol)
    r2 = lambda_relative(e.copy, e.ambient, tau=tau, tol=tol)
    X1 = Subspace(e.ambient, e.copy.basis[:, :k], label=f"l2^{k}")
    C = r2.projection.matrix[:k]
    comp = operator_norm(LinearMap(e.ambient, X1, C), tol).value
    lam_k = lambda_relative(X1, e.ambient, tau=tau, tol=tol).lam
    lower = r2.lam * (1 - e.eta) * 0.98
    return ExampleReport(k, n, m, tau, r2.lam, lam_k, e.eta, comp, comp / lam_k, lower,
                         comp >= lower - 1e-9, comp > lam_k + 1e-9)
