"""Finite-dimensional normed spaces, subspaces, linear maps and operator norms.

Spaces come in three flavours:

* ``lp``: ``||x|| = ||L x||_p`` with an optional injective ``transform`` ``L``
  (a subspace of an ``lp`` space is again of this kind, in basis coordinates);
* ``vertices``: the unit ball is the convex hull of a symmetric point list;
* ``facets``: ``||x|| = max_i |f_i . x|`` for a symmetric, spanning list of
  functionals.

Conversions between vertex and facet descriptions go through qhull and are
only attempted in dimension ``<= Tolerances.convert_cap``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .lp import solve_lp


@dataclass(frozen=True)
class Tolerances:
    linalg: float = 1e-9
    opt: float = 1e-6
    rank: float = 1e-10
    enum_cap: int = 20
    convert_cap: int = 6
    samples: int = 10_000


DEFAULT_TOL = Tolerances()


class NoExactStrategyError(RuntimeError):
    """Raised when no exact operator-norm strategy applies within the caps."""


def _as_matrix(points, dim: int | None = None) -> np.ndarray:
    a = np.atleast_2d(np.asarray(points, dtype=float))
    if dim is not None and a.shape[1] != dim:
        raise ValueError(f"points have dimension {a.shape[1]}, expected {dim}")
    return a


def half_representatives(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """One row per ``+-`` pair of a symmetric point list (zero rows dropped)."""
    pts = np.asarray(points, dtype=float)
    pts = pts[np.abs(pts).max(axis=1) > tol]
    if len(pts) == 0:
        return pts
    # canonical sign: first nonzero coordinate positive
    first = np.argmax(np.abs(pts) > tol, axis=1)
    sgn = np.sign(pts[np.arange(len(pts)), first])
    canon = pts * sgn[:, None]
    _, idx = np.unique(np.round(canon, 12), axis=0, return_index=True)
    return canon[np.sort(idx)]


def symmetrize(points) -> np.ndarray:
    half = half_representatives(_as_matrix(points))
    return np.vstack([half, -half])


def _is_symmetric(points: np.ndarray, tol: float = 1e-9) -> bool:
    pts = np.asarray(points)
    for v in pts:
        if np.min(np.abs(pts + v).max(axis=1)) > tol * max(1.0, np.abs(v).max()):
            return False
    return True


def polar_vertices(points: np.ndarray) -> np.ndarray:
    """Vertices (up to sign) of ``{x : |p . x| <= 1 for all rows p}``.

    The same routine turns a vertex list into its facet functionals, since the
    two descriptions are polar to each other.
    """
    half = half_representatives(points)
    d = half.shape[1]
    if d == 1:
        return np.array([[1.0 / np.abs(half).max()]])
    pts = np.vstack([half, -half])
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise ValueError(f"degenerate point set for polar conversion: {exc}") from exc
    eq = hull.equations
    normals = eq[:, :-1] / (-eq[:, -1])[:, None]
    return half_representatives(normals)


def essential_points(points: np.ndarray) -> np.ndarray:
    """Rows (up to sign) that are extreme in ``conv(+-points)``."""
    half = half_representatives(points)
    d = half.shape[1]
    if d == 1:
        return half[[np.argmax(np.abs(half[:, 0]))]]
    pts = np.vstack([half, -half])
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return half
    return half_representatives(pts[hull.vertices])


def holder_dual(y: np.ndarray, p: float) -> np.ndarray:
    """Unit-dual-norm functional ``g`` with ``g . y = ||y||_p``."""
    y = np.asarray(y, dtype=float)
    g = np.zeros_like(y)
    if not np.any(y):
        g[0] = 1.0
        return g
    if np.isinf(p):
        i = int(np.argmax(np.abs(y)))
        g[i] = np.sign(y[i])
        return g
    if p == 1:
        g = np.sign(y)
        g[g == 0] = 1.0
        return g
    q = p / (p - 1)
    w = np.sign(y) * np.abs(y) ** (p - 1)
    return w / np.linalg.norm(w, q)


@dataclass(frozen=True, eq=False)
class NormedSpace:
    dim: int
    kind: str
    p: float = 2.0
    points: np.ndarray | None = None
    transform: np.ndarray | None = None
    label: str = ""
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")
        if self.kind == "lp":
            if not self.p >= 1:
                raise ValueError(f"p must be >= 1, got {self.p}")
            if self.transform is not None:
                L = np.asarray(self.transform, dtype=float)
                if L.ndim != 2 or L.shape[1] != self.dim:
                    raise ValueError("transform must have shape (N, dim)")
                if self.dim and np.linalg.matrix_rank(L, tol=self.tol.rank * max(1.0, np.abs(L).max())) < self.dim:
                    raise ValueError("transform must be injective")
                object.__setattr__(self, "transform", L)
        elif self.kind in ("vertices", "facets"):
            if self.points is None or len(self.points) == 0:
                raise ValueError(f"{self.kind} list must be nonempty")
            pts = _as_matrix(self.points, self.dim)
            if not _is_symmetric(pts):
                raise ValueError(f"{self.kind} list must be centrally symmetric")
            if np.linalg.matrix_rank(pts) < self.dim:
                raise ValueError(f"{self.kind} list must span the space")
            object.__setattr__(self, "points", pts)
        else:
            raise ValueError(f"unknown norm kind {self.kind!r}")

    # constructors
    @classmethod
    def lp(cls, dim: int, p: float, label: str = "", **kw) -> "NormedSpace":
        return cls(dim=dim, kind="lp", p=float(p), label=label or f"l{p}^{dim}", **kw)

    @classmethod
    def linf(cls, dim: int, **kw) -> "NormedSpace":
        return cls.lp(dim, np.inf, label=kw.pop("label", f"linf^{dim}"), **kw)

    @classmethod
    def l1(cls, dim: int, **kw) -> "NormedSpace":
        return cls.lp(dim, 1.0, **kw)

    @classmethod
    def l2(cls, dim: int, **kw) -> "NormedSpace":
        return cls.lp(dim, 2.0, **kw)

    @classmethod
    def from_vertices(cls, vertices, label: str = "", symmetric: bool = False, **kw) -> "NormedSpace":
        V = _as_matrix(vertices)
        if not symmetric:
            V = symmetrize(V)
        return cls(dim=V.shape[1], kind="vertices", points=V, label=label or "polytope", **kw)

    @classmethod
    def from_facets(cls, facets, label: str = "", symmetric: bool = False, **kw) -> "NormedSpace":
        F = _as_matrix(facets)
        if not symmetric:
            F = symmetrize(F)
        return cls(dim=F.shape[1], kind="facets", points=F, label=label or "polytope", **kw)

    # structure
    @property
    def is_polyhedral(self) -> bool:
        # a one-dimensional ball is a segment whatever the norm
        return self.kind != "lp" or self.p in (1.0, np.inf) or self.dim <= 1

    @property
    def plain(self) -> bool:
        return self.kind == "lp" and self.transform is None

    @property
    def _L(self) -> np.ndarray:
        return np.eye(self.dim) if self.transform is None else self.transform

    @cached_property
    def facet_matrix(self) -> np.ndarray | None:
        """Dual-ball extreme points up to sign, or ``None`` if not enumerable."""
        t = self.tol
        if self.kind == "lp" and self.dim == 1 and self.p not in (1.0, np.inf):
            return np.array([[float(self.norm(np.ones(1)))]])
        if self.kind == "facets":
            F = half_representatives(self.points)
        elif self.kind == "lp" and np.isinf(self.p):
            F = half_representatives(self._L)
        elif self.kind == "lp" and self.p == 1:
            N = self._L.shape[0]
            if N > min(t.enum_cap, 16):
                return None
            signs = np.array(list(itertools.product([1.0, -1.0], repeat=N - 1)))
            signs = np.hstack([np.ones((len(signs), 1)), signs]) if N > 1 else np.ones((1, 1))
            F = signs @ self._L
        elif self.kind == "vertices":
            if self.dim > t.convert_cap:
                return None
            return polar_vertices(self.points)
        else:
            return None
        if 1 < self.dim <= t.convert_cap and len(F) > 2 * self.dim:
            F = essential_points(F)
        return F

    @cached_property
    def vertex_matrix(self) -> np.ndarray | None:
        """Unit-ball extreme points up to sign, or ``None`` if not enumerable."""
        t = self.tol
        if self.kind == "vertices":
            return half_representatives(self.points)
        if self.plain and self.p == 1:
            return np.eye(self.dim)
        if self.kind == "lp" and self.dim == 1:
            return np.array([[1.0 / float(self.norm(np.ones(1)))]])
        if self.plain and np.isinf(self.p):
            if self.dim > min(t.enum_cap, 12):
                return None
            return _sign_vectors(self.dim)
        if self.is_polyhedral and self.dim <= t.convert_cap:
            F = self.facet_matrix
            if F is None:
                return None
            return polar_vertices(F)
        return None

    # evaluation
    def norm(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"vector of length {x.shape[-1]} in space of dimension {self.dim}")
        if self.dim == 0:
            return np.zeros(x.shape[:-1]) if x.ndim > 1 else 0.0
        if self.kind == "lp":
            y = x if self.transform is None else x @ self.transform.T
            return np.linalg.norm(y, ord=self.p, axis=-1)
        F = self.facet_matrix
        if F is not None:
            return np.abs(x @ F.T).max(axis=-1)
        if x.ndim > 1:
            return np.array([self._gauge_lp(v) for v in x])
        return self._gauge_lp(x)

    def _gauge_lp(self, x: np.ndarray) -> float:
        return self._vertex_dual_lp(x)[0]

    def _vertex_dual_lp(self, y: np.ndarray):
        # max y.g  s.t. |V g| <= 1 ; value = gauge of y in conv(+-V)
        V = half_representatives(self.points)
        A = np.vstack([V, -V])
        res = solve_lp(-y, A, np.ones(len(A)), free=np.ones(self.dim, dtype=bool))
        return -res.fun, res.x

    def dual_norm(self, u) -> tuple[float, np.ndarray]:
        """Return ``(||u||_*, x)`` with ``norm(x) <= 1`` and ``u . x = ||u||_*``."""
        u = np.asarray(u, dtype=float)
        if self.plain:
            p = self.p
            q = np.inf if p == 1 else (1.0 if np.isinf(p) else p / (p - 1))
            val = float(np.linalg.norm(u, q))
            return val, holder_dual(u, q) if val > 0 else np.zeros_like(u)
        if self.kind == "lp" and self.p == 2:
            R = np.linalg.qr(self.transform, mode="r")
            w = np.linalg.solve(R.T, u)
            val = float(np.linalg.norm(w))
            x = np.linalg.solve(R, w / val) if val > 0 else np.zeros_like(u)
            return val, x
        V = self.vertex_matrix
        if V is not None:
            s = V @ u
            i = int(np.argmax(np.abs(s)))
            return float(abs(s[i])), V[i] * (1.0 if s[i] >= 0 else -1.0)
        if self.kind == "lp" and self.p == 1:
            # max u.x s.t. sum |Lx| <= 1, variables (x free, s >= 0)
            L = self.transform
            N, d = L.shape
            c = np.concatenate([-u, np.zeros(N)])
            A = np.block([[L, -np.eye(N)], [-L, -np.eye(N)], [np.zeros((1, d)), np.ones((1, N))]])
            b = np.concatenate([np.zeros(2 * N), [1.0]])
            free = np.concatenate([np.ones(d, bool), np.zeros(N, bool)])
            res = solve_lp(c, A, b, free=free)
            return -res.fun, res.x[:d]
        F = self.facet_matrix
        if F is not None:
            A = np.vstack([F, -F])
            res = solve_lp(-u, A, np.ones(len(A)), free=np.ones(self.dim, dtype=bool))
            return -res.fun, res.x
        if self.kind == "vertices":
            V = half_representatives(self.points)
            s = V @ u
            i = int(np.argmax(np.abs(s)))
            return float(abs(s[i])), V[i] * (1.0 if s[i] >= 0 else -1.0)
        raise NoExactStrategyError(f"no exact dual norm for {self.describe()}")

    def norming_functional(self, y) -> np.ndarray:
        """Functional ``g`` with ``||g||_* <= 1`` and ``g . y = ||y||``."""
        y = np.asarray(y, dtype=float)
        if self.kind == "lp":
            L = self._L
            return L.T @ holder_dual(L @ y, self.p)
        F = self.facet_matrix
        if F is not None:
            s = F @ y
            i = int(np.argmax(np.abs(s)))
            return F[i] * (1.0 if s[i] >= 0 else -1.0)
        return self._vertex_dual_lp(y)[1]

    def describe(self) -> str:
        if self.kind == "lp":
            p = "inf" if np.isinf(self.p) else f"{self.p:g}"
            tail = "" if self.transform is None else " (section)"
            return f"l{p}^{self.dim}{tail}"
        return f"{self.kind}-polytope in R^{self.dim} ({len(self.points)} points)"


def _sign_vectors(n: int) -> np.ndarray:
    """All sign vectors of length ``n`` with first entry +1."""
    if n == 0:
        return np.zeros((1, 0))
    rest = np.array(list(itertools.product([1.0, -1.0], repeat=n - 1))).reshape(-1, n - 1)
    return np.hstack([np.ones((len(rest), 1)), rest])


def eval_norm(space: "NormedSpace | Subspace", x) -> float:
    """Norm of ``x`` in ``space`` (coordinates for a :class:`Subspace`)."""
    if isinstance(space, Subspace):
        space = space.induced
    return space.norm(x)


@dataclass(frozen=True, eq=False)
class Subspace:
    ambient: NormedSpace
    basis: np.ndarray
    label: str = ""

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if B.size == 0:
            B = np.zeros((self.ambient.dim, 0))
        if B.shape[0] != self.ambient.dim:
            raise ValueError(f"basis vectors of length {B.shape[0]} in ambient of dimension {self.ambient.dim}")
        if B.shape[1]:
            s = np.linalg.svd(B, compute_uv=False)
            if s[-1] <= self.ambient.tol.rank * max(1.0, s[0]):
                raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "basis", B)

    @classmethod
    def span(cls, ambient: NormedSpace, vectors, label: str = "") -> "Subspace":
        """Subspace spanned by the rows of ``vectors``."""
        V = np.asarray(vectors, dtype=float).reshape(-1, ambient.dim)
        return cls(ambient, V.T, label)

    @classmethod
    def whole(cls, ambient: NormedSpace) -> "Subspace":
        return cls(ambient, np.eye(ambient.dim), ambient.label)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def orthonormal(self) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((self.ambient.dim, 0))
        return np.linalg.qr(self.basis)[0]

    @cached_property
    def complement(self) -> np.ndarray:
        """Orthonormal basis (columns) of the Euclidean orthogonal complement."""
        N = self.ambient.dim
        if self.dim == 0:
            return np.eye(N)
        u, s, vt = np.linalg.svd(self.basis, full_matrices=True)
        return u[:, self.dim:]

    @cached_property
    def induced(self) -> NormedSpace:
        """The subspace as a normed space in basis coordinates."""
        amb = self.ambient
        B = self.basis
        if amb.kind == "lp":
            L = amb._L @ B
            return NormedSpace(self.dim, "lp", p=amb.p, transform=L, label=self.label, tol=amb.tol)
        F = amb.facet_matrix
        if F is None:
            raise NoExactStrategyError(
                f"sections of {amb.describe()} need a facet description (dim <= {amb.tol.convert_cap})")
        G = F @ B
        return NormedSpace.from_facets(G, label=self.label, tol=amb.tol)

    def norm(self, c):
        return self.induced.norm(c)

    def embed(self, c) -> np.ndarray:
        return np.asarray(c, dtype=float) @ self.basis.T

    def coords(self, x) -> tuple[np.ndarray, float]:
        """Least-squares basis coordinates of ``x`` and the Euclidean residual."""
        x = np.asarray(x, dtype=float)
        if self.dim == 0:
            return np.zeros(x.shape[:-1] + (0,)), float(np.linalg.norm(x))
        c, *_ = np.linalg.lstsq(self.basis, x.T, rcond=None)
        r = self.basis @ c - x.T
        return c.T, float(np.abs(r).max(initial=0.0))

    def distance(self, vectors) -> float:
        """Max Euclidean distance of the rows of ``vectors`` to this span."""
        X = np.atleast_2d(np.asarray(vectors, dtype=float))
        if X.size == 0:
            return 0.0
        Q = self.orthonormal
        R = X.T - Q @ (Q.T @ X.T)
        return float(np.linalg.norm(R, axis=0).max())

    def contains(self, other: "Subspace", tol: float | None = None) -> bool:
        tol = self.ambient.tol.rank if tol is None else tol
        if other.dim == 0:
            return True
        scale = max(1.0, float(np.abs(other.basis).max()))
        return self.distance(other.basis.T) <= tol * scale

    def __add__(self, other: "Subspace") -> "Subspace":
        B = np.hstack([self.basis, other.basis])
        u, s, _ = np.linalg.svd(B, full_matrices=False)
        r = int(np.sum(s > self.ambient.tol.rank * max(1.0, s[0] if s.size else 1.0)))
        if r == B.shape[1]:
            return Subspace(self.ambient, B)
        return Subspace(self.ambient, u[:, :r])


Space = Union[NormedSpace, Subspace]


def frame(space: Space) -> tuple[NormedSpace, np.ndarray]:
    """``(ambient, basis)`` for a space or subspace."""
    if isinstance(space, Subspace):
        return space.ambient, space.basis
    return space, np.eye(space.dim)


def induced(space: Space) -> NormedSpace:
    return space.induced if isinstance(space, Subspace) else space


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Dense operator in the coordinates of its domain and codomain."""
    domain: Space
    codomain: Space
    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 and M.size == self.codomain.dim * self.domain.dim:
            M = M.reshape(self.codomain.dim, self.domain.dim)
        if M.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(f"matrix shape {M.shape} does not match "
                             f"({self.codomain.dim}, {self.domain.dim})")
        object.__setattr__(self, "matrix", M)

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.matrix.T

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if other.codomain.dim != self.domain.dim:
            raise ValueError(f"cannot compose: inner codomain dim {other.codomain.dim} "
                             f"!= outer domain dim {self.domain.dim}")
        return LinearMap(other.domain, self.codomain, self.matrix @ other.matrix)

    @classmethod
    def identity(cls, space: Space) -> "LinearMap":
        return cls(space, space, np.eye(space.dim))

    def ambient_matrix(self) -> np.ndarray:
        """Matrix acting on ambient vectors of the domain (zero off its span)."""
        _, Bd = frame(self.domain)
        _, Bc = frame(self.codomain)
        return Bc @ self.matrix @ np.linalg.pinv(Bd)


@dataclass
class NormResult:
    value: float
    certificate: str
    lower: float
    upper: float
    witness: np.ndarray | None
    strategy: str

    def __float__(self):
        return float(self.value)


def _exact(value, witness, strategy) -> NormResult:
    value = float(value)
    return NormResult(value, "exact", value, value, witness, strategy)


def operator_norm(T: LinearMap, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> NormResult:
    """Operator norm of ``T`` with its certificate.

    Exact whenever the codomain's dual ball or the domain's ball has
    enumerable extreme points (or both sides are Euclidean); otherwise a
    certified bracket for smooth pairs.  Polyhedral pairs beyond the
    enumeration caps raise :class:`NoExactStrategyError`.
    """
    dom = induced(T.domain)
    cod = induced(T.codomain)
    C = T.matrix
    if C.size == 0 or dom.dim == 0:
        return _exact(0.0, np.zeros(dom.dim), "trivial")
    if cod.dim == 0:
        return _exact(0.0, np.zeros(dom.dim), "trivial")

    F = cod.facet_matrix
    closed_dual = dom.plain or (dom.kind == "lp" and dom.p == 2) or dom.vertex_matrix is not None
    if F is not None and closed_dual:
        U = F @ C
        if dom.plain:
            p = dom.p
            q = np.inf if p == 1 else (1.0 if np.isinf(p) else p / (p - 1))
            vals = np.linalg.norm(U, q, axis=1)
        elif dom.vertex_matrix is not None:
            vals = np.abs(U @ dom.vertex_matrix.T).max(axis=1)
        else:
            R = np.linalg.qr(dom.transform, mode="r")
            vals = np.linalg.norm(np.linalg.solve(R.T, U.T), axis=0)
        i = int(np.argmax(vals))
        _, x = dom.dual_norm(U[i])
        return _exact(vals[i], x, "codomain-facets")

    V = dom.vertex_matrix
    if V is None and dom.plain and np.isinf(dom.p) and dom.dim <= tol.enum_cap:
        best, arg = -1.0, None
        for chunk in _sign_chunks(dom.dim):
            vals = np.atleast_1d(cod.norm(chunk @ C.T))
            j = int(np.argmax(vals))
            if vals[j] > best:
                best, arg = float(vals[j]), chunk[j]
        return _exact(best, arg, "domain-signs")
    if V is not None:
        vals = np.atleast_1d(cod.norm(V @ C.T))
        j = int(np.argmax(vals))
        return _exact(vals[j], V[j], "domain-vertices")

    if F is not None:
        best, arg = -1.0, None
        for f in F:
            val, x = dom.dual_norm(C.T @ f)
            if val > best:
                best, arg = val, x
        return _exact(best, arg, "codomain-facets-lp")

    if dom.kind == "lp" and cod.kind == "lp" and dom.p == 2 and cod.p == 2:
        Rd = np.linalg.qr(dom._L, mode="r")
        Rc = np.linalg.qr(cod._L, mode="r")
        K = Rc @ C @ np.linalg.inv(Rd)
        _, s, vt = np.linalg.svd(K)
        x = np.linalg.solve(Rd, vt[0])
        return _exact(s[0], x, "euclidean-svd")

    if dom.is_polyhedral or cod.is_polyhedral:
        raise NoExactStrategyError(
            f"no exact strategy for {dom.describe()} -> {cod.describe()} within caps "
            f"(enum_cap={tol.enum_cap}, convert_cap={tol.convert_cap})")

    # smooth pair: sampled lower bound refined by the nonlinear power method,
    # column-sum and (for equal exponents) Schur-test upper bounds
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((tol.samples, dom.dim))
    ratios = np.atleast_1d(cod.norm(X @ C.T)) / np.atleast_1d(dom.norm(X))
    j = int(np.argmax(ratios))
    lower, x_best = float(ratios[j]), X[j] / dom.norm(X[j])
    upper = 0.0
    for k in range(dom.dim):
        e = np.zeros(dom.dim)
        e[k] = 1.0
        try:
            dk = dom.dual_norm(e)[0]
        except NoExactStrategyError:
            raise NoExactStrategyError(f"no upper bound available for {dom.describe()}") from None
        upper += float(cod.norm(C[:, k])) * dk
    if dom.kind == "lp" and cod.kind == "lp" and dom.p == cod.p and dom._L.shape[0] == dom.dim:
        K = np.abs(cod._L @ C @ np.linalg.inv(dom._L))
        p = dom.p
        schur = K.sum(axis=0).max() ** (1 / p) * K.sum(axis=1).max() ** (1 - 1 / p)
        upper = min(upper, float(schur))
        lower, x_best = _power_refine(dom, cod, C, x_best, lower)
    upper = max(upper, lower)
    return NormResult(upper, "bracket", lower, upper, x_best, "sampled-bracket")


def _power_refine(dom, cod, C, x, value, steps: int = 100):
    """Nonlinear power iteration for ``||L_c C L_d^-1||_{p->p}``; never decreases ``value``."""
    Ld_inv = np.linalg.inv(dom._L)
    K = cod._L @ C @ Ld_inv
    p = dom.p
    q = p / (p - 1)
    u = dom._L @ x
    for _ in range(steps):
        y = K @ u
        ny = np.linalg.norm(y, p)
        if ny == 0:
            break
        z = K.T @ holder_dual(y, p)
        u_new = holder_dual(z, q)
        val = float(np.linalg.norm(K @ u_new, p))
        if val <= value * (1 + 1e-13):
            break
        u, value = u_new, val
    return value, Ld_inv @ u / np.linalg.norm(u, p)


def _sign_chunks(n: int, chunk_bits: int = 14):
    if n <= chunk_bits + 1:
        yield _sign_vectors(n)
        return
    low = _sign_vectors(chunk_bits + 1)[:, 1:]
    for hi in _sign_vectors(n - chunk_bits):
        yield np.hstack([np.tile(hi, (len(low), 1)), low])


@dataclass
class QuotientResult:
    value: float
    minimizer: np.ndarray
    certificate: str
    lower: float


class QuotientConvergenceError(RuntimeError):
    def __init__(self, msg, lower, upper):
        super().__init__(f"{msg}: bracket [{lower:.6g}, {upper:.6g}]")
        self.lower, self.upper = lower, upper


def quotient_norm(Z: NormedSpace, Y: Subspace, z, tol: Tolerances = DEFAULT_TOL) -> QuotientResult:
    """``inf_{y in Y} ||z - y||_Z`` together with the minimizing ``y``."""
    z = np.asarray(z, dtype=float)
    if z.shape != (Z.dim,):
        raise ValueError("z must be a vector of the ambient space")
    B = Y.basis
    d = Y.dim
    if d == 0:
        v = float(Z.norm(z))
        return QuotientResult(v, np.zeros(Z.dim), "exact", v)
    if Z.kind == "lp" and Z.p == 2 and Z.transform is None:
        Q = Y.orthonormal
        y = Q @ (Q.T @ z)
        v = float(np.linalg.norm(z - y))
        return QuotientResult(v, y, "exact", v)
    if Z.is_polyhedral:
        N = Z.dim
        if Z.plain and np.isinf(Z.p):
            # min t s.t. -t <= z - Bc <= t ; vars (c free, t)
            c = np.zeros(d + 1)
            c[-1] = 1
            A = np.block([[-B, -np.ones((N, 1))], [B, -np.ones((N, 1))]])
            b = np.concatenate([-z, z])
            free = np.concatenate([np.ones(d, bool), [False]])
            res = solve_lp(c, A, b, free=free)
            coef = res.x[:d]
        elif Z.plain and Z.p == 1:
            c = np.concatenate([np.zeros(d), np.ones(N)])
            A = np.block([[-B, -np.eye(N)], [B, -np.eye(N)]])
            b = np.concatenate([-z, z])
            free = np.concatenate([np.ones(d, bool), np.zeros(N, bool)])
            res = solve_lp(c, A, b, free=free)
            coef = res.x[:d]
        elif Z.facet_matrix is not None:
            F = Z.facet_matrix
            k = len(F)
            c = np.zeros(d + 1)
            c[-1] = 1
            A = np.block([[-F @ B, -np.ones((k, 1))], [F @ B, -np.ones((k, 1))]])
            b = np.concatenate([-F @ z, F @ z])
            free = np.concatenate([np.ones(d, bool), [False]])
            res = solve_lp(c, A, b, free=free)
            coef = res.x[:d]
        else:
            # z - Bc = V^T lam, lam >= 0, min sum lam
            V = np.vstack([half_representatives(Z.points), -half_representatives(Z.points)])
            k = len(V)
            c = np.concatenate([np.zeros(d), np.ones(k)])
            A_eq = np.hstack([B, V.T])
            free = np.concatenate([np.ones(d, bool), np.zeros(k, bool)])
            res = solve_lp(c, A_eq=A_eq, b_eq=z, free=free)
            coef = res.x[:d]
        y = B @ coef
        v = float(Z.norm(z - y))
        return QuotientResult(v, y, "exact", v)

    # smooth non-Euclidean: convex minimization with a dual lower bound
    from scipy.optimize import minimize

    p = Z.p
    L = Z._L

    def f(c):
        r = L @ (z - B @ c)
        return np.sum(np.abs(r) ** p)

    def g(c):
        r = L @ (z - B @ c)
        return -(B.T @ (L.T @ (p * np.sign(r) * np.abs(r) ** (p - 1))))

    c0 = np.linalg.lstsq(B, z, rcond=None)[0]
    res = minimize(f, c0, jac=g, method="BFGS", options={"gtol": 1e-12, "maxiter": 2000})
    y = B @ res.x
    upper = float(Z.norm(z - y))
    # dual certificate: norming functional of the residual projected onto Y's annihilator
    gfun = Z.norming_functional(z - y)
    Q = Y.orthonormal
    h = gfun - Q @ (Q.T @ gfun)
    hn = Z.dual_norm(h)[0] if Z.plain else None
    lower = float(h @ z / hn) if hn else 0.0
    if upper - lower > tol.opt * max(1.0, upper):
        raise QuotientConvergenceError("quotient norm did not converge", lower, upper)
    return QuotientResult(upper, y, "converged", lower)
