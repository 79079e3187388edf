"""Relative projection constants, near-minimal projections and l_inf embeddings."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .normlp import NormTerm, minimize_max_norm
from .projections import Projection, coords_in, free_directions
from .spaces import (
    DEFAULT_TOL,
    NoExactStrategyError,
    NormedSpace,
    Space,
    Subspace,
    Tolerances,
    frame,
    induced,
    operator_norm,
    polar_vertices,
)


@dataclass
class MinProjResult:
    lam: float
    projection: Projection
    certificate: str          # "exact_lp" | "subgradient" | "trivial"
    tau: float
    lower: float
    upper: float
    iterations: int = 0
    flagged: bool = False
    trace: list = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.upper / max(self.lower, 1e-300) - 1.0


def _orthogonal_start(Y: Subspace, X: Space) -> tuple[np.ndarray, np.ndarray]:
    _, BX = frame(X)
    J = coords_in(X, Y)
    W0 = np.linalg.pinv(Y.basis) @ BX
    return J, W0


def lambda_relative(Y: Subspace, X: Space | None = None, tau: float = 0.05,
                    tol: Tolerances = DEFAULT_TOL, method: str = "auto",
                    max_iter: int = 10_000, seed: int = 0) -> MinProjResult:
    """``lambda(Y, X)`` with a projection attaining it (exactly, or within ``tau``).

    Polyhedral ``X`` is solved as one LP over the free block of the
    projection; smooth ``X`` falls back to a subgradient method on the affine
    family of projections onto ``Y``.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    X = Y.ambient if X is None else X
    J, W0 = _orthogonal_start(Y, X)
    dY, dX = J.shape[1], J.shape[0]
    if dY == 0:
        P = Projection(X, Y, np.zeros((0, dX)))
        return MinProjResult(0.0, P, "trivial", 0.0, 0.0, 0.0)
    if dY == dX:
        P = Projection(X, Y, np.linalg.inv(J))
        return MinProjResult(1.0, P, "trivial", 0.0, 1.0, 1.0)

    Xn, Yn = induced(X), induced(Y)
    if Xn.kind == "lp" and Xn.p == 2:
        # orthogonal projection in the Euclidean structure of X has norm 1
        R = np.linalg.qr(Xn._L, mode="r")
        G = R.T @ R
        W = np.linalg.solve(J.T @ G @ J, J.T @ G)
        P = Projection(X, Y, W)
        return MinProjResult(1.0, P, "exact_lp", 0.0, 1.0, float(P.norm(tol).value))

    try:
        W, t, lp = _entrywise_lp(J, Xn, Yn, method)
    except NoExactStrategyError:
        if Xn.is_polyhedral:
            raise
        return _subgradient(Y, X, J, W0, free_directions(J), tau, tol, max_iter, seed)
    P = Projection(X, Y, W)
    achieved = float(P.norm(tol).value)
    return MinProjResult(achieved, P, "exact_lp", 0.0, min(t, achieved), achieved,
                         iterations=lp.iterations)


def _entrywise_lp(J, Xn, Yn, method):
    """LP over the entries of ``W`` subject to ``W J = I``.

    Parameterizing by raw entries keeps every constraint row sparse, which
    matters once the ambient has dozens of coordinates.
    """
    dX, dY = J.shape
    R = dY * dX
    dirs = np.zeros((R, dY, dX))
    dirs[np.arange(R), np.repeat(np.arange(dY), dX), np.tile(np.arange(dX), dY)] = 1.0
    C = np.zeros((dY * dY, R))
    for a in range(dY):
        for c in range(dY):
            C[a * dY + c, a * dX:(a + 1) * dX] = J[:, c]
    d = np.eye(dY).ravel()
    term = NormTerm(np.zeros((dY, dX)), dirs, Xn, Yn)
    theta, t, lp = minimize_max_norm([term], R, method=method, theta_eq=(C, d))
    W = theta.reshape(dY, dX)
    # remove solver round-off from the projection identity
    W = W - (W @ J - np.eye(dY)) @ np.linalg.pinv(J)
    return W, t, lp


def _subgradient(Y, X, J, W0, dirs, tau, tol, max_iter, seed) -> MinProjResult:
    Xn, Yn = induced(X), induced(Y)
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((tol.samples, Xn.dim))
    S /= np.atleast_1d(Xn.norm(S))[:, None]
    D = np.asarray(dirs)

    def objective(W):
        vals = np.atleast_1d(Yn.norm(S @ W.T))
        j = int(np.argmax(vals))
        return float(vals[j]), S[j]

    W = W0.copy()
    theta = np.zeros(len(D))
    f0, _ = objective(W)
    c = f0
    best_f, best_theta = f0, theta.copy()
    trace = [f0]
    it = 0
    for it in range(1, max_iter + 1):
        f, x = objective(W)
        if f < best_f:
            best_f, best_theta = f, theta.copy()
        g_dual = Yn.norming_functional(W @ x)
        grad = np.einsum("a,rab,b->r", g_dual, D, x)
        gn = np.linalg.norm(grad)
        if gn == 0:
            break
        theta = theta - (c / np.sqrt(it)) * grad / gn * 0.1
        W = W0 + np.tensordot(theta, D, axes=1)
        if it % 100 == 0:
            trace.append(best_f)
    W = W0 + np.tensordot(best_theta, D, axes=1)
    P = Projection(X, Y, W)
    res = operator_norm(P.map, tol, seed)
    lower = 1.0               # every projection onto a nonzero subspace has norm >= 1
    upper = float(res.upper)
    flagged = upper > (1.0 + tau) * lower
    return MinProjResult(upper, P, "subgradient", tau, lower, upper, iterations=it,
                         flagged=flagged, trace=trace)


@dataclass
class Embedding:
    ambient: NormedSpace
    copy: Subspace
    eta: float
    eta_certificate: str      # "exact" | "sampled"
    functionals: np.ndarray   # m x dim, each of dual norm one

    @property
    def flagged(self) -> bool:
        return self.eta_certificate != "exact"


def _dual_normalize(Y: NormedSpace, U: np.ndarray) -> np.ndarray:
    norms = np.array([Y.dual_norm(u)[0] for u in U])
    return U / norms[:, None]


def _directions(Y: NormedSpace, m: int, scheme: str, seed: int) -> np.ndarray:
    d = Y.dim
    if scheme == "seeded" or d > 3:
        rng = np.random.default_rng(seed)
        return rng.standard_normal((m, d))
    if d == 1:
        return np.array([[(-1.0) ** i] for i in range(m)])
    if d == 2:
        t = 2 * np.pi * np.arange(m) / m
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    # Fibonacci spiral on the sphere
    i = np.arange(m) + 0.5
    z = 1 - 2 * i / m
    r = np.sqrt(1 - z ** 2)
    phi = np.pi * (1 + 5 ** 0.5) * i
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def embed_into_linf(Y: NormedSpace, m: int, scheme: str = "grid", seed: int = 0,
                    eta_target: float | None = None, tol: Tolerances = DEFAULT_TOL) -> Embedding:
    """Embed ``Y`` into ``l_inf^m`` through ``m`` norm-one functionals.

    ``eta`` bounds the distortion: ``(1 - eta)||y|| <= max_i |f_i y| <= ||y||``.
    It is exact (through the vertices of the embedded ball) when
    ``dim Y <= tol.convert_cap`` and a sampled estimate otherwise.
    """
    d = Y.dim
    if scheme not in ("grid", "seeded"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if m < d:
        raise ValueError(f"m={m} is smaller than dim Y={d}")
    U = np.zeros((0, d))
    if Y.is_polyhedral and Y.facet_matrix is not None and scheme == "grid":
        U = Y.facet_matrix[:m]
    if len(U) < m:
        extra = _directions(Y, m - len(U), scheme, seed)
        if Y.kind == "lp" and Y.p != 2 and d > 1:
            # points of the dual sphere: Holder duals of primal directions
            extra = np.array([Y.norming_functional(v) for v in extra])
        U = np.vstack([U, extra])
    U = _dual_normalize(Y, U)
    if np.linalg.matrix_rank(U) < d:
        raise ValueError(f"m={m} functionals do not span the dual of a {d}-dimensional space")
    amb = NormedSpace.linf(m)
    copy = Subspace(amb, U, label=f"copy of {Y.label or Y.describe()}")
    if d <= tol.convert_cap:
        V = polar_vertices(U) if d > 1 else np.array([[1.0 / np.abs(U).max()]])
        r = float(np.max(np.atleast_1d(Y.norm(V))))
        eta, cert = max(0.0, 1.0 - 1.0 / r), "exact"
    else:
        rng = np.random.default_rng(seed)
        S = rng.standard_normal((tol.samples, d))
        ratio = np.abs(S @ U.T).max(axis=1) / np.atleast_1d(Y.norm(S))
        eta, cert = max(0.0, 1.0 - float(ratio.min())), "sampled"
    if eta < 1e-13:
        eta = 0.0
    if eta_target is not None and eta > eta_target:
        raise ValueError(f"m={m} reaches eta={eta:.4g} > requested {eta_target:.4g}")
    return Embedding(amb, copy, eta, cert, U)


@dataclass
class AbsoluteEstimate:
    m: int
    eta: float
    eta_certificate: str
    result: MinProjResult

    @property
    def lam(self) -> float:
        return self.result.lam


def lambda_absolute_approx(Y: NormedSpace, m_list, scheme: str = "grid", seed: int = 0,
                           tau: float = 0.05, tol: Tolerances = DEFAULT_TOL) -> list[AbsoluteEstimate]:
    """``lambda(copy of Y, l_inf^m)`` for each ``m``, with the embedding distortion."""
    out = []
    for m in m_list:
        emb = embed_into_linf(Y, m, scheme, seed, tol=tol)
        res = lambda_relative(emb.copy, emb.ambient, tau=tau, tol=tol)
        out.append(AbsoluteEstimate(m, emb.eta, emb.eta_certificate, res))
    return out


def euclidean_estimate(n: int, m: int = 64, scheme: str = "grid", seed: int = 0,
                       tol: Tolerances = DEFAULT_TOL) -> AbsoluteEstimate:
    """Estimate of ``lambda(l_2^n)`` at resolution ``m``."""
    return lambda_absolute_approx(NormedSpace.l2(n), [m], scheme, seed, tol=tol)[0]
