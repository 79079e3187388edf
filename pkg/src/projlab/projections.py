"""Projections, factorization through an intermediate subspace, and chains.

Maps are stored in basis coordinates: a projection from ``X`` onto ``Y``
is a ``dim Y x dim X`` matrix, and ``inclusion`` expresses ``Y``'s basis in
``X``'s coordinates, so the operator on ``X`` is ``inclusion @ matrix``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .normlp import NormTerm, minimize_max_norm
from .spaces import (
    DEFAULT_TOL,
    LinearMap,
    NoExactStrategyError,
    NormedSpace,
    NormResult,
    Space,
    Subspace,
    Tolerances,
    frame,
    induced,
    operator_norm,
)


class ProjectionError(ValueError):
    pass


def coords_in(space: Space, sub: Subspace, tol: float = 1e-10) -> np.ndarray:
    """Coordinates of ``sub``'s basis vectors in the frame of ``space``."""
    amb, B = frame(space)
    if sub.ambient.dim != amb.dim:
        raise ProjectionError("subspace lives in a different ambient space")
    if sub.dim == 0:
        return np.zeros((B.shape[1], 0))
    J, *_ = np.linalg.lstsq(B, sub.basis, rcond=None)
    resid = np.abs(B @ J - sub.basis).max()
    if resid > tol * max(1.0, np.abs(sub.basis).max()):
        raise ProjectionError(f"subspace is not contained in {getattr(space, 'label', '') or 'the domain'} "
                              f"(residual {resid:.2e})")
    return J


@dataclass(frozen=True, eq=False)
class Projection:
    domain: Space
    image: Subspace
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float).reshape(self.image.dim, self.domain.dim)
        object.__setattr__(self, "matrix", M)
        if self.check:
            res = self.certify()
            tol = 1e-9
            if res["idempotence"] > tol or res["image"] > tol:
                raise ProjectionError(f"not a projection onto the image: {res}")

    @property
    def inclusion(self) -> np.ndarray:
        return coords_in(self.domain, self.image)

    @property
    def operator(self) -> np.ndarray:
        """Matrix of the projection as an operator on the domain."""
        return self.inclusion @ self.matrix

    @property
    def map(self) -> LinearMap:
        return LinearMap(self.domain, self.image, self.matrix)

    def ambient_operator(self) -> np.ndarray:
        """The projection acting on ambient vectors (zero off the domain span)."""
        _, B = frame(self.domain)
        return self.image.basis @ self.matrix @ np.linalg.pinv(B)

    def norm(self, tol: Tolerances = DEFAULT_TOL) -> NormResult:
        return operator_norm(self.map, tol)

    def certify(self) -> dict:
        """Residuals: ``||P^2 - P||`` (operator norm) and ``max|P|_Y - id|``."""
        J = self.inclusion
        E = J @ self.matrix
        D = E @ E - E
        image_res = float(np.abs(self.matrix @ J - np.eye(self.image.dim)).max(initial=0.0))
        if not np.any(D):
            idem = 0.0
        else:
            try:
                idem = operator_norm(LinearMap(self.domain, self.domain, D)).value
            except NoExactStrategyError:
                idem = float(np.abs(D).sum(axis=1).max())
        return {"idempotence": float(idem), "image": image_res}

    def kernel(self) -> np.ndarray:
        """Basis (columns, domain coordinates) of the kernel."""
        if self.image.dim == 0:
            return np.eye(self.domain.dim)
        _, s, vt = np.linalg.svd(self.matrix)
        return vt[self.image.dim:].T


def orthogonal_projection(domain: Space, target: Subspace) -> Projection:
    """Euclidean-orthogonal projection of ``domain`` onto ``target``."""
    _, B = frame(domain)
    W = np.linalg.pinv(target.basis) @ B
    return Projection(domain, target, W)


def make_projection(domain: Space, target: Subspace, kernel: Subspace) -> Projection:
    """Projection of ``domain`` onto ``target`` along ``kernel``."""
    Jt = coords_in(domain, target)
    Jk = coords_in(domain, kernel)
    G = np.hstack([Jt, Jk])
    n = domain.dim
    if G.shape[1] != n:
        raise ProjectionError(f"dim target + dim kernel = {G.shape[1]} != {n}")
    s = np.linalg.svd(G, compute_uv=False) if n else np.zeros(0)
    if n and s[-1] <= 1e-10 * max(1.0, s[0]):
        raise ProjectionError("target and kernel intersect nontrivially")
    Ginv = np.linalg.inv(G) if n else np.zeros((0, 0))
    return Projection(domain, target, Ginv[:target.dim])


def factor_through(P: Projection, X2: Subspace) -> tuple[Projection, Projection]:
    """Split ``P: X3 -> X1`` as ``P1 @ P2`` with ``P2: X3 -> X2`` and ``P1 = P|_X2``.

    ``ker P1 = ker P cap X2``; ``ker P2`` is the Euclidean-orthogonal complement
    of ``ker P1`` inside ``ker P``.
    """
    X3, X1 = P.domain, P.image
    J2 = coords_in(X3, X2)           # X2 inside X3 coordinates
    coords_in(X2, X1)                # X1 inside X2, raises otherwise
    M1 = P.matrix @ J2               # P restricted to X2, X1 coords
    P1 = Projection(X2, X1, M1)

    amb, B3 = frame(X3)
    kerP = P.kernel()                            # X3 coords
    K1 = P1.kernel()                             # X2 coords
    kerP1_amb = B3 @ (J2 @ K1)
    kerP_amb = B3 @ kerP
    # orthogonal complement of ker P1 inside ker P (ambient Euclidean geometry)
    Qk = np.linalg.qr(kerP_amb)[0] if kerP_amb.shape[1] else kerP_amb
    if kerP1_amb.shape[1]:
        Q1 = np.linalg.qr(kerP1_amb)[0]
        R = Qk - Q1 @ (Q1.T @ Qk)
        u, s, _ = np.linalg.svd(R, full_matrices=False)
        r = kerP_amb.shape[1] - kerP1_amb.shape[1]
        comp = u[:, :r]
    else:
        comp = Qk
    kernel2 = Subspace(amb, comp)
    P2 = make_projection(X3, X2, kernel2)
    return P1, P2


@dataclass(frozen=True, eq=False)
class Chain:
    """Increasing subspaces ``X_1 < ... < X_L`` with optional steps ``P_n: X_{n+1} -> X_n``."""
    subspaces: tuple
    steps: tuple | None = None

    def __post_init__(self):
        subs = tuple(self.subspaces)
        object.__setattr__(self, "subspaces", subs)
        for a, b in zip(subs, subs[1:]):
            if not b.contains(a):
                raise ProjectionError("chain is not increasing")
            if a.dim > b.dim:
                raise ProjectionError("chain dimensions must be nondecreasing")
        if self.steps is not None:
            steps = tuple(self.steps)
            if len(steps) != len(subs) - 1:
                raise ProjectionError("need one step per consecutive pair")
            for n, P in enumerate(steps):
                if P.domain is not subs[n + 1] or P.image is not subs[n]:
                    # accept equal spans given by the same basis arrays
                    if P.domain.dim != subs[n + 1].dim or P.image.dim != subs[n].dim:
                        raise ProjectionError(f"step {n + 1} has wrong domain/image")
            object.__setattr__(self, "steps", steps)

    @property
    def length(self) -> int:
        return len(self.subspaces)

    @property
    def ambient(self) -> NormedSpace:
        return self.subspaces[0].ambient

    def with_steps(self, steps) -> "Chain":
        return Chain(self.subspaces, tuple(steps))

    def step_matrices(self) -> list[np.ndarray]:
        if self.steps is None:
            raise ProjectionError("chain has no steps")
        return [P.matrix for P in self.steps]

    def truncate(self, L: int) -> "Chain":
        steps = None if self.steps is None else self.steps[:L - 1]
        return Chain(self.subspaces[:L], steps)

    def subsequence(self, indices) -> "Chain":
        """Chain on ``X_{i_1} < X_{i_2} < ...`` (1-based) with composed steps."""
        idx = [i - 1 for i in indices]
        if sorted(idx) != idx or len(set(idx)) != len(idx):
            raise ProjectionError("subsequence indices must be strictly increasing")
        subs = [self.subspaces[i] for i in idx]
        steps = None
        if self.steps is not None:
            mats = self.step_matrices()
            steps = []
            for a, b in zip(idx, idx[1:]):
                M = np.eye(self.subspaces[a].dim)
                for j in range(a, b):
                    M = M @ mats[j]
                steps.append(Projection(subs[len(steps) + 1], subs[len(steps)], M))
        return Chain(tuple(subs), None if steps is None else tuple(steps))


def default_steps(chain: Chain) -> list[Projection]:
    """Euclidean-orthogonal steps ``X_{n+1} -> X_n``."""
    subs = chain.subspaces
    return [orthogonal_projection(subs[n + 1], subs[n]) for n in range(len(subs) - 1)]


@dataclass
class CompositionTable:
    entries: dict
    sup: float
    argmax: tuple

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "l", "norm", "certificate"])
        for (k, l), r in sorted(self.entries.items()):
            w.writerow([k, l, f"{r.value:.12g}", r.certificate])
        return buf.getvalue()

    def matrix(self) -> np.ndarray:
        """Dense ``(L-1) x (L-1)`` array with NaN below the diagonal."""
        n = max((l for _, l in self.entries), default=0)
        M = np.full((n, n), np.nan)
        for (k, l), r in self.entries.items():
            M[k - 1, l - 1] = r.value
        return M


def composition_table(chain: Chain, tol: Tolerances = DEFAULT_TOL) -> CompositionTable:
    """``M(k, l) = ||P_k P_{k+1} ... P_l||`` from ``X_{l+1}`` to ``X_k`` (1-based)."""
    mats = chain.step_matrices()
    subs = chain.subspaces
    entries = {}
    for k in range(1, len(mats) + 1):
        M = np.eye(subs[k - 1].dim)
        for l in range(k, len(mats) + 1):
            M = M @ mats[l - 1]
            entries[(k, l)] = operator_norm(LinearMap(subs[l], subs[k - 1], M), tol)
    if not entries:
        return CompositionTable({}, 0.0, ())
    arg = max(entries, key=lambda key: entries[key].value)
    return CompositionTable(entries, entries[arg].value, arg)


def free_directions(J: np.ndarray) -> np.ndarray:
    """Basis of ``{D : D @ J = 0}`` for ``D`` of shape ``(J.shape[1], J.shape[0])``."""
    n_img, n_dom = J.shape[1], J.shape[0]
    if n_dom == n_img:
        return np.zeros((0, n_img, n_dom))
    u, s, vt = np.linalg.svd(J.T, full_matrices=True)
    null = vt[n_img:]                       # rows b with b @ J = 0
    dirs = []
    for a in range(n_img):
        for b in null:
            D = np.zeros((n_img, n_dom))
            D[a] = b
            dirs.append(D)
    return np.array(dirs).reshape(-1, n_img, n_dom)


@dataclass
class BlowupResult:
    chain: Chain
    sup: float
    default_sup: float
    sweeps: int
    flagged: bool
    history: list = field(default_factory=list)


def minimize_chain_blowup(chain: Chain, sweeps: int = 50, tol: Tolerances = DEFAULT_TOL,
                          seed: int = 0, improve_tol: float = 1e-9) -> BlowupResult:
    """Cyclic coordinate descent over the steps, each step solved exactly as an LP.

    The sup of the composition table never exceeds that of the
    Euclidean-orthogonal default steps, which are the starting point.
    """
    subs = chain.subspaces
    L = len(subs)
    start = Chain(subs, tuple(default_steps(chain)))
    if L < 2:
        return BlowupResult(start, 0.0, 0.0, 0, False)
    default_sup = composition_table(start, tol).sup
    if L == 2:
        from .minproj import lambda_relative
        res = lambda_relative(subs[0], subs[1], tol=tol)
        best = Chain(subs, (res.projection,))
        sup = composition_table(best, tol).sup
        if sup > default_sup:
            best, sup = start, default_sup
        return BlowupResult(best, sup, default_sup, 1, False, [default_sup, sup])

    mats = [P.matrix.copy() for P in start.steps]
    incl = [coords_in(subs[n + 1], subs[n]) for n in range(L - 1)]
    spaces = [induced(s) for s in subs]
    current = default_sup
    history = [current]
    flagged = False
    used = 0
    for sweep in range(sweeps):
        used = sweep + 1
        before = current
        for n in range(L - 1):
            dirs = free_directions(incl[n])
            if len(dirs) == 0:
                continue
            terms = []
            for k in range(n + 1):
                left = np.eye(subs[k].dim)
                for j in range(k, n):
                    left = left @ mats[j]
                for l in range(n, L - 1):
                    right = np.eye(subs[n + 1].dim)
                    for j in range(n + 1, l + 1):
                        right = right @ mats[j]
                    base = left @ mats[n] @ right
                    D = np.einsum("ab,rbc,cd->rad", left, dirs, right)
                    terms.append(NormTerm(base, D, spaces[l + 1], spaces[k]))
            try:
                theta, t, _ = minimize_max_norm(terms, len(dirs))
            except NoExactStrategyError:
                flagged = True
                continue
            candidate = mats[n] + np.tensordot(theta, dirs, axes=1)
            trial = mats.copy()
            trial[n] = candidate
            sup = composition_table(Chain(subs, tuple(Projection(subs[i + 1], subs[i], trial[i])
                                                      for i in range(L - 1))), tol).sup
            if sup < current - improve_tol:
                mats, current = trial, sup
        history.append(current)
        if before - current <= improve_tol:
            break
    else:
        flagged = True
    best = Chain(subs, tuple(Projection(subs[i + 1], subs[i], mats[i]) for i in range(L - 1)))
    return BlowupResult(best, current, default_sup, used, flagged, history)


def gamma_chain(n: int = 8, gamma: float = 0.9, ambient: NormedSpace | None = None) -> Chain:
    """Ill-conditioned chain in ``l_inf^n``.

    ``X_j = span(b_1, ..., b_j)`` with ``b_j = e_j + gamma * (e_{j+1} + ... + e_n)``
    and ``X_n`` the whole space.
    """
    amb = ambient or NormedSpace.linf(n)
    B = np.eye(n)
    for j in range(n):
        B[j + 1:, j] += gamma
    subs = tuple(Subspace(amb, B[:, :j], label=f"X{j}") for j in range(1, n + 1))
    return Chain(subs)


def coordinate_chain(n: int, ambient: NormedSpace | None = None) -> Chain:
    amb = ambient or NormedSpace.linf(n)
    return Chain(tuple(Subspace(amb, np.eye(n)[:, :j], label=f"E{j}") for j in range(1, n + 1)))
