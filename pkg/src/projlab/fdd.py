"""Finite-dimensional decompositions at desk scale.

Everything here acts on ambient vectors: a block is a :class:`Subspace` of
the ambient space, canonical projections are ambient matrices, and the
interlacing/commuting constructions are certified numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .projections import Chain, Projection, composition_table
from .spaces import (
    DEFAULT_TOL,
    LinearMap,
    NormedSpace,
    Subspace,
    Tolerances,
    operator_norm,
)


class FDDError(ValueError):
    pass


class HypothesisRefused(FDDError):
    """The perturbation budget ``sum eps_i < 1/(2K)`` does not hold."""

    def __init__(self, msg, measured_sum, limit):
        super().__init__(msg)
        self.measured_sum, self.limit = measured_sum, limit


class CertificationError(RuntimeError):
    def __init__(self, msg, residuals):
        super().__init__(f"{msg}: {residuals}")
        self.residuals = residuals


def _amb_norm(space: NormedSpace, M: np.ndarray, tol: Tolerances) -> float:
    return operator_norm(LinearMap(space, space, M), tol).value


def _span_residual(vectors: np.ndarray, basis: np.ndarray) -> float:
    """Max Euclidean distance of the columns of ``vectors`` to ``span(basis)``."""
    if vectors.size == 0:
        return 0.0
    if basis.shape[1] == 0:
        return float(np.linalg.norm(vectors, axis=0).max())
    Q = np.linalg.qr(basis)[0]
    R = vectors - Q @ (Q.T @ vectors)
    return float(np.linalg.norm(R, axis=0).max())


def _orth(B: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    if B.shape[1] == 0:
        return B
    u, s, _ = np.linalg.svd(B, full_matrices=False)
    r = int(np.sum(s > tol * max(1.0, s[0])))
    return u[:, :r]


@dataclass(frozen=True, eq=False)
class Decomposition:
    ambient: NormedSpace
    blocks: tuple
    tol: Tolerances = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise FDDError("a decomposition needs at least one block")
        for b in blocks:
            if b.ambient.dim != self.ambient.dim:
                raise FDDError("blocks must live in the ambient space")
            if b.dim == 0:
                raise FDDError("blocks must be nonzero")
        B = np.hstack([b.basis for b in blocks])
        N = self.ambient.dim
        if B.shape[1] != N:
            raise FDDError(f"block dimensions sum to {B.shape[1]}, ambient has dimension {N}")
        s = np.linalg.svd(B, compute_uv=False)
        if s[-1] <= 1e-10 * s[0]:
            raise FDDError("blocks do not form a direct sum (rank collapse)")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def coordinate(cls, ambient: NormedSpace, sizes=None) -> "Decomposition":
        N = ambient.dim
        sizes = [1] * N if sizes is None else list(sizes)
        offs = np.cumsum([0] + sizes)
        I = np.eye(N)
        return cls(ambient, tuple(Subspace(ambient, I[:, offs[i]:offs[i + 1]], label=f"W{i + 1}")
                                  for i in range(len(sizes))))

    @property
    def length(self) -> int:
        return len(self.blocks)

    @cached_property
    def stacked(self) -> np.ndarray:
        return np.hstack([b.basis for b in self.blocks])

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.cumsum([0] + [b.dim for b in self.blocks])

    @cached_property
    def _inverse(self) -> np.ndarray:
        return np.linalg.inv(self.stacked)

    def partial(self, n: int) -> Subspace:
        """``Z_n = W_1 + ... + W_n`` (``n`` from 0 to L)."""
        d = self.offsets[min(n, self.length)]
        return Subspace(self.ambient, self.stacked[:, :d], label=f"Z{n}")

    def S(self, n: int) -> np.ndarray:
        """Ambient matrix of the canonical projection onto ``Z_n`` (``S_0 = 0``, ``S_n = I`` for ``n >= L``)."""
        N = self.ambient.dim
        if n <= 0:
            return np.zeros((N, N))
        if n >= self.length:
            return np.eye(N)
        d = self.offsets[n]
        return self.stacked[:, :d] @ self._inverse[:d]

    def canonical(self, n: int) -> Projection:
        d = self.offsets[min(n, self.length)]
        return Projection(self.ambient, self.partial(n), self._inverse[:d], check=False)

    @cached_property
    def norms(self) -> list[float]:
        return [_amb_norm(self.ambient, self.S(n), self.tol) for n in range(1, self.length + 1)]

    @property
    def K(self) -> float:
        return max(self.norms)

    def law_residual(self) -> float:
        """``max |S_n S_m - S_min(n,m)|`` over all pairs."""
        L = self.length
        Ss = [self.S(n) for n in range(1, L + 1)]
        worst = 0.0
        for i in range(L):
            for j in range(L):
                worst = max(worst, float(np.abs(Ss[i] @ Ss[j] - Ss[min(i, j)]).max()))
        return worst

    def replace(self, start: int, stop: int, block: Subspace) -> "Decomposition":
        """Blocks ``start..stop`` (0-based, inclusive) replaced by one block."""
        return Decomposition(self.ambient, self.blocks[:start] + (block,) + self.blocks[stop + 1:], self.tol)

    def group(self, start: int, stop: int) -> "Decomposition":
        B = np.hstack([b.basis for b in self.blocks[start:stop + 1]])
        return self.replace(start, stop, Subspace(self.ambient, B))


def decomposition_constant(D: Decomposition) -> float:
    return D.K


# ----------------------------------------------------------------------------
# perturbation


@dataclass
class PerturbationResult:
    decomposition: Decomposition
    eps: list
    eps_sum: float
    limit: float
    K: float
    K_new: float


def perturbation_sizes(D: Decomposition, E_list) -> list[float]:
    """``eps_i = ||(E_i - I)|_{W_i}||`` for maps given as images of the block bases."""
    out = []
    for W, E in zip(D.blocks, E_list):
        img = _images(W, E)
        M = LinearMap(W, D.ambient, img - W.basis)
        out.append(operator_norm(M, D.tol).value)
    return out


def _images(W: Subspace, E) -> np.ndarray:
    E = np.asarray(E, dtype=float)
    N = W.ambient.dim
    if E.shape == (N, N):
        return E @ W.basis
    if E.shape == (N, W.dim):
        return E
    raise FDDError(f"perturbation of shape {E.shape} fits neither (N, N) nor (N, dim W)")


def perturb_decomposition(D: Decomposition, E_list, eps_list=None) -> PerturbationResult:
    """Blocks ``E_i(W_i)`` when ``sum ||(E_i - I)|_{W_i}|| < 1/(2K)``; refuses otherwise."""
    if len(E_list) != D.length:
        raise FDDError("need one perturbation per block")
    eps = perturbation_sizes(D, E_list)
    if eps_list is not None:
        for i, (e, bound) in enumerate(zip(eps, eps_list)):
            if e > bound * (1 + 1e-12) + 1e-15:
                raise FDDError(f"block {i + 1}: measured perturbation {e:.6g} exceeds declared {bound:.6g}")
    K = D.K
    total = float(sum(eps))
    limit = 1.0 / (2.0 * K)
    if total >= limit:
        raise HypothesisRefused(f"sum of perturbations {total:.6g} >= 1/(2K) = {limit:.6g}", total, limit)
    blocks = []
    for W, E in zip(D.blocks, E_list):
        img = _images(W, E)
        try:
            blocks.append(Subspace(D.ambient, img, label=W.label))
        except ValueError as exc:
            raise CertificationError("perturbed block lost rank under the hypothesis",
                                     {"block": W.label, "error": str(exc)}) from None
    try:
        new = Decomposition(D.ambient, tuple(blocks), D.tol)
    except FDDError as exc:
        raise CertificationError("perturbed blocks are not a direct sum under the hypothesis",
                                 {"error": str(exc), "eps_sum": total}) from None
    return PerturbationResult(new, eps, total, limit, K, new.K)


# ----------------------------------------------------------------------------
# blocking lemma


@dataclass
class BlockingResult:
    blocking: Decomposition          # Y_1..Y_k, V_{k+1}+...+V_{m+1}, V_{m+2}, ...
    perturbed: Decomposition         # V_1..V_k, A(Y_{k+1}), V_{m+2}, ...
    A: LinearMap                     # Y_{k+1} -> ambient
    A_full: np.ndarray               # ambient matrix of A on V_1 + ... + V_{m+1}
    m: int
    delta: float
    residuals: dict


def _least_m(D: Decomposition, H: Subspace, k: int, delta: float, last: int):
    """Least ``m >= k`` with ``||(S_{m+1} - I)|_H|| <= delta`` and ``m + 1 <= last``."""
    best = np.inf
    for m in range(k, last):
        r = operator_norm(LinearMap(H, D.ambient, (D.S(m + 1) - np.eye(D.ambient.dim)) @ H.basis), D.tol).value
        best = min(best, r)
        if r <= delta:
            return m, r
    return None, best


def blocking_step(D: Decomposition, H: Subspace, k: int, eps: float, delta0: float | None = None,
                  allow_exhaust: bool = False, min_delta: float = 1e-12) -> BlockingResult:
    """One blocking step: the first ``k >= 1`` blocks stay fixed, ``k+1..m+1`` are grouped.

    ``delta`` starts at ``eps/4`` and is halved until the constructed ``A``
    satisfies ``||A y - y|| <= eps ||y||`` on the new block.  With
    ``allow_exhaust=False`` at least one original block must remain after
    the new block; otherwise ``m + 1`` may reach the last block.
    """
    if eps <= 0:
        raise FDDError("eps must be positive")
    L = D.length
    if not 1 <= k < L:
        raise FDDError(f"need 1 <= k < number of blocks ({L})")
    for i in range(k):
        if not H.contains(D.blocks[i], tol=1e-9):
            raise FDDError(f"block {i + 1} is not contained in H")
    N = D.ambient.dim
    last = L if allow_exhaust else L - 1
    delta = eps / 4 if delta0 is None else delta0
    while delta >= min_delta:
        m, r = _least_m(D, H, k, delta, last)
        if m is None:
            raise FDDError(f"ambient exhausted: no m with ||(S_(m+1) - I)|_H|| <= {delta:.3g} "
                           f"leaving a trailing block (best residual {r:.3g})")
        S = D.S(m + 1)
        BU = S @ H.basis
        if np.linalg.matrix_rank(BU, tol=1e-10 * max(1.0, np.abs(BU).max())) < H.dim:
            delta /= 2
            continue
        Zm = D.partial(m + 1).basis
        Qz = _orth(Zm)
        Qu = _orth(BU)
        # Euclidean-orthogonal complement of U inside Z_{m+1}
        R = Qz - Qu @ (Qu.T @ Qz)
        BC = _orth(R)
        BC = BC[:, :Zm.shape[1] - H.dim]
        G = np.hstack([BU, BC])                  # basis of Z_{m+1} adapted to U + C
        Ginv = np.linalg.pinv(G)
        A_full = np.hstack([H.basis, BC]) @ Ginv  # A(u + c) = (S|_H)^{-1} u + c
        Yb = np.hstack([b.basis for b in D.blocks[k:m + 1]])
        Y = Subspace(D.ambient, Yb, label=f"Y{k + 1}")
        AY = A_full @ Yb
        distortion = operator_norm(LinearMap(Y, D.ambient, AY - Yb), D.tol).value
        if distortion > eps:
            delta /= 2
            continue
        lin = np.hstack([Zm, H.basis])
        Zk = D.partial(k).basis
        residuals = {
            "distortion": float(distortion),
            "image_in_span": _span_residual(AY, lin),
            "h_recovered": _span_residual(H.basis, np.hstack([Zk, AY])),
            "fixes_head": float(np.abs(A_full @ Zk - Zk).max(initial=0.0)),
            "tail": float(r),
        }
        blocking = D.group(k, m)
        new_block = Subspace(D.ambient, AY, label=f"A(Y{k + 1})")
        perturbed = blocking.replace(k, k, new_block)
        return BlockingResult(blocking, perturbed, LinearMap(Y, D.ambient, AY), A_full,
                              m, float(delta), residuals)
    raise FDDError(f"no admissible delta down to {min_delta:g}")


# ----------------------------------------------------------------------------
# interlacing and the commuting construction


@dataclass
class InterlacedSystem:
    decomposition: Decomposition     # blocks U~_i
    chain: tuple                     # X~_1 < X~_2 < ...
    outer: tuple                     # ambient matrices Q_n onto X~_n
    indices: tuple = ()              # positions n_i of X~_i in the raw chain (1-based)
    perturbations: tuple = ()        # measured distortions per blocking step
    schedule: tuple = ()

    def __post_init__(self):
        D = self.decomposition
        if len(self.outer) != len(self.chain):
            raise FDDError("need one outer projection per chain element")
        res = self.interlacing_residual()
        if res > 1e-8:
            raise FDDError(f"interlacing Z~_n <= X~_n <= Z~_(n+1) fails (residual {res:.3g})")
        for n, (X, Q) in enumerate(zip(self.chain, self.outer)):
            Q = np.asarray(Q)
            r1 = float(np.abs(Q @ X.basis - X.basis).max())
            r2 = _span_residual(Q, X.basis)
            if max(r1, r2) > 1e-9:
                raise FDDError(f"Q_{n + 1} is not a projection onto X~_{n + 1} ({r1:.3g}, {r2:.3g})")

    def interlacing_residual(self) -> float:
        D = self.decomposition
        worst = 0.0
        for n, X in enumerate(self.chain, start=1):
            worst = max(worst, _span_residual(D.partial(n).basis, X.basis),
                        _span_residual(X.basis, D.partial(n + 1).basis))
        return worst

    @property
    def q_sup(self) -> float:
        amb = self.decomposition.ambient
        return max(_amb_norm(amb, Q, self.decomposition.tol) for Q in self.outer)


def _orthogonal_onto(X: Subspace) -> np.ndarray:
    Q = X.orthonormal
    return Q @ Q.T


def _first_containing(chain, target: Subspace, after: int) -> int | None:
    for n in range(after + 1, len(chain)):
        if chain[n].contains(target, tol=1e-8):
            return n
    return None


def build_interlaced(D: Decomposition, chain_raw, eps_schedule=None, outer: str = "orthogonal") -> InterlacedSystem:
    """Blocks ``U~_i`` and a subsequence ``X~_i`` of ``chain_raw`` with ``Z~_i <= X~_i <= Z~_(i+1)``.

    Step 1 keeps ``U~_1 = U_1``; step ``j`` applies :func:`blocking_step`
    with ``H = X~_(j-1)``, ``k = j - 1`` and ``eps_j`` (default
    ``1/(2^(j+2) K)``).  The loop ends when the finite ambient is used up.
    """
    amb = D.ambient
    chain = list(chain_raw)
    if not chain or chain[-1].dim < amb.dim:
        chain.append(Subspace.whole(amb))
    for a, b in zip(chain, chain[1:]):
        if not b.contains(a, tol=1e-8):
            raise FDDError("raw chain is not increasing")
    for i, U in enumerate(D.blocks):
        if _first_containing(chain, U, -1) is None:
            raise FDDError(f"block {i + 1} is not contained in any chain element")
    K = D.K
    if eps_schedule is None:
        eps_schedule = [1.0 / (2 ** (j + 2) * K) for j in range(2, D.length + 2)]
    eps_schedule = list(eps_schedule)
    if sum(eps_schedule[:D.length]) >= 1.0 / (2 * K):
        raise HypothesisRefused("eps schedule violates sum eps_i < 1/(2K)", sum(eps_schedule), 1 / (2 * K))

    V = D
    idx = [_first_containing(chain, V.blocks[0], -1)]
    measured = []
    j = 2
    while True:
        H = chain[idx[-1]]
        k = j - 1
        if H.dim == amb.dim or k >= V.length:
            break
        eps = eps_schedule[j - 2]
        step = blocking_step(V, H, k, eps, allow_exhaust=True)
        V = step.perturbed
        measured.append(step.residuals["distortion"])
        newU = V.blocks[k]
        if V.partial(j).dim == amb.dim:
            n = len(chain) - 1
        else:
            n = _first_containing(chain, newU, idx[-1])
        if n is None:
            raise FDDError("no later chain element contains the new block")
        idx.append(n)
        j += 1
    J = len(idx)
    if V.length > J + 1:
        V = V.group(J, V.length - 1)
    X_tilde = tuple(chain[n] for n in idx)
    Qs = tuple(_outer_projection(X, outer) for X in X_tilde)
    return InterlacedSystem(V, X_tilde, Qs, tuple(n + 1 for n in idx), tuple(measured),
                            tuple(eps_schedule[:len(measured)]))


def _outer_projection(X: Subspace, kind: str) -> np.ndarray:
    if kind == "orthogonal" or X.dim == X.ambient.dim:
        return _orthogonal_onto(X) if X.dim < X.ambient.dim else np.eye(X.ambient.dim)
    if kind == "minimal":
        from .minproj import lambda_relative
        return lambda_relative(X, tau=0.05).projection.ambient_operator()
    raise ValueError(f"unknown outer projection kind {kind!r}")


@dataclass
class CommutingResult:
    projections: list           # ambient matrices P_n
    norms: list
    bounds: list
    residuals: dict

    @property
    def sup(self) -> float:
        return max(self.norms) if self.norms else 0.0


def commuting_construction(S: InterlacedSystem, check: bool = True) -> CommutingResult:
    """``P_n = R_n + (I - R_n) Q_n (R_(n+1) - R_n)`` with all four certificates."""
    D = S.decomposition
    amb = D.ambient
    N = amb.dim
    I = np.eye(N)
    Ps, norms, bounds = [], [], []
    res = {"idempotence": 0.0, "image": 0.0, "fixes": 0.0, "consecutive": 0.0, "pairwise": 0.0,
           "norm_bound_excess": -np.inf}
    R = [D.S(n) for n in range(0, len(S.chain) + 2)]
    Rn_norm = [_amb_norm(amb, M, D.tol) for M in R]
    for n, (X, Q) in enumerate(zip(S.chain, S.outer), start=1):
        P = R[n] + (I - R[n]) @ Q @ (R[n + 1] - R[n])
        Ps.append(P)
        nP = _amb_norm(amb, P, D.tol)
        nQ = _amb_norm(amb, Q, D.tol)
        bound = Rn_norm[n] + (1 + Rn_norm[n]) * nQ * (Rn_norm[n + 1] + Rn_norm[n])
        norms.append(nP)
        bounds.append(bound)
        res["idempotence"] = max(res["idempotence"], _amb_norm(amb, P @ P - P, D.tol) if np.any(P @ P - P) else 0.0)
        res["image"] = max(res["image"], _span_residual(P, X.basis))
        res["fixes"] = max(res["fixes"], float(np.abs(P @ X.basis - X.basis).max()))
        res["norm_bound_excess"] = max(res["norm_bound_excess"], nP - bound)
    for a in range(len(Ps)):
        if a + 1 < len(Ps):
            res["consecutive"] = max(res["consecutive"], float(np.abs(Ps[a] @ Ps[a + 1] - Ps[a]).max()))
        for b in range(len(Ps)):
            res["pairwise"] = max(res["pairwise"], float(np.abs(Ps[a] @ Ps[b] - Ps[min(a, b)]).max()))
    if check:
        bad = {k: v for k, v in res.items() if (k != "norm_bound_excess" and v > 1e-9)
               or (k == "norm_bound_excess" and v > 1e-6)}
        if bad:
            raise CertificationError("commuting construction failed its certificates", bad)
    return CommutingResult(Ps, norms, bounds, res)


def commuting_chain(S: InterlacedSystem, result: CommutingResult) -> Chain:
    """The chain ``X~_1 < ... < X~_J < ambient`` with steps ``P_n`` restricted to ``X~_(n+1)``."""
    amb = S.decomposition.ambient
    subs = list(S.chain)
    Ps = list(result.projections)
    if subs[-1].dim < amb.dim:
        subs.append(Subspace.whole(amb))
    else:
        Ps = Ps[:-1]
    steps = []
    for n in range(len(subs) - 1):
        src, dst = subs[n + 1], subs[n]
        M = np.linalg.pinv(dst.basis) @ Ps[n] @ src.basis
        steps.append(Projection(src, dst, M))
    return Chain(tuple(subs), tuple(steps))


def random_interlaced_system(seed: int, N: int | None = None, ambient: NormedSpace | None = None,
                             outer: str = "random") -> InterlacedSystem:
    """Seeded random decomposition of ``l_inf^N`` with an interlaced chain and outer projections."""
    rng = np.random.default_rng(seed)
    N = N or int(rng.integers(3, 11))
    amb = ambient or NormedSpace.linf(N)
    nblocks = int(rng.integers(2, min(N, 5) + 1))
    cuts = np.sort(rng.choice(np.arange(1, N), size=nblocks - 1, replace=False))
    sizes = np.diff(np.concatenate([[0], cuts, [N]]))
    B = np.eye(N) + 0.3 * rng.standard_normal((N, N))
    while np.linalg.cond(B) > 50:          # keep certificates meaningful at 1e-9
        B = np.eye(N) + 0.3 * rng.standard_normal((N, N))
    offs = np.cumsum(np.concatenate([[0], sizes]))
    blocks = tuple(Subspace(amb, B[:, offs[i]:offs[i + 1]]) for i in range(nblocks))
    D = Decomposition(amb, blocks)
    chain, Qs = [], []
    for n in range(1, nblocks):
        Zn = D.partial(n).basis
        nxt = D.blocks[n].basis
        extra = int(rng.integers(0, nxt.shape[1]))
        add = nxt @ rng.standard_normal((nxt.shape[1], extra)) if extra else np.zeros((N, 0))
        X = Subspace(amb, np.hstack([Zn, add]))
        chain.append(X)
        if outer == "random" and X.dim < N:
            kern = _orth(X.complement + 0.3 * X.basis @ rng.standard_normal((X.dim, N - X.dim)))
            G = np.hstack([X.basis, kern])
            Qs.append(X.basis @ np.linalg.inv(G)[:X.dim])
        else:
            Qs.append(_outer_projection(X, "orthogonal"))
    return InterlacedSystem(D, tuple(chain), tuple(Qs))


def random_blocking_instance(seed: int):
    """Seeded ``(D, H, k, eps)`` for the blocking lemma.

    ``H = Z_k + span{v}`` where ``v`` starts in block ``k+1`` and has a
    geometrically small tail that stops before the last block, so the tail
    condition ``||(S_(m+1) - I)|_H|| <= delta`` is reachable without
    exhausting the ambient.
    """
    rng = np.random.default_rng(seed)
    N = int(rng.integers(5, 11))
    amb = NormedSpace.linf(N)
    L = int(rng.integers(4, min(N, 7) + 1))
    cuts = np.sort(rng.choice(np.arange(1, N), size=L - 1, replace=False))
    sizes = np.diff(np.concatenate([[0], cuts, [N]]))
    B = np.eye(N) + 0.3 * rng.standard_normal((N, N))
    while np.linalg.cond(B) > 50:
        B = np.eye(N) + 0.3 * rng.standard_normal((N, N))
    offs = np.cumsum(np.concatenate([[0], sizes]))
    D = Decomposition(amb, tuple(Subspace(amb, B[:, offs[i]:offs[i + 1]]) for i in range(L)))
    k = int(rng.integers(1, L - 2))
    v = D.blocks[k].basis @ rng.standard_normal(D.blocks[k].dim)
    for j in range(k + 1, L - 1):
        v = v + 0.1 * 0.3 ** (j - k) * (D.blocks[j].basis @ rng.standard_normal(D.blocks[j].dim))
    H = Subspace(amb, np.hstack([D.partial(k).basis, v[:, None]]), label="H")
    eps = float(rng.uniform(0.02, 0.3))
    return D, H, k, eps


# ----------------------------------------------------------------------------
# strong-limit simulation


@dataclass
class LimitResult:
    T: list                      # Projections T_n from the top of the chain onto X_n
    norms: list
    residuals: dict
    table_sup: float
    profile: list                # max_x ||x - T_n x|| / ||x|| over sampled x, per n


def strong_limit_simulation(chain: Chain, bound_cap: float, samples: int = 64, seed: int = 0,
                            tol: Tolerances = DEFAULT_TOL) -> LimitResult:
    """``T_n = P_n P_(n+1) ... P_(L-1)`` with the commuting law certified."""
    subs = chain.subspaces
    L = len(subs)
    top = subs[-1]
    if L == 1:
        T = Projection(top, top, np.eye(top.dim))
        return LimitResult([T], [1.0 if top.dim else 0.0], {"projection": 0.0, "law": 0.0}, 0.0, [0.0])
    table = composition_table(chain, tol)
    if table.sup > bound_cap:
        raise FDDError(f"composition sup {table.sup:.6g} exceeds the cap {bound_cap:.6g}")
    mats = chain.step_matrices()
    Ts = []
    for n in range(L):
        M = np.eye(top.dim)
        for j in range(L - 2, n - 1, -1):
            M = mats[j] @ M
        Ts.append(Projection(top, subs[n], M))
    E = [T.operator for T in Ts]          # in coordinates of the top element
    proj_res = max(max(T.certify().values()) for T in Ts)
    law = 0.0
    for i in range(L):
        for j in range(L):
            law = max(law, float(np.abs(E[i] @ E[j] - E[min(i, j)]).max()))
    norms = [T.norm(tol).value for T in Ts]
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((samples, top.dim))
    topn = top.induced
    nx = np.atleast_1d(topn.norm(X))
    profile = [float((np.atleast_1d(topn.norm(X - X @ En.T)) / nx).max()) for En in E]
    return LimitResult(Ts, norms, {"projection": float(proj_res), "law": law}, table.sup, profile)


def tail_chain(ambient: NormedSpace, decay: float = 0.5) -> list:
    """Skewed increasing chain ``X_j = span(e_1..e_j, sum_{i>j} w_i e_i)`` with ``w_i = decay^(i-1)``."""
    N = ambient.dim
    w = decay ** np.arange(N)
    I = np.eye(N)
    out = []
    for j in range(1, N):
        tail = np.where(np.arange(N) >= j, w, 0.0)
        out.append(Subspace(ambient, np.hstack([I[:, :j], tail[:, None]]), label=f"X{j}"))
    return out
