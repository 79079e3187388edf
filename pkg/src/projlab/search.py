"""Search for good factorizations ``P = P1 P2`` through an intermediate subspace.

For a triple ``X1 < X2 < X3`` and a slack ``tau`` we look for projections
``P2: X3 -> X2`` with ``||P2|| <= (1 + tau) lambda(X2, X3)`` and
``P1: X2 -> X1`` making ``||P1 P2||`` small, and report
``C2 = ||P1 P2|| / lambda(X1, X3)``.  Each half-step is an exact LP; the
alternation stops when neither half improves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .minproj import lambda_relative
from .normlp import NormTerm, minimize_max_norm
from .projections import coords_in
from .spaces import DEFAULT_TOL, LinearMap, NormedSpace, Subspace, Tolerances, induced, operator_norm

CAVEAT = ("Universal constants over all Banach triples are out of reach of a table; "
          "any finite family gives one-sided evidence only.")


def _entry_dirs(rows: int, cols: int) -> np.ndarray:
    R = rows * cols
    D = np.zeros((R, rows, cols))
    D[np.arange(R), np.repeat(np.arange(rows), cols), np.tile(np.arange(cols), rows)] = 1.0
    return D


def _projection_eq(J: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Constraint ``W J = I`` on ``vec(W)`` (row-major, ``W`` of shape ``(J.shape[1], J.shape[0])``)."""
    n_dom, n_img = J.shape
    C = np.zeros((n_img * n_img, n_img * n_dom))
    for a in range(n_img):
        for c in range(n_img):
            C[a * n_img + c, a * n_dom:(a + 1) * n_dom] = J[:, c]
    return C, np.eye(n_img).ravel()


def _clean(W, J):
    return W - (W @ J - np.eye(J.shape[1])) @ np.linalg.pinv(J)


def _step_P2(W1, J23, X1n, X2n, X3n, cap):
    d2, d3 = J23.shape[1], J23.shape[0]
    D = _entry_dirs(d2, d3)
    terms = [NormTerm(np.zeros((W1.shape[0], d3)), np.einsum("ab,rbc->rac", W1, D), X3n, X1n),
             NormTerm(np.zeros((d2, d3)), D, X3n, X2n, bound=cap)]
    theta, t, _ = minimize_max_norm(terms, d2 * d3, theta_eq=_projection_eq(J23))
    return _clean(theta.reshape(d2, d3), J23)


def _step_P1(W2, J12, X1n, X3n):
    d1, d2 = J12.shape[1], J12.shape[0]
    D = _entry_dirs(d1, d2)
    terms = [NormTerm(np.zeros((d1, W2.shape[1])), np.einsum("rab,bc->rac", D, W2), X3n, X1n)]
    theta, t, _ = minimize_max_norm(terms, d1 * d2, theta_eq=_projection_eq(J12))
    return _clean(theta.reshape(d1, d2), J12)


def _norm(dom, cod, M, tol):
    return operator_norm(LinearMap(dom, cod, M), tol).value


def _alternate(W1, W2_min, J12, J23, X1, X2, X3, X1n, X2n, X3n, cap, budget, tol):
    """Alternate exact LPs from ``W1``; returns ``(W1, W2, ||W1 W2||, history, stalled)``."""
    if X2.dim < X3.dim:
        W2 = _step_P2(W1, J23, X1n, X2n, X3n, cap)
        if _norm(X3, X2, W2, tol) > cap * (1 + 1e-7):
            W2 = W2_min
    else:
        W2 = W2_min
    comp = _norm(X3, X1, W1 @ W2, tol)
    history = [comp]
    for _ in range(budget):
        W1_new = _step_P1(W2, J12, X1n, X3n) if X1.dim < X2.dim else W1
        W2_new = _step_P2(W1_new, J23, X1n, X2n, X3n, cap) if X2.dim < X3.dim else W2
        new = _norm(X3, X1, W1_new @ W2_new, tol)
        if new < comp - 1e-9 and _norm(X3, X2, W2_new, tol) <= cap * (1 + 1e-7):
            W1, W2, comp = W1_new, W2_new, new
            history.append(comp)
        else:
            return W1, W2, comp, history, False
    return W1, W2, comp, history, True


@dataclass
class TripleRecord:
    index: int
    dims: tuple
    lambda_13: float
    lambda_23: float
    runs: list = field(default_factory=list)   # dicts per tau


def search_triple(X1: Subspace, X2: Subspace, X3: Subspace, tau_grid=(0.01, 0.05, 0.2),
                  budget: int = 20, tol: Tolerances = DEFAULT_TOL, index: int = 0) -> TripleRecord:
    X1n, X2n, X3n = induced(X1), induced(X2), induced(X3)
    r13 = lambda_relative(X1, X3, tol=tol)
    r23 = lambda_relative(X2, X3, tol=tol)
    J12, J23 = coords_in(X2, X1), coords_in(X3, X2)
    rec = TripleRecord(index, (X1.dim, X2.dim, X3.dim), r13.lam, r23.lam)
    # W1 alone fixes the composite on X2, so the P2-step cannot leave that
    # face; two starts: the best P1 for a minimal P2, and the restriction of a
    # minimal projection onto X1
    starts = [_step_P1(r23.projection.matrix, J12, X1n, X3n) if X1.dim < X2.dim else np.linalg.inv(J12),
              r13.projection.matrix @ J23]
    for tau in tau_grid:
        cap = (1 + tau) * r23.lam
        best = None
        for W1_start in starts:
            W1, W2, comp, history, stalled = _alternate(W1_start, r23.projection.matrix, J12, J23,
                                                    X1, X2, X3, X1n, X2n, X3n, cap, budget, tol)
            if best is None or comp < best[2] - 1e-12:
                best = (W1, W2, comp, history, stalled)
        W1, W2, comp, history, stalled = best
        p2 = operator_norm(LinearMap(X3, X2, W2), tol).value
        p1 = operator_norm(LinearMap(X2, X1, W1), tol).value
        C2 = comp / r13.lam
        # P1 P2 is a projection onto X1, so its norm is at least one
        if C2 < 1.0 / r13.lam - 1e-6:
            raise AssertionError(f"C2={C2} below 1/lambda(X1, X3)={1.0 / r13.lam}")
        rec.runs.append({"tau": tau, "C2": C2, "composite_norm": comp, "p2_norm": p2,
                         "p2_ratio": p2 / r23.lam, "p1_norm": p1, "sweeps": len(history) - 1,
                         "flagged": stalled, "certificate": "exact_lp"})
    return rec


def random_triples(count: int, ambient: NormedSpace, dims=(1, 2, 4), seed: int = 0):
    """Seeded nested triples; the per-triple seeds are spawned from the master seed."""
    d1, d2, d3 = dims
    N = ambient.dim
    if not (1 <= d1 <= d2 <= d3 <= N):
        raise ValueError("need 1 <= d1 <= d2 <= d3 <= dim")
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(count)):
        rng = np.random.default_rng(ss)
        B = rng.standard_normal((N, d3)) if d3 < N else np.linalg.qr(rng.standard_normal((N, N)))[0]
        X3 = Subspace(ambient, B) if d3 < N else Subspace.whole(ambient)
        B2 = X3.basis @ rng.standard_normal((d3, d2))
        X2 = Subspace(ambient, B2)
        X1 = Subspace(ambient, B2 @ rng.standard_normal((d2, d1)))
        yield X1, X2, X3


def coordinate_triples(N: int, ambient: NormedSpace | None = None):
    amb = ambient or NormedSpace.linf(N)
    I = np.eye(N)
    for d1 in range(1, N):
        for d2 in range(d1, N):
            yield Subspace(amb, I[:, :d1]), Subspace(amb, I[:, :d2]), Subspace.whole(amb)


def triple_search(triples, tau_grid=(0.01, 0.05, 0.2), budget: int = 20,
                  tol: Tolerances = DEFAULT_TOL) -> dict:
    records = []
    running = {tau: 1.0 for tau in tau_grid}
    for i, (X1, X2, X3) in enumerate(triples):
        rec = search_triple(X1, X2, X3, tau_grid, budget, tol, index=i)
        records.append(rec)
        for run in rec.runs:
            running[run["tau"]] = max(running[run["tau"]], run["C2"])
    return {"records": records, "max_C2": running, "caveat": CAVEAT}
