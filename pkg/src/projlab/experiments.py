"""Batch experiment driver: a config in, a report dict plus CSV tables out.

Every headline number is stored as ``{"value": v, "certificate": kind}`` with
``kind`` one of ``exact`` (LP optimum or closed form), ``bracket`` (an
interval with a gap) or ``sampled`` (empirical, no guarantee).  Wall-clock
times go to a separate ``timing.json`` so ``report.json`` is byte-stable.
"""

from __future__ import annotations

import platform
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import io as pio
from .enlargements import (
    Body,
    Enlargement,
    contains_image,
    example_experiment,
    l1_sum_construction,
    sqrt2_bound_check,
)
from .fdd import (
    Decomposition,
    FDDError,
    HypothesisRefused,
    blocking_step,
    build_interlaced,
    commuting_chain,
    commuting_construction,
    perturb_decomposition,
    random_interlaced_system,
    strong_limit_simulation,
    tail_chain,
)
from .minproj import embed_into_linf, lambda_relative
from .projections import (
    Chain,
    Projection,
    coordinate_chain,
    default_steps,
    composition_table,
    factor_through,
    gamma_chain,
    minimize_chain_blowup,
)
from .search import coordinate_triples, random_triples, triple_search
from .spaces import DEFAULT_TOL, LinearMap, NormedSpace, Subspace, Tolerances, operator_norm

SCHEMA = 1
KINDS = ("space", "minproj", "factor", "chain", "constant", "perturb", "blocking", "interlace",
         "commute", "limit", "enlargement", "example", "sqrt2", "triple_search")
MAX_DIM = 256


def num(value, certificate: str) -> dict:
    return {"value": float(value), "certificate": certificate}


@dataclass
class ExperimentConfig:
    kind: str
    inputs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output_dir: str | None = None
    seed: int = 0
    tol: float | None = None        # overrides the optimization tolerance
    max_dim: int = MAX_DIM

    def __post_init__(self):
        if self.kind not in KINDS:
            raise pio.ConfigError(f"unknown experiment kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise pio.ConfigError("seed must be a nonnegative integer")
        if not 1 <= self.max_dim <= MAX_DIM:
            raise pio.ConfigError(f"max_dim must lie in [1, {MAX_DIM}]")

    @classmethod
    def from_json(cls, doc: dict, base_dir=".") -> "ExperimentConfig":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise pio.ConfigError("config must be an object with a 'kind' field")
        unknown = set(doc) - {"kind", "inputs", "params", "output_dir", "seed", "tol", "max_dim"}
        if unknown:
            raise pio.ConfigError(f"unknown config fields: {sorted(unknown)}")
        inputs = {k: _resolve(v, Path(base_dir)) for k, v in doc.get("inputs", {}).items()}
        return cls(doc["kind"], inputs, dict(doc.get("params", {})), doc.get("output_dir"),
                   int(doc.get("seed", 0)), doc.get("tol"), int(doc.get("max_dim", MAX_DIM)))

    @property
    def tolerances(self) -> Tolerances:
        if self.tol is None:
            return DEFAULT_TOL
        return Tolerances(**{**asdict(DEFAULT_TOL), "opt": float(self.tol)})


def _resolve(value, base: Path):
    """Input references may be file paths (``*.json``) or inline documents."""
    if isinstance(value, str):
        path = Path(value) if Path(value).is_absolute() else base / value
        if not path.is_file():
            raise pio.ConfigError(f"referenced file {value} is not a readable file")
        return pio.load_json(path)
    return value


@dataclass
class Outcome:
    report: dict
    tables: dict
    timing: dict

    @property
    def ok(self) -> bool:
        return bool(self.report.get("ok"))


# ----------------------------------------------------------------------------
# built-in instances


def golden_blocking_instance():
    """``H = W_1 + span{e_2 + 0.01 e_5}`` in the 6-block coordinate decomposition of l_inf^6."""
    amb = NormedSpace.linf(6)
    D = Decomposition.coordinate(amb)
    I = np.eye(6)
    H = Subspace(amb, np.stack([I[0], I[1] + 0.01 * I[4]], axis=1), label="H")
    return D, H, 1


def coordinate_interlaced(N: int = 8):
    D = Decomposition.coordinate(NormedSpace.linf(N))
    chain = [D.partial(n) for n in range(1, N)]
    return build_interlaced(D, chain)


def _space(cfg, key="space", default=None) -> NormedSpace:
    doc = cfg.inputs.get(key)
    if doc is None:
        if default is None:
            raise pio.ConfigError(f"input {key!r} is required for kind {cfg.kind!r}")
        return default
    sp = pio.space_from_json(doc)
    _cap(cfg, sp.dim)
    return sp


def _cap(cfg, dim):
    if dim > cfg.max_dim:
        raise pio.ConfigError(f"dimension {dim} exceeds the cap {cfg.max_dim}")


def _chain(cfg) -> Chain:
    ch = _raw_chain(cfg)
    return ch if ch.steps is not None else ch.with_steps(default_steps(ch))


def _raw_chain(cfg) -> Chain:
    if "chain" in cfg.inputs:
        ch = pio.chain_from_json(cfg.inputs["chain"])
        _cap(cfg, ch.ambient.dim)
        return ch
    p = cfg.params
    family = p.get("family", "gamma")
    n = int(p.get("n", 8))
    _cap(cfg, n)
    if family == "gamma":
        return gamma_chain(n, float(p.get("gamma", 0.9)))
    if family == "coordinate":
        return coordinate_chain(n)
    raise pio.ConfigError(f"unknown chain family {family!r}")


def _decomposition(cfg) -> Decomposition:
    if "decomposition" in cfg.inputs:
        D = pio.decomposition_from_json(cfg.inputs["decomposition"])
    else:
        D = Decomposition.coordinate(NormedSpace.linf(int(cfg.params.get("n", 6))))
    _cap(cfg, D.ambient.dim)
    return D


# ----------------------------------------------------------------------------
# kinds


def _run_space(cfg):
    sp = _space(cfg)
    out = {"dim": sp.dim, "description": sp.describe(), "polyhedral": sp.is_polyhedral}
    if sp.is_polyhedral:
        out["facets"] = None if sp.facet_matrix is None else len(sp.facet_matrix)
        out["vertices"] = None if sp.vertex_matrix is None else len(sp.vertex_matrix)
    pts = cfg.params.get("points")
    rows = []
    if pts is not None:
        P = np.atleast_2d(np.asarray(pts, dtype=float))
        for x in P:
            n = float(sp.norm(x))
            d = float(sp.dual_norm(x)[0])
            rows.append((list(map(float, x)), n, d))
        out["evaluations"] = [{"x": x, "norm": num(n, "exact"), "dual_norm": num(d, "exact")}
                              for x, n, d in rows]
    return out, {}, True


def _run_minproj(cfg):
    p, tol = cfg.params, cfg.tolerances
    tau = float(p.get("tau", 0.05))
    sp = _space(cfg)
    tables = {}
    if "subspace" in cfg.inputs:
        Y = pio.subspace_from_json(cfg.inputs["subspace"], sp)
        res = lambda_relative(Y, sp, tau=tau, tol=tol, seed=cfg.seed)
        extra = {}
    else:
        m = int(p.get("m", 32))
        _cap(cfg, m)
        emb = embed_into_linf(sp, m, p.get("scheme", "grid"), cfg.seed, tol=tol)
        res = lambda_relative(emb.copy, emb.ambient, tau=tau, tol=tol, seed=cfg.seed)
        extra = {"m": m, "eta": num(emb.eta, "exact" if emb.eta_certificate == "exact" else "sampled"),
                 "lower_bound_absolute": num(res.lam * (1 - emb.eta), "bracket")}
    cert = "exact" if res.certificate in ("exact_lp", "trivial") else "bracket"
    if res.trace:
        tables["trace.csv"] = pio.csv_text(["iteration", "best_norm"],
                                           [(100 * i, float(v)) for i, v in enumerate(res.trace)])
    out = {"lambda": num(res.lam, cert), "tau": tau, "certificate": res.certificate,
           "lower": num(res.lower, cert), "upper": num(res.upper, cert),
           "flagged": res.flagged, "projection_matrix": res.projection.matrix, **extra}
    return out, tables, not res.flagged


def _run_factor(cfg):
    tol = cfg.tolerances
    p = cfg.params
    if "X1" in cfg.inputs:
        sp = _space(cfg)
        X1 = pio.subspace_from_json(cfg.inputs["X1"], sp)
        X2 = pio.subspace_from_json(cfg.inputs["X2"], sp)
        triples = [(X1, X2, Subspace.whole(sp))]
    else:
        N = int(p.get("n", 8))
        _cap(cfg, N)
        triples = _random_factor_triples(int(p.get("count", 200)), N, cfg.seed)
    rows, worst = [], {"product": 0.0, "idempotence": 0.0, "image": 0.0, "kernel": 0.0}
    for i, (X1, X2, X3) in enumerate(triples):
        P = lambda_relative(X1, X3, tol=tol).projection if p.get("projection") == "minimal" \
            else _oblique(X1, X3, cfg.seed + i)
        P1, P2 = factor_through(P, X2)
        r = factor_residuals(P, P1, P2)
        for k in worst:
            worst[k] = max(worst[k], r[k])
        rows.append((i, X1.dim, X2.dim, X3.dim, r["product"], r["kernel"]))
    ok = worst["product"] <= 1e-8 and max(worst["idempotence"], worst["image"]) <= 1e-9 and worst["kernel"] <= 1e-8
    tables = {"factor.csv": pio.csv_text(["index", "d1", "d2", "d3", "product_residual", "kernel_residual"], rows)}
    return {"count": len(rows), "worst": {k: num(v, "exact") for k, v in worst.items()}}, tables, ok


def _random_factor_triples(count, N, seed):
    amb = NormedSpace.linf(N)
    for ss in np.random.SeedSequence(seed).spawn(count):
        rng = np.random.default_rng(ss)
        d2 = int(rng.integers(1, min(6, N - 1) + 1))
        d1 = int(rng.integers(1, d2 + 1))
        B2 = rng.standard_normal((N, d2))
        X2 = Subspace(amb, B2)
        X1 = Subspace(amb, B2 @ rng.standard_normal((d2, d1)))
        yield X1, X2, Subspace.whole(amb)


def _oblique(X1, X3, seed):
    """A seeded projection of ``X3`` onto ``X1`` with a random kernel."""
    rng = np.random.default_rng(seed)
    N = X3.dim
    J = np.linalg.lstsq(X3.basis, X1.basis, rcond=None)[0]
    K = np.linalg.qr(np.hstack([J, rng.standard_normal((N, N - X1.dim))]))[0][:, X1.dim:]
    K = K + 0.2 * J @ rng.standard_normal((X1.dim, N - X1.dim))
    G = np.hstack([J, K])
    return Projection(X3, X1, np.linalg.inv(G)[:X1.dim])


def factor_residuals(P, P1, P2) -> dict:
    """Product, projection and kernel residuals of a factorization ``P = P1 P2``."""
    prod = float(np.abs(P1.matrix @ P2.matrix - P.matrix).max())
    cert = [P1.certify(), P2.certify()]
    # ker P1 (ambient vectors in X2) must equal ker P restricted to X2
    K1 = P1.domain.basis @ P1.kernel() if P1.kernel().size else np.zeros((P1.domain.ambient.dim, 0))
    kP = P.domain.basis @ P.kernel()
    inter = _intersection_dim(kP, P1.domain.basis)
    dim_ok = K1.shape[1] == inter
    if K1.shape[1]:
        Q = np.linalg.qr(kP)[0]
        contain = float(np.abs(K1 - Q @ (Q.T @ K1)).max())
        contain = max(contain, float(np.abs(P.matrix @ np.linalg.lstsq(P.domain.basis, K1, rcond=None)[0]).max()))
    else:
        contain = 0.0
    return {"product": prod,
            "idempotence": max(c["idempotence"] for c in cert),
            "image": max(c["image"] for c in cert),
            "kernel": contain if dim_ok else np.inf}


def _intersection_dim(A, B, tol=1e-9) -> int:
    if A.shape[1] == 0 or B.shape[1] == 0:
        return 0
    ra = np.linalg.matrix_rank(A, tol)
    rb = np.linalg.matrix_rank(B, tol)
    return int(ra + rb - np.linalg.matrix_rank(np.hstack([A, B]), tol))


def _run_chain(cfg):
    tol = cfg.tolerances
    ch = _chain(cfg)
    p = cfg.params
    tables = {}
    if "subsequence" in p:
        ch = ch.subsequence(p["subsequence"])
    lengths = list(range(2, ch.length + 1))
    sups = []
    for L in lengths:
        sups.append(composition_table(ch.truncate(L), tol).sup)
    full = composition_table(ch, tol)
    out = {"length": ch.length, "sup": num(full.sup, "exact"), "argmax": list(full.argmax),
           "sup_by_length": [{"L": L, "sup": num(s, "exact")} for L, s in zip(lengths, sups)],
           "ratio_first_last": num(sups[-1] / sups[0], "exact") if sups else None}
    tables["composition_table.csv"] = full.to_csv()
    tables["sup_by_length.csv"] = pio.csv_text(["L", "sup"], list(zip(lengths, sups)))
    if p.get("optimize", False):
        b = minimize_chain_blowup(ch, int(p.get("sweeps", 50)), tol, cfg.seed)
        out["optimized"] = {"sup": num(b.sup, "exact"), "default_sup": num(b.default_sup, "exact"),
                            "sweeps": b.sweeps, "flagged": b.flagged}
        tables["blowup_history.csv"] = pio.csv_text(["sweep", "sup"], list(enumerate(b.history)))
    return out, tables, True


def _run_constant(cfg):
    D = _decomposition(cfg)
    norms = D.norms
    rows = [(n, v) for n, v in enumerate(norms, start=1)]
    out = {"K": num(D.K, "exact"), "blocks": D.length, "law_residual": num(D.law_residual(), "exact"),
           "canonical_norms": [num(v, "exact") for v in norms]}
    return out, {"canonical_norms.csv": pio.csv_text(["n", "norm"], rows)}, D.law_residual() <= 1e-9


def _run_perturb(cfg):
    D = _decomposition(cfg)
    p = cfg.params
    count = int(p.get("count", 100))
    frac = float(p.get("fraction", 0.25))        # sum of eps as a fraction of 1/(2K)
    K, L, N = D.K, D.length, D.ambient.dim
    rows, ok, refused = [], True, 0
    for i, ss in enumerate(np.random.SeedSequence(cfg.seed).spawn(count)):
        rng = np.random.default_rng(ss)
        eps_each = frac / (2 * K * L)
        E_list = []
        for W in D.blocks:
            G = rng.standard_normal((N, W.dim))
            base = operator_norm(LinearMap(W, W.ambient, G), DEFAULT_TOL).value
            E_list.append(W.basis + (eps_each * 0.999 / base) * G)
        try:
            r = perturb_decomposition(D, E_list)
            rows.append((i, r.eps_sum, r.limit, r.K_new, "ok"))
        except HypothesisRefused as exc:
            refused += 1
            rows.append((i, exc.measured_sum, exc.limit, float("nan"), "refused"))
            ok = ok and frac >= 1.0
        except FDDError:
            ok = False
            rows.append((i, float("nan"), 1 / (2 * K), float("nan"), "failed"))
    worst_K = max((r[3] for r in rows if r[4] == "ok"), default=float("nan"))
    out = {"K": num(K, "exact"), "count": count, "refused": refused, "fraction": frac,
           "worst_K_new": num(worst_K, "exact")}
    return out, {"perturb.csv": pio.csv_text(["index", "eps_sum", "limit", "K_new", "status"], rows)}, ok


def _run_blocking(cfg):
    p = cfg.params
    if "decomposition" in cfg.inputs:
        D = _decomposition(cfg)
        H = pio.subspace_from_json(cfg.inputs["H"], D.ambient)
        k = int(p.get("k", 1))
    else:
        D, H, k = golden_blocking_instance()
    eps = float(p.get("eps", 0.1))
    r = blocking_step(D, H, k, eps)
    res = r.residuals
    ok = res["distortion"] <= eps and res["h_recovered"] <= 1e-8 and res["fixes_head"] <= 1e-10
    out = {"m": r.m, "delta": r.delta, "eps": eps,
           "residuals": {k_: num(v, "exact") for k_, v in res.items()},
           "blocks": r.blocking.length}
    return out, {}, ok


def _interlaced(cfg):
    p = cfg.params
    inst = p.get("instance", "coordinate")
    if inst == "coordinate":
        return coordinate_interlaced(int(p.get("n", 8)))
    if inst == "random":
        return random_interlaced_system(cfg.seed)
    if inst == "tail":
        amb = NormedSpace.linf(int(p.get("n", 8)))
        D = Decomposition.coordinate(amb)
        return build_interlaced(D, tail_chain(amb, float(p.get("decay", 0.1))))
    raise pio.ConfigError(f"unknown interlaced instance {inst!r}")


def _run_interlace(cfg):
    S = _interlaced(cfg)
    out = {"indices": list(S.indices), "perturbations": [num(v, "exact") for v in S.perturbations],
           "schedule": list(S.schedule), "interlacing_residual": num(S.interlacing_residual(), "exact"),
           "blocks": S.decomposition.length, "chain_dims": [X.dim for X in S.chain]}
    ok = all(a <= b + 1e-15 for a, b in zip(S.perturbations, S.schedule))
    return out, {}, ok


def _run_commute(cfg):
    p = cfg.params
    if p.get("instance") == "random_family":
        count = int(p.get("count", 100))
        worst, rows = {}, []
        for s in range(count):
            r = commuting_construction(random_interlaced_system(cfg.seed + s), check=False)
            for k, v in r.residuals.items():
                worst[k] = max(worst.get(k, -np.inf), v)
            rows.append((s, r.sup, r.residuals["pairwise"], r.residuals["norm_bound_excess"]))
        ok = all(v <= 1e-9 for k, v in worst.items() if k != "norm_bound_excess") \
            and worst["norm_bound_excess"] <= 1e-6
        tables = {"commute.csv": pio.csv_text(["seed", "sup", "pairwise", "norm_bound_excess"], rows)}
        return {"count": count, "worst": {k: num(v, "exact") for k, v in worst.items()}}, tables, ok
    S = _interlaced(cfg)
    r = commuting_construction(S, check=False)
    rows = [(n, a, b) for n, (a, b) in enumerate(zip(r.norms, r.bounds), start=1)]
    ok = all(v <= 1e-9 for k, v in r.residuals.items() if k != "norm_bound_excess") \
        and r.residuals["norm_bound_excess"] <= 1e-6
    out = {"sup": num(r.sup, "exact"), "residuals": {k: num(v, "exact") for k, v in r.residuals.items()}}
    return out, {"commute.csv": pio.csv_text(["n", "norm", "bound"], rows)}, ok


def _run_limit(cfg):
    p = cfg.params
    if p.get("source", "commuting") == "commuting":
        S = _interlaced(cfg)
        ch = commuting_chain(S, commuting_construction(S))
    else:
        ch = _chain(cfg)
    cap = float(p.get("bound_cap", 1e6))
    r = strong_limit_simulation(ch, cap, int(p.get("samples", 64)), cfg.seed, cfg.tolerances)
    ok = max(r.residuals.values()) <= 1e-9
    out = {"table_sup": num(r.table_sup, "exact"), "max_T": num(max(r.norms), "exact"),
           "residuals": {k: num(v, "exact") for k, v in r.residuals.items()},
           "profile": [num(v, "sampled") for v in r.profile]}
    rows = [(n, a, b) for n, (a, b) in enumerate(zip(r.norms, r.profile), start=1)]
    return out, {"limit.csv": pio.csv_text(["n", "norm_T", "sampled_defect"], rows)}, ok


def _run_enlargement(cfg):
    p, tol = cfg.params, cfg.tolerances
    if p.get("instance", "coordinate") == "coordinate":
        Z = NormedSpace.linf(4)
        I = np.eye(4)
        X, Y = Subspace(Z, I[:, :2]), Subspace(Z, I[:, 2:])
    else:
        Z = NormedSpace.linf(16)
        e = embed_into_linf(NormedSpace.l2(2), 8, tol=tol)
        U = e.copy.basis
        X = Subspace(Z, np.vstack([U, np.zeros_like(U)]))
        Y = Subspace(Z, np.vstack([np.zeros_like(U), U]))
    lx = lambda_relative(X, Z, tol=tol).lam
    ly = lambda_relative(Y, Z, tol=tol).lam
    A_X = Enlargement.ball(X, lx) if "A_X" not in cfg.inputs else pio.enlargement_from_json(cfg.inputs["A_X"], X)
    A_Y = Enlargement.ball(Y, ly) if "A_Y" not in cfg.inputs else pio.enlargement_from_json(cfg.inputs["A_Y"], Y)
    r = l1_sum_construction(X, Y, Z, A_X, A_Y, tol=tol)
    ok = r.residuals["identity_on_sum"] <= 1e-9 and r.containment.margin >= -1e-8
    out = {"lambda_X": num(lx, "exact"), "lambda_Y": num(ly, "exact"),
           "margin": num(r.containment.margin, "exact"), "route": r.containment.route,
           "holds": r.containment.holds,
           "residuals": {k: num(v, "exact") for k, v in r.residuals.items()}}
    return out, {}, ok


def _run_example(cfg):
    p = cfg.params
    r = example_experiment(int(p.get("k", 1)), int(p.get("n", 3)), int(p.get("m", 64)),
                           float(p.get("tau", 0.01)), cfg.tolerances)
    out = {"lambda_n": num(r.lambda_n, "exact"), "lambda_k": num(r.lambda_k, "exact"),
           "eta": num(r.eta, "exact"), "composite_norm": num(r.composite_norm, "exact"),
           "lower_bound": num(r.lower_bound, "exact"), "gap_ratio": num(r.gap_ratio, "exact"),
           "bound_holds": r.bound_holds, "exceeds_lambda_k": r.exceeds_lambda_k}
    return out, {}, r.bound_holds and r.exceeds_lambda_k


def _run_sqrt2(cfg):
    p = cfg.params
    pairs = p.get("pairs", [[1, 2], [1, 3], [2, 3], [2, 4]])
    m = int(p.get("m", 64))
    est = {}
    rows, runs, ok = [], [], True
    for k, n in pairs:
        r = sqrt2_bound_check(int(k), int(n), m, tol=cfg.tolerances, seed=cfg.seed, estimates=est)
        ok = ok and r.inequality_holds and r.p2_bound_holds
        runs.append({"k": r.k, "n": r.n, "lambda_k": num(r.lambda_k, "exact"),
                     "lambda_nk": num(r.lambda_nk, "exact"), "lambda_n": num(r.lambda_n, "exact"),
                     "lhs": num(r.lhs, "exact"), "rhs": num(r.rhs, "exact"), "slack": num(r.slack, "exact"),
                     "p2_norm": num(r.p2_norm, "exact"), "margin": num(r.containment_margin, "exact"),
                     "ambient_dim": r.ambient_dim})
        rows.append((r.k, r.n, r.lhs, r.rhs, r.slack, r.p2_norm))
    tables = {"sqrt2.csv": pio.csv_text(["k", "n", "lhs", "rhs", "slack", "p2_norm"], rows)}
    return {"m": m, "runs": runs}, tables, ok


def _run_triple_search(cfg):
    p = cfg.params
    taus = tuple(float(t) for t in p.get("tau_grid", (0.01, 0.05, 0.2)))
    family = p.get("family", "random")
    n = int(p.get("n", 4))
    _cap(cfg, n)
    if family == "random":
        dims = tuple(int(d) for d in p.get("dims", (1, 2, 4)))
        triples = random_triples(int(p.get("count", 200)), NormedSpace.linf(n), dims, cfg.seed)
    elif family == "coordinate":
        triples = coordinate_triples(n)
    else:
        raise pio.ConfigError(f"unknown triple family {family!r}")
    r = triple_search(triples, taus, int(p.get("budget", 20)), cfg.tolerances)
    rows = []
    for rec in r["records"]:
        for run in rec.runs:
            rows.append((rec.index, *rec.dims, rec.lambda_13, rec.lambda_23, run["tau"], run["C2"],
                         run["p2_ratio"], run["sweeps"], int(run["flagged"])))
    header = ["index", "d1", "d2", "d3", "lambda_13", "lambda_23", "tau", "C2", "p2_ratio", "sweeps", "flagged"]
    out = {"count": len(r["records"]), "max_C2": {str(t): num(v, "sampled") for t, v in r["max_C2"].items()},
           "flagged": sum(run["flagged"] for rec in r["records"] for run in rec.runs),
           "caveat": r["caveat"]}
    return out, {"triples.csv": pio.csv_text(header, rows)}, True


_DISPATCH = {
    "space": _run_space, "minproj": _run_minproj, "factor": _run_factor, "chain": _run_chain,
    "constant": _run_constant, "perturb": _run_perturb, "blocking": _run_blocking,
    "interlace": _run_interlace, "commute": _run_commute, "limit": _run_limit,
    "enlargement": _run_enlargement, "example": _run_example, "sqrt2": _run_sqrt2,
    "triple_search": _run_triple_search,
}


def environment(cfg: ExperimentConfig) -> dict:
    return {"package": __version__, "numpy": np.__version__, "python": platform.python_version(),
            "tolerances": asdict(cfg.tolerances)}


def run(cfg: ExperimentConfig, write: bool = True) -> Outcome:
    """Dispatch ``cfg`` to its module; module errors become part of the report."""
    start = time.perf_counter()
    report = {"schema": SCHEMA, "config": {"kind": cfg.kind, "inputs": cfg.inputs, "params": cfg.params,
                                           "seed": cfg.seed, "tol": cfg.tol, "max_dim": cfg.max_dim},
              "environment": environment(cfg)}
    tables = {}
    try:
        results, tables, ok = _DISPATCH[cfg.kind](cfg)
        report["results"] = results
        report["ok"] = bool(ok)
    except pio.ConfigError:
        raise
    except Exception as exc:            # noqa: BLE001 - reported, exit status reflects it
        report["results"] = None
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["ok"] = False
    elapsed = time.perf_counter() - start
    timing = {"kind": cfg.kind, "wall_seconds": elapsed, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S")}
    outcome = Outcome(report, tables, timing)
    if write and cfg.output_dir:
        pio.write_outputs(cfg.output_dir, report, tables, timing)
    return outcome


def default_suite(seed: int = 0) -> dict:
    """Named configs covering every experiment kind at acceptance scale."""
    linf3 = {"dim": 3, "norm": {"kind": "lp", "p": "inf"}, "label": "linf3"}
    l2 = {"dim": 2, "norm": {"kind": "lp", "p": 2}, "label": "l2^2"}
    c = ExperimentConfig
    return {
        "space": c("space", {"space": linf3}, {"points": [[1.0, -2.0, 0.5]]}, seed=seed),
        "minproj_coordinate": c("minproj", {"space": linf3, "subspace": {"basis": [[1, 0, 0]]}}, seed=seed),
        "minproj_l2_m16": c("minproj", {"space": l2}, {"m": 16}, seed=seed),
        "factor": c("factor", {}, {"count": 200}, seed=seed),
        "chain_gamma": c("chain", {}, {"family": "gamma"}, seed=seed),
        "chain_coordinate": c("chain", {}, {"family": "coordinate"}, seed=seed),
        "constant": c("constant", {}, {"n": 6}, seed=seed),
        "perturb": c("perturb", {}, {"n": 6, "count": 100}, seed=seed),
        "blocking": c("blocking", {}, {"eps": 0.1}, seed=seed),
        "interlace": c("interlace", {}, {"instance": "tail", "decay": 0.1}, seed=seed),
        "commute_coordinate": c("commute", {}, {"instance": "coordinate"}, seed=seed),
        "commute_random": c("commute", {}, {"instance": "random_family", "count": 100}, seed=seed),
        "limit": c("limit", {}, {"instance": "tail", "decay": 0.1}, seed=seed),
        "enlargement_coordinate": c("enlargement", {}, {"instance": "coordinate"}, seed=seed),
        "enlargement_euclidean": c("enlargement", {}, {"instance": "euclidean"}, seed=seed),
        "example": c("example", {}, {"k": 1, "n": 3, "m": 64}, seed=seed),
        "sqrt2": c("sqrt2", {}, {"m": 64}, seed=seed),
        "triple_search": c("triple_search", {}, {"count": 40}, seed=seed),
    }


def run_suite(out_dir, seed: int = 0, names=None) -> dict:
    """Run the suite, one subdirectory per experiment; returns ``{name: ok}``."""
    out = Path(out_dir)
    status = {}
    for name, cfg in default_suite(seed).items():
        if names is not None and name not in names:
            continue
        cfg.output_dir = str(out / name)
        status[name] = run(cfg).ok
    pio.write_outputs(out, {"schema": SCHEMA, "status": status}, {}, {})
    return status
