"""JSON (de)serialization of spaces, subspaces, chains, bodies and reports."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .spaces import NormedSpace, Subspace


class ConfigError(ValueError):
    pass


def _p(value) -> float:
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity", "oo"):
            return math.inf
        return float(value)
    return float(value)


def space_from_json(doc) -> NormedSpace:
    try:
        dim = int(doc["dim"])
        norm = doc["norm"]
        kind = norm["kind"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"space needs 'dim' and 'norm.kind': {exc}") from None
    label = doc.get("label", "")
    if kind == "lp":
        return NormedSpace.lp(dim, _p(norm.get("p", 2)), label=label)
    if kind in ("vertices", "facets"):
        pts = norm.get("points", norm.get(kind))
        if pts is None:
            raise ConfigError(f"{kind} norm needs a 'points' list")
        arr = np.asarray(pts, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != dim:
            raise ConfigError(f"{kind} points must be vectors of length {dim}")
        ctor = NormedSpace.from_vertices if kind == "vertices" else NormedSpace.from_facets
        return ctor(arr, label=label)
    raise ConfigError(f"unknown norm kind {kind!r}")


def space_to_json(space: NormedSpace) -> dict:
    if space.kind == "lp":
        if space.transform is not None:
            raise ConfigError("sections of lp spaces are serialized through their subspace")
        return {"dim": space.dim, "norm": {"kind": "lp", "p": "inf" if math.isinf(space.p) else space.p},
                "label": space.label}
    return {"dim": space.dim, "norm": {"kind": space.kind, "points": space.points.tolist()},
            "label": space.label}


def subspace_from_json(doc, ambient: NormedSpace | None = None) -> Subspace:
    if isinstance(doc, dict):
        if "ambient" in doc:
            ambient = space_from_json(doc["ambient"])
        basis = doc.get("basis")
        label = doc.get("label", "")
    else:
        basis, label = doc, ""
    if ambient is None:
        raise ConfigError("subspace needs an ambient space")
    if basis is None:
        raise ConfigError("subspace needs a 'basis' list")
    B = np.asarray(basis, dtype=float).reshape(-1, ambient.dim)
    return Subspace(ambient, B.T, label)


def chain_from_json(doc, ambient: NormedSpace | None = None):
    from .projections import Chain, Projection

    if "ambient" in doc:
        ambient = space_from_json(doc["ambient"])
    if ambient is None:
        raise ConfigError("chain needs an ambient space")
    subs = tuple(subspace_from_json(b, ambient) for b in doc["subspaces"])
    steps = None
    if doc.get("steps") is not None:
        steps = tuple(Projection(subs[n + 1], subs[n],
                                 np.asarray(M, dtype=float).reshape(subs[n].dim, subs[n + 1].dim))
                      for n, M in enumerate(doc["steps"]))
    return Chain(subs, steps)


def chain_to_json(chain) -> dict:
    doc = {"ambient": space_to_json(chain.ambient),
           "subspaces": [s.basis.T.tolist() for s in chain.subspaces]}
    if chain.steps is not None:
        doc["steps"] = [P.matrix.ravel().tolist() for P in chain.steps]
    return doc


def enlargement_from_json(doc, space):
    from .enlargements import Body, Enlargement

    out = []
    for item in doc["summands"]:
        body = item["body"]
        kind = body.get("kind", "lp_ball" if "p" in body else "polytope")
        if kind == "lp_ball":
            basis = np.asarray(body.get("basis", np.eye(space.dim)), dtype=float).reshape(-1, space.dim)
            out.append((float(item["scale"]), Body.lp_ball(_p(body["p"]), basis.T)))
        elif kind == "polytope":
            out.append((float(item["scale"]), Body.polytope(body["vertices"])))
        elif kind == "unit_ball":
            out.append((float(item["scale"]), Body(space.induced if hasattr(space, "induced") else space,
                                                   np.eye(space.dim))))
        else:
            raise ConfigError(f"unknown body kind {kind!r}")
    return Enlargement(space, tuple(out))


def decomposition_from_json(doc):
    from .fdd import Decomposition

    amb = space_from_json(doc["ambient"])
    if doc.get("blocks") == "coordinate" or "blocks" not in doc:
        return Decomposition.coordinate(amb, doc.get("sizes"))
    return Decomposition(amb, tuple(subspace_from_json(b, amb) for b in doc["blocks"]))


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None


def to_plain(obj):
    """Recursively convert numpy values into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_plain(obj), sort_keys=True, indent=2) + "\n"


def csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def write_outputs(out_dir, report: dict, tables: dict, timing: dict) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(dumps(report))
    for name, text in tables.items():
        (out / name).write_text(text)
    (out / "timing.json").write_text(dumps(timing))
    return out
