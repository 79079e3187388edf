"""Command line front end: ``projlab <subcommand> [flags]``.

Each subcommand builds an :class:`ExperimentConfig` (optionally starting from
``--config``), runs it, prints ``report.json`` to stdout and, with ``--out``,
writes the report, CSV tables and ``timing.json`` there.

Exit status: 0 when every certificate passed, 1 when a run finished but some
certificate failed or the module raised, 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as pio
from .experiments import ExperimentConfig, run, run_suite

FDD_KINDS = {"constant": "constant", "perturb": "perturb", "block": "blocking",
             "interlace": "interlace", "commute": "commute", "limit": "limit"}


def _kv(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment config; flags override its fields")
    common.add_argument("--seed", type=int, help="master seed (nonnegative integer)")
    common.add_argument("--tol", type=float, help="optimization tolerance")
    common.add_argument("--max-dim", type=int, dest="max_dim", help="cap on ambient dimensions")
    common.add_argument("--out", help="directory for report.json, CSV tables and timing.json")
    common.add_argument("--set", action="append", type=_kv, default=[], metavar="KEY=VALUE",
                        help="extra parameter (value parsed as JSON when possible)")
    common.add_argument("--quiet", action="store_true", help="do not print the report")

    ap = argparse.ArgumentParser(prog="projlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("space", parents=[common], help="describe a normed space, evaluate norms")
    s.add_argument("--space", help="space JSON file")
    s.add_argument("--points", help="JSON list of vectors to evaluate")

    s = sub.add_parser("minproj", parents=[common], help="relative or approximate absolute projection constant")
    s.add_argument("--space", help="space JSON file")
    s.add_argument("--subspace", help="subspace JSON file (omit for the l_inf^m embedding estimate)")
    s.add_argument("--tau", type=float)
    s.add_argument("--m", type=int, help="number of functionals of the l_inf^m embedding")
    s.add_argument("--scheme", choices=("grid", "seeded"))

    s = sub.add_parser("factor", parents=[common], help="factor projections through intermediate subspaces")
    s.add_argument("--count", type=int)

    s = sub.add_parser("chain", parents=[common], help="composition tables of a chain of projections")
    s.add_argument("--chain", help="chain JSON file (default: the gamma chain in l_inf^8)")
    s.add_argument("--family", choices=("gamma", "coordinate"))
    s.add_argument("--optimize", action="store_true", help="also run the blow-up minimizer")

    s = sub.add_parser("fdd", parents=[common], help="finite dimensional decomposition tools")
    s.add_argument("action", choices=sorted(FDD_KINDS))
    s.add_argument("--decomposition", help="decomposition JSON file")
    s.add_argument("--instance", help="built-in instance: coordinate, random, tail, random_family")
    s.add_argument("--eps", type=float)
    s.add_argument("--count", type=int)

    s = sub.add_parser("enlargement", parents=[common], help="sum-of-enlargements construction")
    s.add_argument("--instance", choices=("coordinate", "euclidean"))

    s = sub.add_parser("example", parents=[common], help="orthogonal P1 after a near-minimal P2")
    s.add_argument("--k", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--m", type=int)

    s = sub.add_parser("sqrt2", parents=[common], help="sqrt(2) inequality for Euclidean estimates")
    s.add_argument("--m", type=int)

    s = sub.add_parser("search", parents=[common], help="triple search for factorization constants")
    s.add_argument("--family", choices=("random", "coordinate"))
    s.add_argument("--count", type=int)

    sub.add_parser("run", parents=[common], help="run the experiment described by --config")
    s = sub.add_parser("suite", parents=[common], help="run every built-in experiment into --out")
    s.add_argument("--only", nargs="*", help="names of suite entries to run")
    return ap


def _base(args) -> dict:
    if args.config:
        doc = pio.load_json(args.config)
        if not isinstance(doc, dict):
            raise pio.ConfigError("config must be a JSON object")
        return doc
    return {}


def _config(args) -> ExperimentConfig:
    doc = _base(args)
    base_dir = Path(args.config).parent if args.config else Path(".")
    kind = {"search": "triple_search", "fdd": FDD_KINDS.get(getattr(args, "action", ""), "")}.get(
        args.command, args.command)
    if args.command == "run":
        if "kind" not in doc:
            raise pio.ConfigError("run needs --config with a 'kind' field")
    else:
        doc["kind"] = kind
    inputs = dict(doc.get("inputs", {}))
    params = dict(doc.get("params", {}))
    for name in ("space", "subspace", "chain", "decomposition"):
        value = getattr(args, name, None)
        if value:
            inputs[name] = str(Path(value).resolve())
    for name in ("tau", "m", "scheme", "count", "family", "instance", "eps", "k", "n"):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    if getattr(args, "points", None):
        try:
            params["points"] = json.loads(args.points)
        except json.JSONDecodeError as exc:
            raise pio.ConfigError(f"--points is not valid JSON: {exc}") from None
    if getattr(args, "optimize", False):
        params["optimize"] = True
    for key, value in args.set:
        params[key] = value
    doc["inputs"], doc["params"] = inputs, params
    for flag, key in (("seed", "seed"), ("tol", "tol"), ("max_dim", "max_dim"), ("out", "output_dir")):
        value = getattr(args, flag)
        if value is not None:
            doc[key] = value
    return ExperimentConfig.from_json(doc, base_dir)


def _suite(args) -> int:
    if not args.out:
        print("projlab: configuration error: suite needs --out", file=sys.stderr)
        return 2
    status = run_suite(args.out, args.seed or 0, args.only)
    for name, ok in status.items():
        print(f"{name:24s} {'ok' if ok else 'FAILED'}")
    return 0 if all(status.values()) else 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "suite":
        return _suite(args)
    try:
        cfg = _config(args)
        outcome = run(cfg)
    except pio.ConfigError as exc:
        print(f"projlab: configuration error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        sys.stdout.write(pio.dumps(outcome.report))
    if "error" in outcome.report:
        err = outcome.report["error"]
        print(f"projlab: {err['type']}: {err['message']}", file=sys.stderr)
    return 0 if outcome.ok else 1


if __name__ == "__main__":
    sys.exit(main())
