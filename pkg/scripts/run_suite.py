"""Run every built-in experiment into one output directory."""

import argparse

from projlab.experiments import run_suite

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--out", default="suite_out")
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--only", nargs="*")
args = ap.parse_args()
for name, ok in run_suite(args.out, args.seed, args.only).items():
    print(f"{name:24s} {'ok' if ok else 'FAILED'}")
