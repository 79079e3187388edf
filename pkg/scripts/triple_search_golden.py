"""Seeded triple search in l_inf^4 with dims (1, 2, 4); prints the running max of C2 per tau.

The 200-triple default takes about two minutes.
"""

import argparse
import time

from projlab.search import CAVEAT, random_triples, triple_search
from projlab.spaces import NormedSpace

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--count", type=int, default=200)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--budget", type=int, default=20)
args = ap.parse_args()

t0 = time.perf_counter()
out = triple_search(random_triples(args.count, NormedSpace.linf(4), seed=args.seed),
                    (0.01, 0.05, 0.2), args.budget)
flagged = sum(run["flagged"] for rec in out["records"] for run in rec.runs)
for tau, c2 in out["max_C2"].items():
    print(f"tau={tau:<5} max C2={c2:.16g}")
print(f"flagged runs: {flagged}, {time.perf_counter() - t0:.1f}s")
print(CAVEAT)
