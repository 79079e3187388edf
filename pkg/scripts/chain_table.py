"""Composition sup of the gamma chain against its length, next to coordinate chains."""

import argparse

from projlab.projections import composition_table, coordinate_chain, default_steps, gamma_chain

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--length", type=int, default=8)
ap.add_argument("--gamma", type=float, default=0.9)
args = ap.parse_args()

ch = gamma_chain(args.length, args.gamma)
ch = ch.with_steps(default_steps(ch))
print("L,gamma_sup,coordinate_sup")
for L in range(2, args.length + 1):
    c = coordinate_chain(L)
    coord = composition_table(c.with_steps(default_steps(c))).sup
    print(f"{L},{composition_table(ch.truncate(L)).sup:.12f},{coord:.12f}")
