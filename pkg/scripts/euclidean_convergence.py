"""Estimates of lambda(l_2^n) as the l_inf^m resolution grows."""

import argparse

import numpy as np

from projlab.minproj import euclidean_estimate

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--n", type=int, nargs="*", default=[2, 3])
ap.add_argument("--m", type=int, nargs="*", default=[8, 16, 32, 64])
args = ap.parse_args()

print("n,m,eta,eta_certificate,estimate,limit_low,limit_high")
for n in args.n:
    for m in args.m:
        e = euclidean_estimate(n, m)
        # the copy is within distance 1/(1 - eta) of l_2^n, which brackets the limit
        low, high = (1 - e.eta) * e.lam, e.lam / (1 - e.eta)
        print(f"{n},{m},{e.eta:.6g},{e.eta_certificate},{e.lam:.10f},{low:.10f},{high:.10f}")
print(f"# lambda(l_2^2) = 4/pi = {4 / np.pi:.10f}")
