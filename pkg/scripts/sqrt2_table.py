"""sqrt(lam_k^2 + lam_(n-k)^2) against sqrt(2) lam_n for Euclidean estimates."""

import argparse

from projlab.enlargements import sqrt2_bound_check

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--m", type=int, default=64)
args = ap.parse_args()

est = {}
print("k,n,lambda_k,lambda_nk,lambda_n,lhs,rhs,slack,p2_norm")
for k, n in [(1, 2), (1, 3), (2, 3), (2, 4)]:
    r = sqrt2_bound_check(k, n, args.m, estimates=est)
    print(f"{k},{n},{r.lambda_k:.8f},{r.lambda_nk:.8f},{r.lambda_n:.8f},"
          f"{r.lhs:.8f},{r.rhs:.8f},{r.slack:.8f},{r.p2_norm:.8f}")
