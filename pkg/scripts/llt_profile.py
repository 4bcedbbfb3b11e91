#!/usr/bin/env python3
"""Export CLT/LLT diagnostics across a denominator grid for external plotting.

Writes one KS row per grid point and the local-limit table at the largest N.
"""

import argparse
import csv
import math

from euclidstats.cache import Cache, resolve_cache_dir
from euclidstats.costs import DigitCost
from euclidstats.ensemble import InputSet, build_cost_matrix, gaussian_diagnostics, summarize, write_llt_csv
from euclidstats.spectral import constants


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algo", default="G", choices=["G", "K", "O"])
    ap.add_argument("--cost", default="unit")
    ap.add_argument("--N", type=int, nargs="+", default=[10**3, 10**4, 10**5])
    ap.add_argument("--cache", default="./euclid_cache")
    ap.add_argument("--prefix", default="llt_profile")
    args = ap.parse_args()

    cost = DigitCost.from_spec(args.cost)
    cache = Cache(resolve_cache_dir(args.cache))
    matrix = build_cost_matrix(args.algo, cost, max(args.N), cache=cache)
    bundle = constants(args.algo, cost)
    mu_c, delta_c = bundle.mu_c, math.sqrt(bundle.delta2_c)

    with open(f"{args.prefix}_ks.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "count", "ks", "bound_1.2_over_sqrt_logN"])
        for n in sorted(args.N):
            s = summarize(InputSet(args.algo, n), cost, k_max=2, matrix=matrix)
            ks, table = gaussian_diagnostics(s, mu_c, delta_c)
            w.writerow([n, s.count, f"{ks:.6f}", f"{1.2 / math.sqrt(math.log(n)):.6f}"])
    write_llt_csv(table, f"{args.prefix}_table.csv")
    print(f"-> {args.prefix}_ks.csv, {args.prefix}_table.csv")


if __name__ == "__main__":
    main()
