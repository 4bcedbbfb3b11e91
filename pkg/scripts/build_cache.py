#!/usr/bin/env python3
"""Pre-build the per-denominator histogram cache for a cost/algorithm pair.

The N = 2**17 standard-algorithm build backs the whole verification grid and
takes a few minutes; everything downstream is then instant.
"""

import argparse
import time

from euclidstats.cache import Cache, resolve_cache_dir
from euclidstats.costs import DigitCost
from euclidstats.ensemble import build_cost_matrix


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--algo", default="G", choices=["G", "K", "O"])
    ap.add_argument("--cost", default="unit")
    ap.add_argument("--N", type=int, default=1 << 17)
    ap.add_argument("--cache", default="./euclid_cache")
    args = ap.parse_args()

    cache = Cache(resolve_cache_dir(args.cache))
    t0 = time.time()
    m = build_cost_matrix(args.algo, DigitCost.from_spec(args.cost), args.N, cache=cache)
    print(
        f"{args.algo}/{args.cost} N={args.N}: |Omega_N| = {m.count()} "
        f"max index = {m.max_index()} ({time.time() - t0:.1f}s)"
    )


if __name__ == "__main__":
    main()
