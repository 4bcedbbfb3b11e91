#!/usr/bin/env python3
"""Print the growth/fluctuation constants for the three systems and a few costs."""

import argparse

from euclidstats.costs import DigitCost
from euclidstats.spectral import OperatorConfig, constants

COSTS = {
    "unit": DigitCost.unit(),
    "indicator:1": DigitCost.indicator(1),
    "indicator:2": DigitCost.indicator(2),
    "bits": DigitCost.binary_length(),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree", type=int, default=40)
    ap.add_argument("--m-cap", type=int, default=64)
    args = ap.parse_args()
    cfg = OperatorConfig(degree=args.degree, m_cap=args.m_cap)

    header = f"{'algo':<5}{'cost':<13}{'mu':>12}{'delta2':>12}{'mu_hat':>12}{'mu(c)':>12}{'delta2(c)':>12}{'chi(c)':>12}"
    print(header)
    print("-" * len(header))
    for aid in "GKO":
        for name, cost in COSTS.items():
            if aid in "KO" and name == "indicator:2" and aid == "O":
                continue  # even quotients never occur in the odd system
            if aid == "K" and name == "indicator:1":
                continue  # quotient 1 never occurs in the centered system
            b = constants(aid, cost, cfg)
            print(
                f"{aid:<5}{name:<13}{b.mu:>12.8f}{b.delta2:>12.8f}{b.mu_hat:>12.8f}"
                f"{b.mu_c:>12.8f}{b.delta2_c:>12.8f}{b.lambda_sw:>12.8f}"
            )


if __name__ == "__main__":
    main()
