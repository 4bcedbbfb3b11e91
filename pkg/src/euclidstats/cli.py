"""Command-line interface.

Subcommands: stats, constants, verify, smooth, uni, real.  All flags are
long-form.  Exit codes: 0 ok, 2 bad configuration, 3 cache corruption,
4 numerical inconsistency, 5 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from .cache import Cache, CacheError, SCHEMA_VERSION, resolve_cache_dir
from .core import ALGORITHMS, DomainError
from .costs import DigitCost
from . import ensemble as ens
from . import realdyn, spectral, verify

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CACHE = 3
EXIT_NUMERIC = 4
EXIT_CHECK_FAILED = 5


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", default="G", choices=sorted(ALGORITHMS))
    p.add_argument("--cost", default="unit", help="unit | indicator:m | bits | table:<path>")
    p.add_argument("--cache", default="./euclid_cache", help="cache directory (EUCLID_CACHE_DIR overrides)")
    p.add_argument("--out", default=None, help="output path or prefix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="euclidstats")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="exact ensemble summary: moments + histogram")
    _add_common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--full", action="store_true", help="use the non-coprime input set")
    p.add_argument("--llt", action="store_true", help="also write the local-limit table CSV")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("constants", help="spectral constants bundle")
    _add_common(p)
    p.add_argument("--degree", type=int, default=40)
    p.add_argument("--m-cap", type=int, default=64)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", default="all", help=f"one of {sorted(verify.SUITES)} or all")
    p.add_argument("--algo", default="G", choices=sorted(ALGORITHMS),
                   help="system used by the single-algorithm suites")
    p.add_argument("--N", type=int, default=None,
                   help="denominator ceiling; prunes the heavy grids for smoke runs")
    p.add_argument("--cache", default="./euclid_cache")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("smooth", help="smoothed-model summary and TV distance")
    _add_common(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--gamma", type=float, default=0.5)
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("uni", help="branch separation ratio table")
    _add_common(p)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--m-cap", type=int, default=30)
    p.set_defaults(func=cmd_uni)

    p = sub.add_parser("real", help="truncated-trajectory sampling check")
    _add_common(p)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=verify.REAL_SEED)
    p.set_defaults(func=cmd_real)
    return parser


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _csv_header_comment(fh, args: argparse.Namespace) -> None:
    fh.write(f"# schema_version={SCHEMA_VERSION} config={json.dumps(_config_dict(args))}\n")


def cmd_stats(args: argparse.Namespace) -> int:
    cost = DigitCost.from_spec(args.cost)
    cache = Cache(resolve_cache_dir(args.cache))
    iset = ens.InputSet(args.algo, args.N, reduced=not args.full)
    summary = ens.summarize(iset, cost, k_max=args.kmax, cache=cache)
    prefix = args.out or f"stats_{args.algo}_{cost.descriptor().replace(':', '-')}_{args.N}"
    payload = summary.to_payload()
    payload["config"] = _config_dict(args)
    Path(f"{prefix}.json").write_text(json.dumps(payload, indent=1))
    with open(f"{prefix}_hist.csv", "w", newline="") as fh:
        _csv_header_comment(fh, args)
        w = csv.writer(fh)
        w.writerow(["j", "cost_value", "count"])
        for j, c in sorted(summary.histogram.items()):
            w.writerow([j, str(Fraction(j) * summary.span), c])
    if args.llt:
        bundle = spectral.constants(args.algo, cost)
        _, table = ens.gaussian_diagnostics(summary, bundle.mu_c, math.sqrt(bundle.delta2_c))
        with open(f"{prefix}_llt.csv", "w", newline="") as fh:
            _csv_header_comment(fh, args)
            w = csv.writer(fh)
            w.writerow(["x", "scaled_prob", "gauss_density"])
            for row in table:
                w.writerow([f"{row.x:.12g}", f"{row.scaled_prob:.12g}", f"{row.gauss:.12g}"])
    print(f"count={summary.count} histogram bins={len(summary.histogram)} -> {prefix}.json")
    return EXIT_OK


def cmd_constants(args: argparse.Namespace) -> int:
    cost = DigitCost.from_spec(args.cost)
    cfg = spectral.OperatorConfig(degree=args.degree, m_cap=args.m_cap)
    bundle = spectral.constants(args.algo, cost, cfg)
    out = args.out or f"constants_{args.algo}_{cost.descriptor().replace(':', '-')}.json"
    payload = json.loads(bundle.to_json())
    payload["schema_version"] = SCHEMA_VERSION
    payload["config"].update(_config_dict(args))
    Path(out).write_text(json.dumps(payload, indent=1))
    print(
        f"{args.algo}/{cost.descriptor()}: mu={bundle.mu:.9f} delta2={bundle.delta2:.9f} "
        f"mu_c={bundle.mu_c:.9f} delta2_c={bundle.delta2_c:.9f} muc_check={bundle.muc_check}"
    )
    print(f"-> {out}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    cache = Cache(resolve_cache_dir(args.cache))
    ctx = verify.VerifyContext(cache=cache, algo_id=args.algo)
    if args.N:
        ctx.grid_max = args.N
        ctx.identities_v_max = min(args.N, 300)
    rows = verify.run_suite(args.suite, ctx)
    out = args.out or "verify_report.csv"
    with open(out, "w", newline="") as fh:
        _csv_header_comment(fh, args)
        w = csv.writer(fh)
        w.writerow(["check", "target", "observed", "tolerance", "result", "note"])
        for row in rows:
            w.writerow(row.as_csv_row())
    width = max(len(r.name) for r in rows)
    for row in rows:
        status = "pass" if row.passed else "FAIL"
        print(f"{row.name:<{width}}  {status}  observed={row.observed}  target={row.target}")
    failed = [r for r in rows if not r.passed]
    print(f"{len(rows) - len(failed)}/{len(rows)} checks passed -> {out}")
    return EXIT_OK if not failed else EXIT_CHECK_FAILED


def cmd_smooth(args: argparse.Namespace) -> int:
    cost = DigitCost.from_spec(args.cost)
    cache = Cache(resolve_cache_dir(args.cache))
    iset = ens.InputSet(args.algo, args.N)
    matrix = ens.build_cost_matrix(args.algo, cost, args.N, cache=cache)
    summary = ens.smoothed(iset, cost, args.gamma, matrix=matrix)
    tv = ens.smoothing_total_variation(iset, cost, args.gamma, matrix=matrix)
    out = args.out or f"smooth_{args.algo}_{args.N}.json"
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": _config_dict(args),
        "N": args.N,
        "gamma": args.gamma,
        "window": summary.window,
        "counts": {str(q): c for q, c in summary.counts.items()},
        "mixture_moments": [str(m) for m in summary.mixture_moments],
        "mixture_histogram": {str(j): str(p) for j, p in sorted(summary.mixture_histogram.items())},
        "tv_distance": tv,
    }
    Path(out).write_text(json.dumps(payload, indent=1))
    print(f"window={summary.window} tv={tv:.6g} -> {out}")
    return EXIT_OK


def cmd_uni(args: argparse.Namespace) -> int:
    out = args.out or f"uni_{args.algo}.csv"
    with open(out, "w", newline="") as fh:
        _csv_header_comment(fh, args)
        w = csv.writer(fh)
        w.writerow(["depth", "eta", "branches", "worst_union", "tail_bound", "ratio"])
        for n in range(1, args.n_max + 1):
            res = ens.uni_check(args.algo, n, args.a, args.m_cap)
            w.writerow(
                [n, f"{res.eta:.6g}", res.branch_count, f"{res.worst_union:.6g}",
                 f"{res.tail_bound:.6g}", f"{res.worst_ratio:.6g}"]
            )
            print(f"n={n} eta={res.eta:.4g} ratio={res.worst_ratio:.4g}")
    print(f"-> {out}")
    return EXIT_OK


def cmd_real(args: argparse.Namespace) -> int:
    cost = DigitCost.from_spec(args.cost)
    report = realdyn.real_clt_check(args.algo, cost, args.n, args.samples, args.seed)
    out = args.out or f"real_{args.algo}_{cost.descriptor().replace(':', '-')}.csv"
    with open(out, "w", newline="") as fh:
        _csv_header_comment(fh, args)
        w = csv.writer(fh)
        w.writerow(["sample_index", "Cn", "standardized"])
        scale = math.sqrt(report.delta_hat2 * args.n)
        for i, c in enumerate(report.final_costs):
            w.writerow([i, f"{c:.12g}", f"{(c - report.mu_hat * args.n) / scale:.12g}"])
    print(
        f"mean/n={report.mean_rate:.6f} (mu_hat={report.mu_hat:.6f}) "
        f"var/n={report.var_rate:.6f} ks={report.ks:.4f} -> {out}"
    )
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except (spectral.InconsistencyError, spectral.NonConvergenceError, spectral.DivergenceError) as exc:
        print(f"numerical inconsistency: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, DomainError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
