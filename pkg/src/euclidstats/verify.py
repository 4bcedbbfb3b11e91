"""End-to-end verification suites.

Each check compares an exhaustively enumerated or sampled quantity against
its spectral or closed-form target at a pinned tolerance and yields report
rows; the CLI renders them as CSV and the acceptance tests assert them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cache import Cache
from .core import ALGORITHMS
from .costs import DigitCost
from . import ensemble as ens
from . import realdyn, spectral

POW2_GRID = [2**k for k in range(10, 18)]
QUASIPOWER_GRID = [2**k for k in range(12, 18)]
CLT_GRID = [10**3, 10**4, 10**5]
TV_GRID = [10**2, 10**3, 10**4]
TV_GAMMA = 0.5
REAL_SEED = 20260809

# frozen after calibration runs; see tests/test_acceptance.py for provenance
TV_SCALED_BOUND = 3.0
UNI_RATIO_BOUND = 8.0


@dataclass
class CheckRow:
    name: str
    target: float | str
    observed: float | str
    tolerance: float | str
    passed: bool
    note: str = ""

    def as_csv_row(self) -> list[str]:
        return [
            self.name,
            str(self.target),
            str(self.observed),
            str(self.tolerance),
            "pass" if self.passed else "FAIL",
            self.note,
        ]


@dataclass
class VerifyContext:
    """Shared lazily-built heavy state for the verification suites.

    ``grid_max`` caps the denominator grids of the heavy suites; the default
    covers the full acceptance grid, smaller values prune grid points for
    quick smoke runs.
    """

    cache: Cache = field(default_factory=lambda: Cache(None))
    cfg: spectral.OperatorConfig = field(default_factory=spectral.OperatorConfig)
    grid_max: int = POW2_GRID[-1]
    algo_id: str = "G"
    identities_v_max: int = 300
    _matrices: dict = field(default_factory=dict)
    _bundles: dict = field(default_factory=dict)

    def grid(self, grid: list[int]) -> list[int]:
        pruned = [n for n in grid if n <= self.grid_max]
        if len(pruned) < 2:
            raise ValueError(f"grid ceiling {self.grid_max} leaves too few points of {grid}")
        return pruned

    def matrix(self, algo_id: str, cost: DigitCost, n: int) -> ens.CostMatrix:
        key = (algo_id, cost.descriptor())
        m = self._matrices.get(key)
        if m is None or m.N < n:
            m = ens.build_cost_matrix(algo_id, cost, n, cache=self.cache)
            self._matrices[key] = m
        return m

    def bundle(self, algo_id: str, cost: DigitCost) -> spectral.ConstantsBundle:
        key = (algo_id, cost.descriptor())
        if key not in self._bundles:
            self._bundles[key] = spectral.constants(algo_id, cost, self.cfg)
        return self._bundles[key]


# ---------------------------------------------------------------------------
# spectral suite
# ---------------------------------------------------------------------------


def check_entropy(ctx: VerifyContext) -> list[CheckRow]:
    rows = []
    for aid, tol in (("G", 1e-6), ("K", 1e-4), ("O", 1e-4)):
        alg = ALGORITHMS[aid]
        part = spectral.pressure_derivatives(aid, DigitCost.unit(), ctx.cfg)
        rel = abs(-part["lambda_s"] - alg.entropy) / alg.entropy
        rows.append(
            CheckRow(f"entropy_{aid}", alg.entropy, -part["lambda_s"], f"rel {tol}", rel <= tol)
        )
    return rows


def check_densities(ctx: VerifyContext) -> list[CheckRow]:
    rows = []
    for aid, tol in (("G", 1e-10), ("K", 1e-8), ("O", 1e-8)):
        alg = ALGORITHMS[aid]
        fn = spectral.invariant_density(aid, ctx.cfg)
        grid = np.linspace(0.0, float(alg.i_sup), 100)
        err = float(np.max(np.abs(fn(grid) - np.array([alg.density(x) for x in grid]))))
        rows.append(CheckRow(f"invariant_density_{aid}", 0.0, err, tol, err <= tol))
    return rows


def check_lambda_one(ctx: VerifyContext) -> list[CheckRow]:
    rows = []
    for aid in "GKO":
        lam = spectral.lambda_fn(aid, DigitCost.unit(), 1.0, 0.0, ctx.cfg)
        rows.append(CheckRow(f"lambda(1,0)_{aid}", 1.0, lam, 1e-9, abs(lam - 1.0) <= 1e-9))
    return rows


def check_digit_frequencies(ctx: VerifyContext) -> list[CheckRow]:
    rows = []
    for m in range(1, 6):
        cost = DigitCost.indicator(m)
        part = spectral.pressure_derivatives("G", cost, ctx.cfg)
        target = math.log(1.0 + 1.0 / (m * (m + 2))) / math.log(2.0)
        err = abs(part["lambda_w_fd"] - target)
        rows.append(CheckRow(f"digit_freq_G_m{m}", target, part["lambda_w_fd"], 1e-6, err <= 1e-6))
    for aid in "KO":
        for m in range(1, 6):
            cost = DigitCost.indicator(m)
            if not any(ALGORITHMS[aid].digit_ok(m, e) for e in (1, -1)):
                continue
            part = spectral.pressure_derivatives(aid, cost, ctx.cfg)
            target = realdyn.mu_hat_closed_form(aid, cost)
            err = abs(part["lambda_w_fd"] - target)
            rows.append(
                CheckRow(f"digit_freq_{aid}_m{m}", target, part["lambda_w_fd"], 1e-7, err <= 1e-7)
            )
    return rows


# ---------------------------------------------------------------------------
# growth suite (exhaustive vs spectral)
# ---------------------------------------------------------------------------


def _grid_summaries(ctx: VerifyContext, grid) -> list[ens.EnsembleSummary]:
    cost = DigitCost.unit()
    matrix = ctx.matrix(ctx.algo_id, cost, grid[-1])
    return [
        ens.summarize(ens.InputSet(ctx.algo_id, n), cost, k_max=2, matrix=matrix)
        for n in grid
    ]


def check_mean_slope(ctx: VerifyContext) -> list[CheckRow]:
    grid = ctx.grid(POW2_GRID)
    means = [float(s.moments[0]) for s in _grid_summaries(ctx, grid)]
    slope, _, _ = ens.growth_regression(grid, means)
    mu = ctx.bundle(ctx.algo_id, DigitCost.unit()).mu
    rel = abs(slope - mu) / mu
    return [CheckRow(f"mean_slope_{ctx.algo_id}_unit", mu, slope, "rel 0.02", rel <= 0.02)]


def check_variance_slope(ctx: VerifyContext) -> list[CheckRow]:
    grid = ctx.grid(POW2_GRID)
    summaries = _grid_summaries(ctx, grid)
    variances = [float(s.moments[1] - s.moments[0] ** 2) for s in summaries]
    slope, _, _ = ens.growth_regression(grid, variances)
    d2 = ctx.bundle(ctx.algo_id, DigitCost.unit()).delta2
    rel = abs(slope - d2) / d2
    return [CheckRow(f"variance_slope_{ctx.algo_id}_unit", d2, slope, "rel 0.10", rel <= 0.10)]


def check_quasi_powers(ctx: VerifyContext) -> list[CheckRow]:
    cost = DigitCost.unit()
    grid = ctx.grid(QUASIPOWER_GRID)
    matrix = ctx.matrix(ctx.algo_id, cost, grid[-1])
    nu = 0.05
    logs = []
    for n in grid:
        iset = ens.InputSet(ctx.algo_id, n)
        ratio = ens.phi(iset, cost, nu, matrix=matrix) / ens.phi(iset, cost, 0.0, matrix=matrix)
        logs.append(math.log(abs(ratio)))
    slope, _, _ = ens.growth_regression(grid, logs)
    target = 2.0 * (spectral.solve_sigma(ctx.algo_id, cost, nu, ctx.cfg) - 1.0)
    rel = abs(slope - target) / abs(target)
    return [CheckRow(f"quasipower_exponent_{ctx.algo_id}", target, slope, "rel 0.05", rel <= 0.05)]


# ---------------------------------------------------------------------------
# distribution suite
# ---------------------------------------------------------------------------


def check_clt_ks(ctx: VerifyContext) -> list[CheckRow]:
    cost = DigitCost.unit()
    aid = ctx.algo_id
    grid = ctx.grid(CLT_GRID)
    matrix = ctx.matrix(aid, cost, grid[-1])
    b = ctx.bundle(aid, cost)
    rows = []
    previous = math.inf
    for n in grid:
        summary = ens.summarize(ens.InputSet(aid, n), cost, k_max=2, matrix=matrix)
        ks, _ = ens.gaussian_diagnostics(summary, b.mu, math.sqrt(b.delta2))
        bound = 1.2 / math.sqrt(math.log(n))
        rows.append(
            CheckRow(
                f"clt_ks_{aid}_N{n}",
                f"<= {bound:.4f} and non-increasing",
                ks,
                bound,
                ks <= bound and ks <= previous + 1e-12,
            )
        )
        previous = ks
    return rows


def check_llt(ctx: VerifyContext) -> list[CheckRow]:
    cost = DigitCost.unit()
    aid = ctx.algo_id
    n = min(10**5, ctx.grid_max)
    matrix = ctx.matrix(aid, cost, n)
    b = ctx.bundle(aid, cost)
    summary = ens.summarize(ens.InputSet(aid, n), cost, k_max=2, matrix=matrix)
    _, table = ens.gaussian_diagnostics(summary, b.mu, math.sqrt(b.delta2))
    sup = max(abs(r.scaled_prob - r.gauss) for r in table if abs(r.x) <= 2.0)
    return [CheckRow(f"llt_sup_{aid}_N{n}", 0.0, sup, 0.1, sup <= 0.1)]


def check_smoothing_tv(ctx: VerifyContext) -> list[CheckRow]:
    cost = DigitCost.unit()
    aid = ctx.algo_id
    grid = ctx.grid(TV_GRID)
    matrix = ctx.matrix(aid, cost, grid[-1])
    rows = []
    tvs = []
    for n in grid:
        tv = ens.smoothing_total_variation(ens.InputSet(aid, n), cost, TV_GAMMA, matrix=matrix)
        tvs.append(tv)
        scaled = tv * n**TV_GAMMA
        rows.append(
            CheckRow(
                f"smoothing_tv_{aid}_N{n}",
                f"tv*N^{TV_GAMMA} <= {TV_SCALED_BOUND}",
                f"tv={tv:.6f} scaled={scaled:.4f}",
                TV_SCALED_BOUND,
                scaled <= TV_SCALED_BOUND,
            )
        )
    decreasing = all(tvs[i + 1] <= tvs[i] for i in range(len(tvs) - 1))
    rows.append(
        CheckRow("smoothing_tv_decreasing", "decreasing over grid", str([f"{t:.5f}" for t in tvs]), "-", decreasing)
    )
    return rows


def check_real_clt(ctx: VerifyContext) -> list[CheckRow]:
    cost = DigitCost.indicator(1)
    part = spectral.pressure_derivatives("G", cost, ctx.cfg)
    report = realdyn.real_clt_check(
        "G", cost, n=200, samples=10**4, rng_seed=REAL_SEED, delta_hat2=part["lambda_ww"]
    )
    target = math.log(4.0 / 3.0) / math.log(2.0)
    mean_err = abs(report.mean_rate - target)
    rows = [
        CheckRow(
            "real_mean_G_ind1",
            target,
            report.mean_rate,
            f"3 SE = {3 * report.standard_error:.2e}",
            mean_err <= 3 * report.standard_error,
        ),
        CheckRow("real_ks_G_ind1", 0.0, report.ks, 0.05, report.ks <= 0.05),
    ]
    return rows


# ---------------------------------------------------------------------------
# exact identities (exhaustive, v <= 300)
# ---------------------------------------------------------------------------


def check_exact_identities(ctx: VerifyContext, v_max: int | None = None) -> list[CheckRow]:
    from .core import decompose, divide, reconstruct
    from .lft import Lft, digit_to_lft

    v_max = v_max or ctx.identities_v_max
    rows = []
    cost = DigitCost.unit()
    for aid in "GKO":
        matrix = ens.build_cost_matrix(aid, cost, v_max, cache=ctx.cache)
        round_trips = ranges_ok = dets_ok = denominators_ok = 0
        failures = 0
        for v in range(1, v_max + 1):
            u_hi = {"G": v - 1, "K": v // 2, "O": v}[aid]
            for u in range(1, u_hi + 1):
                d, r = divide(aid, u, v)
                lo_ok = r >= 0
                hi_ok = {"G": r < u, "K": 2 * r <= u, "O": r <= u}[aid]
                ranges_ok += lo_ok and hi_ok
                if math.gcd(u, v) != 1:
                    continue
                traj = decompose(aid, u, v)
                if reconstruct(traj) == (u, v):
                    round_trips += 1
                else:
                    failures += 1
                h = Lft.identity()
                for dig in traj:
                    h = h.compose(digit_to_lft(aid, dig))
                dets_ok += abs(h.det) == 1
                denominators_ok += h.denom_at(0) == v
        n_pairs = sum({"G": v - 1, "K": v // 2, "O": v}[aid] for v in range(1, v_max + 1))
        n_coprime = matrix.count(v_max)
        ok = (
            failures == 0
            and ranges_ok == n_pairs
            and dets_ok == n_coprime
            and denominators_ok == n_coprime
        )
        rows.append(
            CheckRow(
                f"exact_core_{aid}",
                f"{n_coprime} round trips, {n_pairs} ranges",
                f"{round_trips} round trips, {ranges_ok} ranges",
                "exact",
                ok,
            )
        )

        # counting and Cesaro identities from the histogram matrix
        count_direct = sum(1 for _ in ens.enumerate_inputs(ens.InputSet(aid, v_max)))
        phi0 = ens.phi(ens.InputSet(aid, v_max), cost, 0.0, matrix=matrix)
        rows.append(
            CheckRow(
                f"phi0_count_{aid}", count_direct, int(phi0.real), "exact", int(phi0.real) == count_direct
            )
        )
        w = 0.03 + 0.02j
        t_hi = min(200, v_max)
        phis0 = [int(ens.phi(ens.InputSet(aid, q), cost, 0.0, matrix=matrix).real) for q in range(1, t_hi + 1)]
        phisw = [ens.phi(ens.InputSet(aid, q), cost, w, matrix=matrix) for q in range(1, t_hi + 1)]
        psi_ok = True
        acc0, accw = 0, 0j
        for T in range(1, t_hi + 1):
            acc0 += phis0[T - 1]
            accw += phisw[T - 1]
            iset = ens.InputSet(aid, v_max)
            if int(ens.psi(iset, cost, T, 0.0, matrix=matrix).real) != acc0:
                psi_ok = False
                break
            lhs = ens.psi(iset, cost, T, w, matrix=matrix)
            if abs(lhs - accw) > 1e-12 * max(1.0, abs(accw)):
                psi_ok = False
                break
        rows.append(CheckRow(f"psi_cumulative_{aid}", "exact / 1e-12", psi_ok, "exact", psi_ok))

        # smoothing transfer identity at w = 0, exact in integers
        n = v_max
        win = ens._window(n, TV_GAMMA)
        direct = sum(
            int(ens.phi(ens.InputSet(aid, q), cost, 0.0, matrix=matrix).real)
            for q in range(n - win, n + 1)
        )
        psi_hi = int(ens.psi(ens.InputSet(aid, n), cost, n, 0.0, matrix=matrix).real)
        psi_lo = int(ens.psi(ens.InputSet(aid, n), cost, n - win - 1, 0.0, matrix=matrix).real)
        rows.append(
            CheckRow(
                f"smoothing_identity_{aid}", direct, psi_hi - psi_lo, "exact", direct == psi_hi - psi_lo
            )
        )
    return rows


# ---------------------------------------------------------------------------
# branch separation
# ---------------------------------------------------------------------------


def check_uni(ctx: VerifyContext) -> list[CheckRow]:
    rows = []
    for n in (2, 3, 4):
        res = ens.uni_check("G", n, 0.5, 30)
        rows.append(
            CheckRow(
                f"uni_ratio_G_n{n}",
                f"<= {UNI_RATIO_BOUND}",
                f"{res.worst_ratio:.4f} (union {res.worst_union:.4f}, tail {res.tail_bound:.4f})",
                UNI_RATIO_BOUND,
                res.worst_ratio <= UNI_RATIO_BOUND,
            )
        )
    return rows


SUITES = {
    "spectral": (check_entropy, check_densities, check_lambda_one, check_digit_frequencies),
    "growth": (check_mean_slope, check_variance_slope),
    "clt": (check_clt_ks, check_llt),
    "identities": (check_exact_identities,),
    "smooth": (check_smoothing_tv,),
    "real": (check_real_clt,),
    "quasipower": (check_quasi_powers,),
    "uni": (check_uni,),
}


def run_suite(name: str, ctx: VerifyContext | None = None) -> list[CheckRow]:
    ctx = ctx or VerifyContext()
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    rows: list[CheckRow] = []
    for n in names:
        for check in SUITES[n]:
            rows.extend(check(ctx))
    return rows
