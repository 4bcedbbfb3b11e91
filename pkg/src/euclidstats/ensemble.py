"""Exhaustive cost statistics over rational input ensembles.

The central object is a :class:`CostMatrix`: one exact histogram row per
denominator v, counting coprime inputs (u, v) by integer cost index
j = C(u, v)/L.  Every downstream quantity (counts, moments, generating
functions, Cesaro sums, smoothed mixtures, Gaussian diagnostics) is a
deterministic reduction of these rows, so a single enumeration at the
largest N serves a whole grid of smaller bounds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import kernels
from .cache import Cache
from .core import Algorithm, get_algorithm
from .costs import DigitCost

__all__ = [
    "InputSet",
    "EnsembleSummary",
    "SmoothedSummary",
    "CostMatrix",
    "enumerate_inputs",
    "build_cost_matrix",
    "summarize",
    "phi",
    "psi",
    "smoothed",
    "total_variation",
    "smoothing_total_variation",
    "gaussian_diagnostics",
    "growth_regression",
    "uni_check",
]


class DegenerateWindowError(ValueError):
    """Smoothing window floor(N^(1-gamma)) is empty."""


class DegenerateVarianceError(ValueError):
    """Histogram carries a single bin; no Gaussian scaling possible."""


@dataclass(frozen=True)
class InputSet:
    """Rational inputs u/v in I' with v <= N; coprime pairs only if reduced."""

    algo_id: str
    N: int
    reduced: bool = True


def _u_max(algo: Algorithm, v: int) -> int:
    if algo.id == "G":
        return v - 1
    if algo.id == "K":
        return v // 2
    return v


def enumerate_inputs(input_set: InputSet) -> Iterator[tuple[int, int]]:
    """Stream the pairs of the set, denominators ascending.

    For the non-reduced set the stream yields each reduced pair (u, v) with
    multiplicity floor(N/v) instead of materializing (du, dv); scaling a
    pair does not change its digits or cost.
    """
    algo = get_algorithm(input_set.algo_id)
    n = input_set.N
    for v in range(1, n + 1):
        for u in range(1, _u_max(algo, v) + 1):
            if math.gcd(u, v) != 1:
                continue
            if input_set.reduced:
                yield (u, v)
            else:
                for _ in range(n // v):
                    yield (u, v)


# ---------------------------------------------------------------------------
# cost matrices
# ---------------------------------------------------------------------------


@dataclass
class CostMatrix:
    """Per-denominator cost histograms over coprime pairs.

    ``rows[v, j]`` counts coprime pairs (u, v) with total cost j * span.
    """

    algo_id: str
    cost_desc: str
    span: Fraction
    N: int
    rows: np.ndarray

    def restrict(self, n: int) -> "CostMatrix":
        if n > self.N:
            raise ValueError(f"matrix holds N = {self.N} < requested {n}")
        return CostMatrix(self.algo_id, self.cost_desc, self.span, n, self.rows[: n + 1])

    def hist(self, n: int | None = None, reduced: bool = True) -> np.ndarray:
        """Histogram over Omega_n (or the non-reduced set) as an int64 vector."""
        n = self.N if n is None else n
        if n > self.N:
            raise ValueError(f"matrix holds N = {self.N} < requested {n}")
        if reduced:
            return self.rows[: n + 1].sum(axis=0)
        mult = n // np.arange(1, n + 1, dtype=np.int64)
        return (mult[:, None] * self.rows[1 : n + 1]).sum(axis=0)

    def count(self, n: int | None = None, reduced: bool = True) -> int:
        return int(self.hist(n, reduced).sum())

    def counts_per_v(self, n: int | None = None) -> np.ndarray:
        """Number of coprime inputs at each denominator 1..n."""
        n = self.N if n is None else n
        return self.rows[1 : n + 1].sum(axis=1)

    def max_index(self, n: int | None = None) -> int:
        h = self.hist(n)
        nz = np.nonzero(h)[0]
        return int(nz[-1]) if len(nz) else 0


def _cost_luts(algo: Algorithm, cost: DigitCost, n: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Integer cost index per digit m for eps = +1 / -1, plus the guard bound J."""
    m_hi = n + 1  # the odd division can emit m = v + 1
    lut_p = np.zeros(m_hi + 1, dtype=np.int64)
    lut_m = np.zeros(m_hi + 1, dtype=np.int64)
    span = cost.span
    p_max = int(math.ceil(algo.depth_bound_constant * math.log(max(n, 2)))) + 2
    if cost.kind == "unit":
        lut_p[1:] = 1
        lut_m[1:] = 1
        j_bound = p_max + 4
    elif cost.kind == "indicator":
        if cost.m0 <= m_hi:
            lut_p[cost.m0] = 1
            lut_m[cost.m0] = 1
        j_bound = p_max + 4
    elif cost.kind == "bits":
        ms = np.arange(m_hi + 1, dtype=np.int64)
        bits = np.zeros(m_hi + 1, dtype=np.int64)
        bits[1:] = np.floor(np.log2(ms[1:])).astype(np.int64) + 1
        # float log2 can round down at exact powers of two; fix up
        pow2 = 2 ** np.arange(0, int(math.log2(m_hi)) + 1)
        for k, p in enumerate(pow2):
            if p <= m_hi:
                bits[p] = k + 1
        lut_p, lut_m = bits, bits.copy()
        j_bound = int(math.ceil(1.7 * p_max + math.log2(max(n, 2)))) + 8
    else:
        missing = 10**6  # sentinel routed to the guard column
        lut_p[:] = missing
        lut_m[:] = missing
        max_j = 1
        for m, eps, value in cost.entries:
            if m > m_hi:
                continue
            j = value / span
            if j.denominator != 1:
                raise ValueError("table value is not a multiple of the span")
            if eps in (None, 1):
                lut_p[m] = int(j)
            if eps in (None, -1):
                lut_m[m] = int(j)
            max_j = max(max_j, int(j))
        j_bound = p_max * max_j + 8
    return lut_p, lut_m, min(j_bound, 200_000)


def build_cost_matrix(
    algo: str | Algorithm,
    cost: DigitCost,
    n: int,
    cache: Cache | None = None,
) -> CostMatrix:
    """Enumerate (or load from cache) the per-denominator histograms up to n."""
    a = get_algorithm(algo)
    desc = cost.descriptor()
    if cache is not None:
        hit = cache.load_rows(a.id, desc, n)
        if hit is not None:
            rows, span = hit
            return CostMatrix(a.id, desc, span, n, rows[: n + 1]).restrict(n)
    lut_p, lut_m, j_bound = _cost_luts(a, cost, n)
    try:
        all_rows = kernels.enumerate_rows(kernels.ALGO_CODE[a.id], n, lut_p, lut_m, j_bound)
    except OverflowError as exc:
        if cost.kind == "table":
            raise ValueError(
                "table cost does not cover every digit reachable at this N"
            ) from exc
        raise
    rows = kernels.mobius_invert_rows(all_rows)
    matrix = CostMatrix(a.id, desc, cost.span, n, rows)
    if cache is not None:
        cache.store_rows(a.id, desc, n, rows, cost.span)
    return matrix


def _matrix_for(input_set: InputSet, cost: DigitCost, matrix, cache) -> CostMatrix:
    if matrix is not None:
        if matrix.N < input_set.N:
            raise ValueError("supplied matrix is smaller than the input set")
        return matrix
    return build_cost_matrix(input_set.algo_id, cost, input_set.N, cache=cache)


# ---------------------------------------------------------------------------
# summaries
# ---------------------------------------------------------------------------


@dataclass
class EnsembleSummary:
    """Exact moments and lattice histogram of a total cost over an input set."""

    input_set: InputSet
    cost_id: str
    count: int
    moments: list[Fraction]
    histogram: dict[int, int]
    span: Fraction

    def to_payload(self) -> dict:
        from .cache import SCHEMA_VERSION

        return {
            "schema_version": SCHEMA_VERSION,
            "algo": self.input_set.algo_id,
            "cost": self.cost_id,
            "N": self.input_set.N,
            "reduced": self.input_set.reduced,
            "count": self.count,
            "span": str(self.span),
            "moments": [str(m) for m in self.moments],
            "histogram": {str(j): c for j, c in sorted(self.histogram.items())},
        }

    @staticmethod
    def from_payload(payload: dict) -> "EnsembleSummary":
        return EnsembleSummary(
            input_set=InputSet(payload["algo"], payload["N"], payload["reduced"]),
            cost_id=payload["cost"],
            count=payload["count"],
            moments=[Fraction(m) for m in payload["moments"]],
            histogram={int(j): c for j, c in payload["histogram"].items()},
            span=Fraction(payload["span"]),
        )

    def write_histogram_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "cost_value", "count"])
            for j, c in sorted(self.histogram.items()):
                w.writerow([j, str(Fraction(j) * self.span), c])


def _moments_from_hist(hist: np.ndarray, span: Fraction, k_max: int) -> tuple[int, list[Fraction]]:
    count = int(hist.sum())
    if count == 0:
        return 0, []
    moments = []
    js = [int(j) for j in np.nonzero(hist)[0]]
    for k in range(1, k_max + 1):
        raw = sum(int(hist[j]) * j**k for j in js)
        moments.append(Fraction(raw, count) * span**k)
    return count, moments


def summarize(
    input_set: InputSet,
    cost: DigitCost,
    k_max: int = 4,
    matrix: CostMatrix | None = None,
    cache: Cache | None = None,
) -> EnsembleSummary:
    """Exact raw moments E[C^k], k = 1..k_max, and the lattice histogram."""
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    if cache is not None and matrix is None:
        payload = cache.load_summary(input_set.algo_id, cost.descriptor(), input_set.N, input_set.reduced)
        if payload is not None and len(payload["moments"]) >= k_max:
            return EnsembleSummary.from_payload(payload)
    m = _matrix_for(input_set, cost, matrix, cache)
    hist = m.hist(input_set.N, input_set.reduced)
    count, moments = _moments_from_hist(hist, m.span, k_max)
    summary = EnsembleSummary(
        input_set=input_set,
        cost_id=m.cost_desc,
        count=count,
        moments=moments,
        histogram={int(j): int(c) for j, c in enumerate(hist) if c},
        span=m.span,
    )
    if cache is not None:
        cache.store_summary(summary.to_payload())
    return summary


# ---------------------------------------------------------------------------
# generating functions and Cesaro sums
# ---------------------------------------------------------------------------


def phi(
    input_set: InputSet,
    cost: DigitCost,
    w: complex,
    matrix: CostMatrix | None = None,
    cache: Cache | None = None,
) -> complex:
    """Cumulative exp(w C) over the set; at w = 0 this is the exact count."""
    m = _matrix_for(input_set, cost, matrix, cache)
    hist = m.hist(input_set.N, input_set.reduced)
    if w == 0:
        return complex(int(hist.sum()))
    js = np.arange(len(hist))
    return complex((hist * np.exp(w * float(m.span) * js)).sum())


def psi(
    input_set: InputSet,
    cost: DigitCost,
    T: int,
    w: complex,
    matrix: CostMatrix | None = None,
    cache: Cache | None = None,
) -> complex:
    """Cesaro sum Psi_w(T) = sum_{Q <= T} Phi_w(Q) = sum_{n <= T} c_n(w) (T + 1 - n).

    Exact integer arithmetic at w = 0.
    """
    m = _matrix_for(input_set, cost, matrix, cache)
    if T > m.N:
        raise ValueError(f"T = {T} exceeds available data N = {m.N}")
    if T < 1:
        return 0j
    if input_set.reduced:
        weights = np.arange(T, 0, -1, dtype=np.int64)  # T + 1 - n for n = 1..T
        if w == 0:
            cn = m.rows[1 : T + 1].sum(axis=1)
            return complex(int(cn @ weights))
        js = np.arange(m.rows.shape[1])
        cn = m.rows[1 : T + 1] @ np.exp(w * float(m.span) * js)
        return complex(cn @ weights)
    # non-reduced set: multiplicities depend on Q, so sum Phi_w(Q) directly
    total = 0j
    for q in range(1, T + 1):
        total += phi(InputSet(input_set.algo_id, q, False), cost, w, matrix=m)
    return total


def _window(n: int, gamma: float) -> int:
    w = math.floor(n ** (1.0 - gamma) + 1e-9)
    if w < 1:
        raise DegenerateWindowError(f"floor(N^(1-gamma)) = 0 at N = {n}, gamma = {gamma}")
    return w


@dataclass
class SmoothedSummary:
    """Mixture over Q uniform in {N - window, ..., N} of uniform draws from Omega_Q."""

    input_set: InputSet
    cost_id: str
    gamma: float
    window: int
    counts: dict[int, int]  # |Omega_Q| per Q in the window
    mixture_histogram: dict[int, Fraction]  # exact mixture probabilities per index j
    mixture_moments: list[Fraction]
    span: Fraction

    @property
    def q_range(self) -> range:
        return range(self.input_set.N - self.window, self.input_set.N + 1)


def smoothed(
    input_set: InputSet,
    cost: DigitCost,
    gamma: float,
    k_max: int = 2,
    matrix: CostMatrix | None = None,
    cache: Cache | None = None,
) -> SmoothedSummary:
    """Smoothed model: draw Q uniformly in the window, then a pair from Omega_Q."""
    m = _matrix_for(input_set, cost, matrix, cache)
    n = input_set.N
    w = _window(n, gamma)
    qs = list(range(n - w, n + 1))
    counts = {q: m.count(q, input_set.reduced) for q in qs}
    if any(c == 0 for c in counts.values()):
        raise DegenerateWindowError("window reaches denominators with no inputs")
    weight = Fraction(1, len(qs))
    mixture: dict[int, Fraction] = {}
    moments = [Fraction(0)] * k_max
    for q in qs:
        hist = m.hist(q, input_set.reduced)
        cq = counts[q]
        for j in np.nonzero(hist)[0]:
            j = int(j)
            p = weight * Fraction(int(hist[j]), cq)
            mixture[j] = mixture.get(j, Fraction(0)) + p
        for k in range(1, k_max + 1):
            raw = sum(int(hist[j]) * int(j) ** k for j in np.nonzero(hist)[0])
            moments[k - 1] += weight * Fraction(raw, cq) * m.span**k
    return SmoothedSummary(
        input_set=input_set,
        cost_id=m.cost_desc,
        gamma=gamma,
        window=w,
        counts=counts,
        mixture_histogram=mixture,
        mixture_moments=moments,
        span=m.span,
    )


def phi_bar_direct(
    input_set: InputSet, cost: DigitCost, gamma: float, w: complex, matrix=None, cache=None
) -> complex:
    """Mixture numerator (1/(W+1)) sum_Q Phi_w(Q) over the smoothing window."""
    m = _matrix_for(input_set, cost, matrix, cache)
    n = input_set.N
    win = _window(n, gamma)
    total = 0j
    for q in range(n - win, n + 1):
        total += phi(InputSet(input_set.algo_id, q, input_set.reduced), cost, w, matrix=m)
    return total / (win + 1)


def phi_bar_via_psi(
    input_set: InputSet, cost: DigitCost, gamma: float, w: complex, matrix=None, cache=None
) -> complex:
    """Same mixture numerator through Cesaro differences:
    (Psi_w(N) - Psi_w(N - W - 1)) / (W + 1)."""
    m = _matrix_for(input_set, cost, matrix, cache)
    n = input_set.N
    win = _window(n, gamma)
    lo = n - win - 1
    hi_sum = psi(input_set, cost, n, w, matrix=m)
    lo_sum = psi(input_set, cost, lo, w, matrix=m) if lo >= 1 else 0j
    return (hi_sum - lo_sum) / (win + 1)


# ---------------------------------------------------------------------------
# distances and Gaussian diagnostics
# ---------------------------------------------------------------------------


def total_variation(a: Mapping, b: Mapping) -> float:
    """Total variation distance between two discrete distributions."""
    keys = set(a) | set(b)
    return 0.5 * sum(abs(float(a.get(k, 0)) - float(b.get(k, 0))) for k in keys)


def smoothing_total_variation(
    input_set: InputSet,
    cost: DigitCost,
    gamma: float,
    matrix: CostMatrix | None = None,
    cache: Cache | None = None,
) -> float:
    """TV distance between uniform on Omega_N and its smoothed mixture.

    The mixture weight of a pair depends only on its denominator v (the pair
    belongs to Omega_Q exactly when v <= Q), so the sum collapses to one term
    per denominator.
    """
    m = _matrix_for(input_set, cost, matrix, cache)
    n = input_set.N
    win = _window(n, gamma)
    counts = np.array([m.count(q, input_set.reduced) for q in range(n - win, n + 1)], dtype=float)
    inv = 1.0 / counts
    # suffix sums: pairs with denominator v are in Omega_Q for Q >= max(v, N - win)
    suffix = np.cumsum(inv[::-1])[::-1]
    p_uniform = 1.0 / m.count(n, input_set.reduced)
    if input_set.reduced:
        n_v = m.counts_per_v(n).astype(float)
    else:
        mult = n // np.arange(1, n + 1, dtype=np.int64)
        # multiplicity of reduced pairs changes with Q; handle via per-Q masses instead
        n_v = None
    if n_v is None:
        # non-reduced smoothed TV: fall back to the per-Q mass decomposition
        raise NotImplementedError("smoothing TV is provided for the reduced set")
    tv = 0.0
    w1 = 1.0 / (win + 1)
    for v in range(1, n + 1):
        if n_v[v - 1] == 0:
            continue
        q_lo = max(v, n - win)
        p_bar = w1 * suffix[q_lo - (n - win)]
        tv += n_v[v - 1] * abs(p_bar - p_uniform)
    return 0.5 * tv


def _norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


@dataclass
class LltRow:
    x: float
    scaled_prob: float
    gauss: float


def gaussian_diagnostics(
    summary: EnsembleSummary, mu_c: float, delta_c: float
) -> tuple[float, list[LltRow]]:
    """Kolmogorov-Smirnov distance of the standardized cost and the local table.

    Standardization: x_j = (j L - mu_c log N) / (delta_c sqrt(log N)).  The
    local table compares the width-L window probabilities, rescaled by
    delta_c sqrt(2 pi log N) / L, against exp(-x^2/2).
    """
    if delta_c <= 0:
        raise DegenerateVarianceError("delta_c must be positive")
    if len(summary.histogram) < 2:
        raise DegenerateVarianceError("histogram has a single bin")
    n = summary.input_set.N
    logn = math.log(n)
    scale = delta_c * math.sqrt(logn)
    span = float(summary.span)
    items = sorted(summary.histogram.items())
    total = summary.count
    ks = 0.0
    cum = 0
    for j, cnt in items:
        x = (j * span - mu_c * logn) / scale
        gauss_cdf = _norm_cdf(x)
        ks = max(ks, abs(cum / total - gauss_cdf))  # left limit of the empirical CDF
        cum += cnt
        ks = max(ks, abs(cum / total - gauss_cdf))
    amp = delta_c * math.sqrt(2.0 * math.pi * logn) / span
    table = [
        LltRow(
            x=(j * span - mu_c * logn) / scale,
            scaled_prob=amp * cnt / total,
            gauss=math.exp(-(((j * span - mu_c * logn) / scale) ** 2) / 2.0),
        )
        for j, cnt in items
    ]
    return ks, table


def write_llt_csv(table: Sequence[LltRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "scaled_prob", "gauss_density"])
        for row in table:
            w.writerow([f"{row.x:.12g}", f"{row.scaled_prob:.12g}", f"{row.gauss:.12g}"])


def growth_regression(ns: Sequence[int], values: Sequence[float]) -> tuple[float, float, float]:
    """OLS fit value = slope * log N + intercept; returns (slope, intercept, rms residual)."""
    if len(ns) < 3:
        raise ValueError("need at least 3 grid points")
    xs = np.log(np.asarray(ns, dtype=float))
    ys = np.asarray([float(v) for v in values])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


# ---------------------------------------------------------------------------
# branch separation check
# ---------------------------------------------------------------------------


@dataclass
class UniResult:
    algo_id: str
    depth: int
    a: float
    m_cap: int
    eta: float
    worst_union: float
    tail_bound: float
    branch_count: int

    @property
    def worst_ratio(self) -> float:
        return (self.worst_union + self.tail_bound) / self.eta


def _branch_arrays(algo: Algorithm, depth: int, m_cap: int) -> np.ndarray:
    """Coefficient arrays (a, b, c, d) of every depth-n composition of digit
    branches with m <= m_cap."""
    digits = [(0, 1, e, m) for (m, e) in algo.digits(m_cap)]
    level = np.array(digits, dtype=np.int64)
    base = np.array(digits, dtype=np.int64)
    for _ in range(depth - 1):
        a1, b1, c1, d1 = (level[:, i][:, None] for i in range(4))
        a2, b2, c2, d2 = (base[:, i][None, :] for i in range(4))
        level = np.stack(
            [
                (a1 * a2 + b1 * c2).ravel(),
                (a1 * b2 + b1 * d2).ravel(),
                (c1 * a2 + d1 * c2).ravel(),
                (c1 * b2 + d1 * d2).ravel(),
            ],
            axis=1,
        )
    return level


def _delta_fun(y1: np.ndarray, y2: np.ndarray, x_hi: float) -> np.ndarray:
    """Branch distance as a function of the denominator ratios y = c/d.

    Equals lft_delta of the two branches on [0, x_hi]: the numerator
    |c1 d2 - c2 d1| and the quadratic denominator both factor through d1 d2.
    """
    q0 = np.ones_like(y1)
    q1 = (1.0 + x_hi * y1) * (1.0 + x_hi * y2)
    qmax = np.maximum(np.abs(q0), np.abs(q1))
    prod = y1 * y2
    with np.errstate(divide="ignore", invalid="ignore"):
        xv = -(y1 + y2) / (2.0 * prod)
        inside = (prod != 0) & (xv > 0) & (xv < x_hi)
        qv = np.where(inside, np.abs((1.0 + xv * y1) * (1.0 + xv * y2)), 0.0)
    qmax = np.maximum(qmax, qv)
    return np.abs(y1 - y2) / qmax


def _tail_first_digit_measure(algo: Algorithm, m_cap: int) -> float:
    """Length of the set of points whose first digit has quotient above m_cap."""
    if algo.id == "G":
        return 1.0 / (m_cap + 1)
    if algo.id == "K":
        return 1.0 / (m_cap + 0.5)
    m_next = m_cap + 1 if (m_cap + 1) % 2 == 1 else m_cap + 2
    return 1.0 / (m_next - 1)


def _transfer_sup_bounds(algo: Algorithm, depth: int) -> list[float]:
    """Sup over I of the density transformer iterates applied to 1."""
    from .spectral import FunctionModel, OperatorConfig, assemble

    cfg = OperatorConfig(degree=24, m_cap=48, tail_tol=1e-12)
    op = assemble(algo, DigitCost.unit(), 1.0, 0.0, cfg)
    grid = np.linspace(0.0, float(algo.i_sup), 401)
    sups = []
    vals = np.ones(len(op.nodes))
    for _ in range(depth):
        sups.append(float(np.max(FunctionModel(op.nodes, vals)(grid))))
        vals = op.matrix @ vals
    return sups


def uni_check(
    algo: str | Algorithm, depth: int, a: float, m_cap: int
) -> UniResult:
    """Worst ratio |J(h, eta)| / eta at eta = rho^(a n) over truncated depth-n branches.

    J(h, eta) is the union of fundamental intervals k(I) over branches k of
    the same depth with branch distance Delta(h, k) <= eta.  Branches with a
    quotient above m_cap are covered by an analytic tail bound added to every
    union, so the reported ratio is an upper bound.
    """
    alg = get_algorithm(algo)
    if depth > 6:
        raise ValueError("depth capped at 6")
    if m_cap > 50:
        raise ValueError("m_cap capped at 50")
    if not 0.0 < a < 1.0:
        raise ValueError("a must lie in (0, 1)")
    coeffs = _branch_arrays(alg, depth, m_cap)
    if len(coeffs) > 6_000_000:
        raise ValueError("truncated branch family too large; lower depth or m_cap")
    x_hi = float(alg.i_sup)
    c = coeffs[:, 2].astype(float)
    d = coeffs[:, 3].astype(float)
    av, bv = coeffs[:, 0].astype(float), coeffs[:, 1].astype(float)
    y = c / d
    lengths = x_hi * np.abs(av * d - bv * c) / (d * (c * x_hi + d))
    order = np.argsort(y)
    ys = y[order]
    lens = lengths[order]
    prefix = np.concatenate([[0.0], np.cumsum(lens)])
    eta = alg.rho ** (a * depth)

    if alg.id == "G":
        # all ratios are nonnegative, so the distance grows monotonically as
        # the second ratio moves away; solve for the window edges by bisection
        def solve_edge(side: int) -> np.ndarray:
            lo = ys.copy()
            span = ys[-1] - ys[0] + 1.0
            hi = ys + side * span
            done = _delta_fun(ys, hi, x_hi) <= eta
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                ok = _delta_fun(ys, mid, x_hi) <= eta
                lo = np.where(ok, mid, lo)
                hi = np.where(ok, hi, mid)
            return np.where(done, ys + side * span, lo)

        hi_edge = solve_edge(+1)
        lo_edge = solve_edge(-1)
    else:
        # mixed-sign ratios: use the constant bound delta >= |y1 - y2| / q_big,
        # a wider window, keeping the union an upper bound
        q_big = max(1.0, float(np.max((1.0 + x_hi * ys) ** 2)))
        half = eta * q_big
        lo_edge = ys - half
        hi_edge = ys + half
    il = np.searchsorted(ys, lo_edge - 1e-12, side="left")
    ir = np.searchsorted(ys, hi_edge + 1e-12, side="right")
    unions = prefix[ir] - prefix[il]
    sups = _transfer_sup_bounds(alg, depth)
    tail = sum(sups) * _tail_first_digit_measure(alg, m_cap)
    return UniResult(
        algo_id=alg.id,
        depth=depth,
        a=a,
        m_cap=m_cap,
        eta=float(eta),
        worst_union=float(unions.max()),
        tail_bound=float(tail),
        branch_count=len(coeffs),
    )
