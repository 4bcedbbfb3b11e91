"""Truncated trajectories of the interval maps started from random points.

"Random real" means a random rational with a 256-bit denominator; such a
seed survives far more than the requested number of division steps, and all
arithmetic stays exact.  Sample means of C_n / n converge to the
invariant-measure average mu_hat(c), which this module evaluates in closed
form from the logarithmic antiderivative of the invariant density.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.special import ndtr

from .core import Algorithm, divide, get_algorithm
from .costs import DigitCost, eval_cost

DEFAULT_SEED_BITS = 256


def adequate_seed_bits(algo: str | Algorithm, n: int) -> int:
    """Denominator bits so that a trajectory almost surely survives n steps.

    The typical depth of a random rational with a B-bit denominator is
    (2/entropy) * B * log 2, concentrated within a few sqrt(B); a 35% margin
    over the inversion of that mean makes early termination negligible.
    """
    a = get_algorithm(algo)
    need = 1.35 * n * a.entropy / (2.0 * math.log(2.0))
    return max(DEFAULT_SEED_BITS, 64 * math.ceil(need / 64.0))


@dataclass(frozen=True)
class RealSample:
    """One truncated trajectory: the seed and its partial cost sums C_1..C_n."""

    seed: Fraction
    n: int
    costs: tuple[Fraction, ...]

    @property
    def final_cost(self) -> Fraction:
        return self.costs[-1] if self.costs else Fraction(0)


def birkhoff_sum(
    algo: str | Algorithm, cost: DigitCost, x0: Fraction, n: int
) -> tuple[Fraction, int]:
    """Sum of digit costs over min(n, depth) steps of the map from x0.

    Returns (total, steps actually executed).
    """
    a = get_algorithm(algo)
    total = Fraction(0)
    u, v = x0.numerator, x0.denominator
    steps = 0
    for _ in range(n):
        d, r = divide(a, u, v)
        total += eval_cost(cost, d)
        steps += 1
        if r == 0:
            break
        u, v = r, u
    return total, steps


def draw_sample(
    algo: str | Algorithm,
    cost: DigitCost,
    n: int,
    rng: np.random.Generator,
    seed_bits: int = DEFAULT_SEED_BITS,
    max_redraws: int = 64,
) -> RealSample:
    """Draw a seed uniformly from I' and record its partial cost sums.

    Seeds whose trajectory terminates before step n are rejected and
    redrawn; with 256-bit denominators this is essentially impossible.
    """
    a = get_algorithm(algo)
    for _ in range(max_redraws):
        x0 = _draw_seed(a, rng, seed_bits)
        u, v = x0.numerator, x0.denominator
        partial: list[Fraction] = []
        total = Fraction(0)
        alive = True
        for _ in range(n):
            d, r = divide(a, u, v)
            total += eval_cost(cost, d)
            partial.append(total)
            if r == 0:
                alive = False
                break
            u, v = r, u
        if alive or len(partial) == n:
            return RealSample(seed=x0, n=n, costs=tuple(partial))
    raise RuntimeError(f"seed rejection did not terminate after {max_redraws} redraws")


def _draw_seed(algo: Algorithm, rng: np.random.Generator, bits: int) -> Fraction:
    den = 1 << bits
    limbs = rng.integers(0, 2**64, size=bits // 64 + 1, dtype=np.uint64)
    u = 0
    for limb in limbs.tolist():
        u = (u << 64) | int(limb)
    if algo.id == "G":
        u = u % (den - 1) + 1  # (0, 1)
    elif algo.id == "K":
        u = u % (den // 2) + 1  # (0, 1/2]
    else:
        u = u % den + 1  # (0, 1]
    return Fraction(u, den)


def mu_hat_closed_form(algo: str | Algorithm, cost: DigitCost, m_cap: int = 64) -> float:
    """Invariant-measure average of the digit cost, by exact cylinder masses.

    The mass of the first-digit cylinder is a difference of the logarithmic
    antiderivative F of the invariant density; contiguous quotient ranges
    telescope, which makes the unit tail exact and lets the binary-length
    tail sum dyadic blocks where the cost is constant.
    """
    a = get_algorithm(algo)
    if cost.kind == "unit":
        return 1.0
    if cost.kind == "indicator":
        return _quotient_mass(a, cost.m0, cost.m0)
    if cost.kind == "table":
        total = 0.0
        for m, eps, value in cost.entries:
            if eps is None:
                total += float(value) * _quotient_mass(a, m, m)
            else:
                total += float(value) * _cylinder_mass(a, m, eps)
        return total
    # binary length: cost k+1 on quotients in [2^k, 2^(k+1))
    total = 0.0
    k = 0
    while True:
        lo, hi = 2**k, 2 ** (k + 1) - 1
        mass = _quotient_mass(a, lo, hi)
        total += (k + 1) * mass
        k += 1
        if mass < 1e-18 and lo > m_cap:
            break
    return total


def _first_digit_x_range(algo: Algorithm, m_lo: int, m_hi: int) -> tuple[float, float] | None:
    """x-interval whose first quotient lies in [m_lo, m_hi] (any sign)."""
    if algo.id == "G":
        lo, hi = 1.0 / (m_hi + 1.0), 1.0 / m_lo
    elif algo.id == "K":
        m_lo = max(m_lo, 2)
        if m_hi < m_lo:
            return None
        lo, hi = 1.0 / (m_hi + 0.5), 1.0 / (m_lo - 0.5)
    else:
        # odd quotients only
        if m_lo % 2 == 0:
            m_lo += 1
        if m_hi % 2 == 0:
            m_hi -= 1
        if m_hi < m_lo:
            return None
        lo = 1.0 / (m_hi + 1.0)
        hi = 1.0 if m_lo == 1 else 1.0 / (m_lo - 1.0)
    sup = float(algo.i_sup)
    lo, hi = min(lo, sup), min(hi, sup)
    if hi <= lo:
        return None
    return lo, hi


def _quotient_mass(algo: Algorithm, m_lo: int, m_hi: int) -> float:
    rng = _first_digit_x_range(algo, m_lo, m_hi)
    if rng is None:
        return 0.0
    F = algo.density_antiderivative
    return F(rng[1]) - F(rng[0])


def _cylinder_mass(algo: Algorithm, m: int, eps: int) -> float:
    """Invariant mass of the single-digit cylinder (m, eps)."""
    if not algo.digit_ok(m, eps):
        return 0.0
    F = algo.density_antiderivative
    if algo.id == "G":
        return F(1.0 / m) - F(1.0 / (m + 1.0))
    if algo.id == "K":
        if eps == 1:
            return F(1.0 / m) - F(1.0 / (m + 0.5))
        return F(1.0 / (m - 0.5)) - F(1.0 / m)
    if eps == 1:
        return F(1.0 / m) - F(1.0 / (m + 1.0))
    return F(1.0 / (m - 1.0)) - F(1.0 / m)


@dataclass
class RealCltReport:
    mean_rate: float
    var_rate: float
    ks: float
    mu_hat: float
    delta_hat2: float
    standard_error: float
    samples: int
    final_costs: np.ndarray

    def write_csv(self, path: str | Path, mu_hat: float, delta_hat: float, n: int) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_index", "Cn", "standardized"])
            for i, c in enumerate(self.final_costs):
                z = (c - mu_hat * n) / (delta_hat * math.sqrt(n))
                w.writerow([i, f"{c:.12g}", f"{z:.12g}"])


def real_clt_check(
    algo: str | Algorithm,
    cost: DigitCost,
    n: int,
    samples: int,
    rng_seed: int,
    delta_hat2: float | None = None,
    seed_bits: int | None = None,
) -> RealCltReport:
    """Sample C_n over random seeds and compare with the Gaussian limit.

    Uses a counter-based generator keyed by rng_seed; each sample consumes a
    fixed number of draws, so results do not depend on scheduling.  When
    seed_bits is not given it is scaled with n so that the typical depth
    comfortably exceeds the truncation.
    """
    a = get_algorithm(algo)
    if cost.kind == "unit":
        raise ValueError("the constant cost has zero dynamical variance; no Gaussian limit")
    if seed_bits is None:
        seed_bits = adequate_seed_bits(a, n)
    mu_hat = mu_hat_closed_form(a, cost)
    if delta_hat2 is None:
        from .spectral import pressure_derivatives

        delta_hat2 = pressure_derivatives(a, cost)["lambda_ww"]
    if delta_hat2 <= 0:
        raise ValueError(f"delta_hat2 = {delta_hat2} must be positive")
    rng = np.random.Generator(np.random.Philox(key=rng_seed))
    limbs_per = seed_bits // 64 + 1
    raw = rng.integers(0, 2**64, size=(samples, limbs_per), dtype=np.uint64)
    den = 1 << seed_bits
    finals = np.empty(samples, dtype=float)
    for i in range(samples):
        u = 0
        for limb in raw[i].tolist():
            u = (u << 64) | int(limb)
        if a.id == "G":
            u = u % (den - 1) + 1
        elif a.id == "K":
            u = u % (den // 2) + 1
        else:
            u = u % den + 1
        total, steps = birkhoff_sum(a, cost, Fraction(u, den), n)
        if steps < n:
            # terminated early: redraw deterministically from a derived stream
            sub = np.random.Generator(np.random.Philox(key=(rng_seed, i)))
            sample = draw_sample(a, cost, n, sub, seed_bits)
            total = sample.final_cost
        finals[i] = float(total)
    mean_rate = float(finals.mean()) / n
    var_rate = float(finals.var(ddof=1)) / n
    z = np.sort((finals - mu_hat * n) / math.sqrt(delta_hat2 * n))
    cdf = ndtr(z)
    i_arr = np.arange(1, samples + 1)
    ks = float(np.max(np.maximum(i_arr / samples - cdf, cdf - (i_arr - 1) / samples)))
    se = float(finals.std(ddof=1) / n / math.sqrt(samples))
    return RealCltReport(
        mean_rate=mean_rate,
        var_rate=var_rate,
        ks=ks,
        mu_hat=mu_hat,
        delta_hat2=delta_hat2,
        standard_error=se,
        samples=samples,
        final_costs=finals,
    )
