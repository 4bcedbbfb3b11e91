"""Global invariants that lean on the large cached enumeration."""

import math

import pytest

from euclidstats.core import ALGORITHMS
from euclidstats.costs import DigitCost
from euclidstats.ensemble import build_cost_matrix

POW2_GRID = [2**k for k in range(10, 18)]


@pytest.fixture(scope="module")
def big_matrix(cache):
    return build_cost_matrix("G", DigitCost.unit(), POW2_GRID[-1], cache=cache)


def test_coprime_density_standard(big_matrix):
    # |Omega_N| / N^2 approaches 3/pi^2 for the standard system
    n = 10**5
    ratio = big_matrix.count(n) / n**2
    assert ratio == pytest.approx(3.0 / math.pi**2, rel=0.01)


def test_coprime_density_centered():
    # measured density for the centered system; the input range u <= v/2
    # halves the coprime count, giving 3/(2 pi^2)
    n = 20000
    m = build_cost_matrix("K", DigitCost.unit(), n)
    ratio = m.count(n) / n**2
    assert ratio == pytest.approx(3.0 / (2.0 * math.pi**2), rel=0.02)


def test_depth_bound_over_grid(big_matrix):
    k0 = ALGORITHMS["G"].depth_bound_constant
    for n in POW2_GRID:
        assert big_matrix.restrict(n).max_index() <= k0 * math.log(n)


@pytest.mark.parametrize("aid", ["K", "O"])
def test_depth_bound_other_systems(aid):
    m = build_cost_matrix(aid, DigitCost.unit(), 4000)
    k0 = ALGORITHMS[aid].depth_bound_constant
    for n in (500, 1000, 2000, 4000):
        assert m.restrict(n).max_index() <= k0 * math.log(n)


@pytest.mark.parametrize(
    "aid,cost,mean_tol,var_tol",
    [
        ("G", DigitCost.binary_length(), 0.005, 0.05),
        ("K", DigitCost.indicator(2), 0.01, 0.05),
    ],
    ids=["G-bits", "K-ind2"],
)
def test_growth_slopes_match_spectral_other_costs(cache, aid, cost, mean_tol, var_tol):
    # cross-oracle: exhaustive slopes vs spectral constants beyond the unit cost
    from euclidstats.ensemble import InputSet, growth_regression, summarize
    from euclidstats.spectral import constants

    grid = [2**k for k in range(8, 15)]
    m = build_cost_matrix(aid, cost, grid[-1], cache=cache)
    means, variances = [], []
    for n in grid:
        s = summarize(InputSet(aid, n), cost, k_max=2, matrix=m)
        means.append(float(s.moments[0]))
        variances.append(float(s.moments[1] - s.moments[0] ** 2))
    b = constants(aid, cost)
    slope_m, _, _ = growth_regression(grid, means)
    slope_v, _, _ = growth_regression(grid, variances)
    assert slope_m == pytest.approx(b.mu_c, rel=mean_tol)
    assert slope_v == pytest.approx(b.delta2_c, rel=var_tol)
