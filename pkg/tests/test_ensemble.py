import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from euclidstats.core import decompose
from euclidstats.costs import DigitCost, total_cost
from euclidstats.ensemble import (
    CostMatrix,
    DegenerateVarianceError,
    DegenerateWindowError,
    InputSet,
    build_cost_matrix,
    enumerate_inputs,
    gaussian_diagnostics,
    growth_regression,
    phi,
    phi_bar_direct,
    phi_bar_via_psi,
    psi,
    smoothed,
    smoothing_total_variation,
    summarize,
    total_variation,
    uni_check,
)
from euclidstats.lft import lft_delta

COSTS = [DigitCost.unit(), DigitCost.indicator(1), DigitCost.binary_length()]


def oracle_hist(aid, cost, n, reduced=True):
    h = Counter()
    for v in range(1, n + 1):
        u_hi = {"G": v - 1, "K": v // 2, "O": v}[aid]
        for u in range(1, u_hi + 1):
            if reduced and math.gcd(u, v) != 1:
                continue
            h[total_cost(cost, decompose(aid, u, v))] += 1
    return dict(h)


class TestEnumeration:
    def test_examples(self):
        assert list(enumerate_inputs(InputSet("G", 5))) == [
            (1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (1, 5), (2, 5), (3, 5), (4, 5),
        ]
        assert list(enumerate_inputs(InputSet("O", 1))) == [(1, 1)]
        assert list(enumerate_inputs(InputSet("G", 1))) == []

    @pytest.mark.parametrize("aid", ["G", "K", "O"])
    @pytest.mark.parametrize("cost", COSTS, ids=lambda c: c.descriptor())
    def test_matrix_vs_direct(self, aid, cost):
        n = 50
        m = build_cost_matrix(aid, cost, n)
        for reduced in (True, False):
            got = {
                Fraction(j) * m.span: int(c)
                for j, c in enumerate(m.hist(n, reduced))
                if c
            }
            assert got == oracle_hist(aid, cost, n, reduced)

    @pytest.mark.parametrize("aid", ["G", "K", "O"])
    def test_full_set_count_matches_double_loop(self, aid):
        # multiplicity weighting vs literal (du, dv) enumeration
        n = 300
        m = build_cost_matrix(aid, DigitCost.unit(), n)
        direct = sum(
            1
            for v in range(1, n + 1)
            for u in range(1, {"G": v - 1, "K": v // 2, "O": v}[aid] + 1)
        )
        assert m.count(n, reduced=False) == direct
        assert len(list(enumerate_inputs(InputSet(aid, n, reduced=False)))) == direct

    def test_restriction_consistency(self):
        # a larger build restricted down agrees with a direct smaller build
        # (histogram widths differ: the depth bound grows with log N)
        m = build_cost_matrix("G", DigitCost.unit(), 120)
        m60 = build_cost_matrix("G", DigitCost.unit(), 60)
        k = m60.rows.shape[1]
        assert np.array_equal(m.restrict(60).rows[:, :k], m60.rows)
        assert not m.restrict(60).rows[:, k:].any()

    def test_deterministic_rebuild(self):
        a = build_cost_matrix("K", DigitCost.binary_length(), 150)
        b = build_cost_matrix("K", DigitCost.binary_length(), 150)
        assert np.array_equal(a.rows, b.rows)

    def test_table_cost_requires_coverage(self):
        partial = DigitCost.from_table([(1, 1), (2, 1)])
        with pytest.raises(ValueError):
            build_cost_matrix("G", partial, 50)


class TestSummaries:
    def test_single_input(self):
        s = summarize(InputSet("G", 2), DigitCost.unit())
        assert s.count == 1
        assert s.moments[0] == 1 and s.moments[1] == 1
        assert s.histogram == {1: 1}

    def test_empty_set(self):
        s = summarize(InputSet("G", 1), DigitCost.unit())
        assert s.count == 0 and s.moments == [] and s.histogram == {}

    def test_moment_identities(self):
        s = summarize(InputSet("G", 40), DigitCost.binary_length(), k_max=3)
        assert s.count == sum(s.histogram.values())
        first = sum(Fraction(j) * s.span * c for j, c in s.histogram.items())
        assert s.moments[0] * s.count == first
        assert s.moments[1] >= s.moments[0] ** 2  # Jensen

    def test_cache_round_trip(self, cache):
        s1 = summarize(InputSet("O", 37), DigitCost.indicator(3), cache=cache)
        s2 = summarize(InputSet("O", 37), DigitCost.indicator(3), cache=cache)
        assert s1 == s2


class TestGeneratingFunctions:
    def test_phi_at_zero_is_count(self):
        iset = InputSet("G", 100)
        m = build_cost_matrix("G", DigitCost.unit(), 100)
        assert phi(iset, DigitCost.unit(), 0.0, matrix=m) == complex(m.count(100))

    def test_phi_example_pow2(self):
        m = build_cost_matrix("G", DigitCost.unit(), 5)
        got = phi(InputSet("G", 5), DigitCost.unit(), math.log(2.0), matrix=m)
        want = sum(2 ** decompose("G", u, v).depth for u, v in enumerate_inputs(InputSet("G", 5)))
        assert got.real == pytest.approx(want, rel=1e-12)

    def test_phi_monotone_in_real_w(self):
        m = build_cost_matrix("G", DigitCost.unit(), 60)
        iset = InputSet("G", 60)
        values = [phi(iset, DigitCost.unit(), w, matrix=m).real for w in (-0.5, 0.0, 0.3, 0.6)]
        assert values == sorted(values)

    def test_psi_examples(self):
        m = build_cost_matrix("G", DigitCost.unit(), 10)
        assert psi(InputSet("G", 10), DigitCost.unit(), 5, 0.0, matrix=m) == 18
        assert psi(InputSet("G", 10), DigitCost.unit(), 1, 0.0, matrix=m) == 0

    def test_psi_difference_identity(self):
        m = build_cost_matrix("G", DigitCost.unit(), 200)
        iset = InputSet("G", 200)
        cost = DigitCost.unit()
        for t in (2, 17, 100, 200):
            lhs = psi(iset, cost, t, 0.0, matrix=m) - psi(iset, cost, t - 1, 0.0, matrix=m)
            assert lhs == phi(InputSet("G", t), cost, 0.0, matrix=m)

    def test_psi_cumulative_identity_complex(self):
        m = build_cost_matrix("K", DigitCost.unit(), 150)
        cost = DigitCost.unit()
        w = 0.05 + 0.1j
        for t in (3, 50, 150):
            lhs = psi(InputSet("K", 150), cost, t, w, matrix=m)
            rhs = sum(phi(InputSet("K", q), cost, w, matrix=m) for q in range(1, t + 1))
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


class TestSmoothing:
    def test_window_arithmetic(self):
        m = build_cost_matrix("G", DigitCost.unit(), 100)
        s = smoothed(InputSet("G", 100), DigitCost.unit(), 0.5, matrix=m)
        assert s.window == 10
        assert list(s.q_range) == list(range(90, 101))
        assert sum(s.mixture_histogram.values()) == 1

    def test_degenerate_window(self):
        m = build_cost_matrix("G", DigitCost.unit(), 10)
        with pytest.raises(DegenerateWindowError):
            smoothed(InputSet("G", 10), DigitCost.unit(), 1.5, matrix=m)

    def test_window_covering_empty_sets_rejected(self):
        # gamma = 0 stretches the window down to Q = 0, where the set is empty
        m = build_cost_matrix("G", DigitCost.unit(), 12)
        with pytest.raises(DegenerateWindowError):
            smoothed(InputSet("G", 12), DigitCost.unit(), 0.0, matrix=m)

    def test_widest_window_covers_all_nonempty_sets(self):
        # window N - 1 mixes over every Q in 1..N (all nonempty for the odd system)
        m = build_cost_matrix("O", DigitCost.unit(), 10)
        s = smoothed(InputSet("O", 10), DigitCost.unit(), 0.04, matrix=m)
        assert s.window == 9
        assert list(s.q_range) == list(range(1, 11))

    def test_transfer_identity_exact_at_zero(self):
        m = build_cost_matrix("G", DigitCost.unit(), 50)
        iset = InputSet("G", 50)
        a = phi_bar_direct(iset, DigitCost.unit(), 0.5, 0.0, matrix=m)
        b = phi_bar_via_psi(iset, DigitCost.unit(), 0.5, 0.0, matrix=m)
        assert a == b

    def test_transfer_identity_complex(self):
        m = build_cost_matrix("G", DigitCost.unit(), 80)
        iset = InputSet("G", 80)
        w = 0.07 + 0.15j
        a = phi_bar_direct(iset, DigitCost.unit(), 0.4, w, matrix=m)
        b = phi_bar_via_psi(iset, DigitCost.unit(), 0.4, w, matrix=m)
        assert abs(a - b) <= 1e-12 * abs(b)

    def test_tv_trivial_cases(self):
        assert total_variation({1: 0.5, 2: 0.5}, {1: 0.5, 2: 0.5}) == 0
        assert total_variation({1: 1.0}, {2: 1.0}) == 1

    def test_smoothing_tv_scale(self):
        m = build_cost_matrix("G", DigitCost.unit(), 1000)
        tv = smoothing_total_variation(InputSet("G", 1000), DigitCost.unit(), 0.5, matrix=m)
        assert 0.0 < tv <= 5.0 * 1000**-0.5

    def test_mixture_matches_two_stage_sampling(self):
        # exact mixture probability of each cost bin vs direct per-Q averaging
        n = 40
        m = build_cost_matrix("G", DigitCost.unit(), n)
        s = smoothed(InputSet("G", n), DigitCost.unit(), 0.5, matrix=m)
        qs = list(s.q_range)
        for j, p in s.mixture_histogram.items():
            direct = sum(
                Fraction(int(m.hist(q)[j]), m.count(q)) for q in qs
            ) / len(qs)
            assert p == direct


class TestDiagnostics:
    def test_point_mass_rejected(self):
        s = summarize(InputSet("G", 2), DigitCost.unit())
        with pytest.raises(DegenerateVarianceError):
            gaussian_diagnostics(s, 1.0, 1.0)

    def test_two_point_symmetric_ks(self):
        # histogram at standardized +-1 with equal mass: KS against the normal
        # CDF is max(Phi(-1), 0.5 - Phi(-1)) at the lower atom
        from euclidstats.ensemble import EnsembleSummary

        s = EnsembleSummary(
            input_set=InputSet("G", 3),
            cost_id="unit",
            count=2,
            moments=[Fraction(0)],
            histogram={-1: 1, 1: 1},
            span=Fraction(1),
        )
        logn = math.log(3)
        mu_c = 0.0
        delta_c = 1.0 / math.sqrt(logn)
        ks, table = gaussian_diagnostics(s, mu_c, delta_c)
        phi_m1 = 0.5 * (1 + math.erf(-1 / math.sqrt(2)))
        assert ks == pytest.approx(max(phi_m1, 0.5 - phi_m1), abs=1e-12)
        assert [r.x for r in table] == pytest.approx([-1.0, 1.0])

    def test_growth_regression_synthetic(self):
        ns = [2**k for k in range(10, 16)]
        ys = [2.0 * math.log(n) + 3.0 for n in ns]
        slope, intercept, resid = growth_regression(ns, ys)
        assert slope == pytest.approx(2.0, abs=1e-12)
        assert intercept == pytest.approx(3.0, abs=1e-10)
        assert resid == pytest.approx(0.0, abs=1e-12)


class TestUni:
    def test_delta_fun_matches_lft_delta(self):
        from euclidstats.ensemble import _branch_arrays, _delta_fun
        from euclidstats.core import ALGORITHMS
        from euclidstats.lft import Lft

        rng = np.random.default_rng(7)
        coeffs = _branch_arrays(ALGORITHMS["G"], 3, 6)
        idx = rng.integers(0, len(coeffs), size=40)
        for i, k in zip(idx[::2], idx[1::2]):
            h = Lft(*coeffs[i])
            g = Lft(*coeffs[k])
            exact = float(lft_delta(h, g, (0, 1)))
            fast = float(
                _delta_fun(
                    np.array([h.c / h.d]), np.array([g.c / g.d]), 1.0
                )[0]
            )
            assert fast == pytest.approx(exact, rel=1e-12)

    def test_union_contains_own_interval(self):
        res = uni_check("G", 2, 0.5, 12)
        # J(h, eta) always contains h(I), so the worst union is positive
        assert res.worst_union > 0
        assert res.worst_ratio > 0

    def test_preconditions(self):
        with pytest.raises(ValueError):
            uni_check("G", 7, 0.5, 10)
        with pytest.raises(ValueError):
            uni_check("G", 2, 0.5, 80)
        with pytest.raises(ValueError):
            uni_check("G", 2, 1.5, 10)

    def test_trend_recorded(self):
        ratios = [uni_check("G", n, 0.5, 12).worst_ratio for n in (2, 3)]
        assert all(r > 0 for r in ratios)
