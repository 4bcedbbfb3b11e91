import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from euclidstats.core import (
    ALGORITHMS,
    Digit,
    DomainError,
    Trajectory,
    decompose,
    divide,
    map_step,
    reconstruct,
)

ALGO_IDS = ["G", "K", "O"]


def valid_pairs(aid, v_max):
    for v in range(1, v_max + 1):
        u_hi = {"G": v - 1, "K": v // 2, "O": v}[aid]
        for u in range(1, u_hi + 1):
            yield u, v


class TestDivide:
    def test_examples(self):
        assert divide("G", 5, 13) == (Digit(2, 1), 3)
        assert divide("K", 4, 11) == (Digit(3, -1), 1)
        assert divide("O", 2, 5) == (Digit(3, -1), 1)
        assert divide("O", 1, 1) == (Digit(1, 1), 0)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            divide("G", 3, 3)  # u/v = 1 not in (0, 1)
        with pytest.raises(DomainError):
            divide("K", 3, 5)  # above 1/2
        with pytest.raises(DomainError):
            divide("G", 0, 5)
        with pytest.raises(DomainError):
            divide("O", 1, 0)

    @pytest.mark.parametrize("aid", ALGO_IDS)
    def test_division_identity_and_ranges_exhaustive(self, aid):
        algo = ALGORITHMS[aid]
        for u, v in valid_pairs(aid, 500):
            d, r = divide(aid, u, v)
            assert v == d.m * u + d.eps * r
            assert algo.digit_ok(d.m, d.eps)
            if aid == "G":
                assert 0 <= r < u
            elif aid == "K":
                assert 0 <= 2 * r <= u
            else:
                assert 0 <= r <= u
            if r > 0:
                assert algo.in_domain(r, u)


class TestDecompose:
    def test_examples(self):
        t = decompose("G", 5, 13)
        assert [tuple(d) for d in t] == [(2, 1), (1, 1), (1, 1), (2, 1)]
        assert t.depth == 4
        t = decompose("O", 5, 7)
        assert [tuple(d) for d in t] == [(1, 1), (3, -1), (3, -1), (1, 1)]

    def test_gcd_invariance(self):
        assert decompose("G", 10, 26).digits == decompose("G", 5, 13).digits

    @pytest.mark.parametrize("aid", ALGO_IDS)
    def test_final_digit_condition(self, aid):
        algo = ALGORITHMS[aid]
        for u, v in valid_pairs(aid, 120):
            t = decompose(aid, u, v)
            for d in t.digits[:-1]:
                assert algo.digit_ok(*d)
            assert algo.digit_final_ok(*t.digits[-1])

    @pytest.mark.parametrize("aid", ALGO_IDS)
    def test_depth_bound(self, aid):
        algo = ALGORITHMS[aid]
        k0 = algo.depth_bound_constant
        for u, v in valid_pairs(aid, 400):
            if math.gcd(u, v) == 1 and v > 1:
                assert decompose(aid, u, v).depth <= k0 * math.log(v) + 1


class TestReconstruct:
    @pytest.mark.parametrize("aid", ALGO_IDS)
    def test_round_trip_exhaustive(self, aid):
        for u, v in valid_pairs(aid, 500):
            if math.gcd(u, v) != 1:
                continue
            assert reconstruct(decompose(aid, u, v)) == (u, v)

    def test_examples(self):
        assert reconstruct(Trajectory("K", (Digit(3, -1), Digit(4, 1)))) == (4, 11)
        assert reconstruct(Trajectory("G", ())) == (0, 1)

    @given(
        st.sampled_from(ALGO_IDS),
        st.integers(min_value=1, max_value=3000),
        st.integers(min_value=1, max_value=3000),
    )
    @settings(max_examples=200)
    def test_round_trip_random(self, aid, a, b):
        g = math.gcd(a, b)
        u, v = a // g, b // g
        if not ALGORITHMS[aid].in_domain(u, v):
            return
        assert reconstruct(decompose(aid, u, v)) == (u, v)


class TestMapStep:
    def test_examples(self):
        assert map_step("G", Fraction(5, 13)) == Fraction(3, 5)
        assert map_step("G", Fraction(0)) == 0
        assert map_step("O", Fraction(1)) == 0

    @pytest.mark.parametrize("aid", ALGO_IDS)
    def test_matches_divide(self, aid):
        algo = ALGORITHMS[aid]
        for u, v in valid_pairs(aid, 80):
            if math.gcd(u, v) != 1:
                continue
            d, r = divide(aid, u, v)
            x = map_step(aid, Fraction(u, v))
            assert x == Fraction(r, u)
            assert algo.in_interval(x)
