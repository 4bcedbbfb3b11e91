import math

import numpy as np
import pytest

from euclidstats.core import ALGORITHMS
from euclidstats.costs import DigitCost
from euclidstats.realdyn import mu_hat_closed_form
from euclidstats.spectral import (
    AssembledOperator,
    ConstantsBundle,
    DivergenceError,
    FunctionModel,
    InconsistencyError,
    OperatorConfig,
    assemble,
    chebyshev_nodes,
    barycentric_weights,
    constants,
    dominant_eigen,
    invariant_density,
    lambda_fn,
    pressure_derivatives,
    solve_sigma,
    spectral_model,
    weighted_derivative_average,
)

CFG = OperatorConfig()


class TestFunctionModel:
    def test_nodal_reproduction(self):
        nodes = chebyshev_nodes(20, 0.0, 1.0)
        vals = np.sin(3 * nodes)
        f = FunctionModel(nodes, vals)
        assert np.max(np.abs(f(nodes) - vals)) <= 1e-13

    def test_interpolation_and_integral(self):
        nodes = chebyshev_nodes(30, 0.0, 1.0)
        f = FunctionModel(nodes, np.exp(nodes))
        assert f(0.37) == pytest.approx(math.exp(0.37), abs=1e-12)
        assert f.integral() == pytest.approx(math.e - 1.0, abs=1e-12)
        assert f.derivative()(0.5) == pytest.approx(math.exp(0.5), abs=1e-9)


class TestAssembly:
    def test_density_fixed_point(self):
        # applying the matrix at (1, 0) to the invariant density returns it
        op = assemble("G", DigitCost.unit(), 1.0, 0.0, CFG)
        alg = ALGORITHMS["G"]
        vals = np.array([alg.density(x) for x in op.nodes])
        err = np.max(np.abs(op.matrix @ vals - vals))
        assert err <= 1e-10

    def test_constant_image_is_zeta_like(self):
        # at sigma = 2 the image of 1 at x = 0 is sum_m m^-4
        op = assemble("G", DigitCost.unit(), 2.0, 0.0, CFG)
        got = (op.matrix @ np.ones(len(op.nodes)))[0]
        want = sum(m**-4.0 for m in range(1, 200000))
        assert got == pytest.approx(want, abs=1e-12)

    def test_monotone_in_nu(self):
        op0 = assemble("G", DigitCost.unit(), 1.0, 0.0, CFG)
        op1 = assemble("G", DigitCost.unit(), 1.0, 0.2, CFG)
        f = np.ones(len(op0.nodes))
        assert np.all(op1.matrix @ f >= op0.matrix @ f)

    def test_divergence_guards(self):
        with pytest.raises(DivergenceError):
            assemble("G", DigitCost.unit(), 0.5, 0.0, CFG)
        with pytest.raises(DivergenceError):
            assemble("G", DigitCost.binary_length(), 1.0, 0.8, CFG)

    def test_tail_bound_within_tolerance(self):
        for aid in ("G", "K", "O"):
            op = assemble(aid, DigitCost.unit(), 1.0, 0.0, CFG)
            assert op.tail_bound <= CFG.tail_tol

    def test_degree_floor(self):
        with pytest.raises(InconsistencyError):
            OperatorConfig(degree=4)


class TestEigen:
    def test_rank_one_matrix(self):
        nodes = chebyshev_nodes(8, 0.0, 1.0)
        bary = barycentric_weights(nodes)
        one = np.ones(len(nodes))
        op = AssembledOperator("G", "unit", 1.0, 0.0, 2.0 * np.outer(one, one) / len(one), nodes, bary, 0.0)
        lam, fn, res = dominant_eigen(op, CFG)
        assert lam == pytest.approx(2.0, abs=1e-14)
        assert res <= 1e-14

    @pytest.mark.parametrize("aid", ["G", "K", "O"])
    def test_unit_eigenvalue(self, aid):
        assert lambda_fn(aid, DigitCost.unit(), 1.0, 0.0, CFG) == pytest.approx(1.0, abs=1e-9)

    def test_eigenfunction_positive_and_matches_density(self):
        model = spectral_model("K", DigitCost.unit(), 1.0, 0.0, CFG)
        assert np.min(model.eigenfunction.values) > 0
        assert model.residual <= 1e-10
        alg = ALGORITHMS["K"]
        fn = invariant_density("K", CFG)
        grid = np.linspace(0, 0.5, 100)
        closed = np.array([alg.density(x) for x in grid])
        assert np.max(np.abs(fn(grid) - closed)) <= 1e-8
        assert fn.integral() == pytest.approx(1.0, abs=1e-12)

    def test_lambda_monotonicity(self):
        cost = DigitCost.unit()
        sigmas = [0.8, 0.9, 1.0, 1.1, 1.2]
        lams = [lambda_fn("G", cost, s, 0.0, CFG) for s in sigmas]
        assert all(a > b for a, b in zip(lams, lams[1:]))
        nus = [-0.2, 0.0, 0.2]
        lams_nu = [lambda_fn("G", cost, 1.0, nu, CFG) for nu in nus]
        assert all(a < b for a, b in zip(lams_nu, lams_nu[1:]))


class TestPressure:
    def test_entropy_standard(self):
        part = pressure_derivatives("G", DigitCost.unit(), CFG)
        assert -part["lambda_s"] == pytest.approx(math.pi**2 / (6 * math.log(2)), rel=1e-10)

    def test_dual_oracle_lambda_w(self):
        for aid in ("G", "K", "O"):
            for cost in (DigitCost.indicator(1), DigitCost.indicator(2), DigitCost.binary_length()):
                if aid == "O" and cost.kind == "indicator" and cost.m0 == 2:
                    continue  # even quotients never occur
                part = pressure_derivatives(aid, cost, CFG)
                target = mu_hat_closed_form(aid, cost)
                assert abs(part["lambda_w_fd"] - target) <= 1e-7
                assert abs(part["lambda_w"] - target) <= 1e-9

    def test_analytic_weight_derivative(self):
        got = weighted_derivative_average("G", DigitCost.indicator(1), CFG)
        assert got == pytest.approx(math.log2(4 / 3), abs=1e-12)

    def test_constants_standard_unit(self):
        b = constants("G", DigitCost.unit(), CFG)
        assert b.mu == pytest.approx(12 * math.log(2) / math.pi**2, rel=1e-9)
        assert b.muc_check == "pass"
        # constant cost: no covariance and no dynamical variance
        assert abs(b.lambda_sw) <= 1e-6
        assert abs(b.delta_hat2) <= 1e-6
        assert b.delta2 > 0 and b.delta2_c > 0
        assert b.delta2_c == pytest.approx(b.delta2, rel=1e-4)

    def test_degree_and_cap_robustness(self):
        base = constants("G", DigitCost.indicator(1), CFG)
        finer = constants(
            "G", DigitCost.indicator(1), OperatorConfig(degree=56, m_cap=128)
        )
        assert abs(finer.lambda_s - base.lambda_s) <= 1e-8
        assert abs(finer.lambda_w - base.lambda_w) <= 1e-8
        assert abs(finer.lambda_ss - base.lambda_ss) <= 1e-8
        assert abs(finer.lambda_ww - base.lambda_ww) <= 1e-8
        assert abs(finer.lambda_sw - base.lambda_sw) <= 1e-8

    def test_signs(self):
        for aid in ("G", "K", "O"):
            b = constants(aid, DigitCost.binary_length(), OperatorConfig())
            assert b.lambda_s < 0 and b.lambda_ss > 0 and b.delta2_c > 0


class TestSigma:
    def test_sigma_zero(self):
        assert solve_sigma("G", DigitCost.unit(), 0.0, CFG) == pytest.approx(1.0, abs=1e-9)

    def test_sigma_derivative_matches_mu(self):
        b = constants("G", DigitCost.unit(), CFG)
        h = 1e-4
        fd = (
            solve_sigma("G", DigitCost.unit(), h, CFG)
            - solve_sigma("G", DigitCost.unit(), -h, CFG)
        ) / (2 * h)
        assert abs(fd - b.mu / 2) <= 1e-5

    def test_bundle_json(self, tmp_path):
        b = constants("G", DigitCost.unit(), CFG)
        p = tmp_path / "bundle.json"
        b.write_json(p)
        import json

        payload = json.loads(p.read_text())
        assert payload["mu"] == pytest.approx(b.mu)
        assert payload["config"]["degree"] == CFG.degree
