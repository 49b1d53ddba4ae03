import numpy as np
import pytest

from iqcc.engine import Ansatz, estimate_amplitude, rank_generators
from iqcc.errors import OptimizationError
from iqcc.optimizer import OptimizationConfig, minimize


def quadratic(v):
    return float(np.sum((v - 1.0) ** 2))


def quadratic_grad(v):
    return 2.0 * (v - 1.0)


class TestMinimize:
    def test_quadratic_bowl(self):
        res = minimize(quadratic, quadratic_grad, np.zeros(3))
        assert res.converged
        assert np.max(np.abs(res.t_opt - 1.0)) < 1e-8
        assert res.energy < 1e-14

    def test_already_optimal(self):
        res = minimize(quadratic, quadratic_grad, np.ones(2))
        assert res.converged
        assert res.evaluations <= 2
        assert np.array_equal(res.t_opt, np.ones(2))

    def test_monotone_accepted_iterates(self):
        # rebuild the accepted-iterate energy sequence and check descent
        seen = []

        def f(v):
            return float(np.sum((v - 2.0) ** 4 + 0.5 * v**2))

        def g(v):
            return 4.0 * (v - 2.0) ** 3 + v

        from scipy.optimize import minimize as sp_min

        res = sp_min(
            f, np.zeros(4), jac=g, method="L-BFGS-B",
            callback=lambda xk: seen.append(f(xk)),
        )
        energies = [f(np.zeros(4))] + seen
        assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))
        ours = minimize(f, g, np.zeros(4))
        assert ours.energy <= f(np.zeros(4))

    def test_returned_energy_not_above_start(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            t0 = rng.normal(size=3)
            res = minimize(quadratic, quadratic_grad, t0)
            assert res.energy <= quadratic(t0) + 1e-12

    def test_non_finite_objective(self):
        def bad(v):
            return float("nan")

        def bad_grad(v):
            return np.zeros_like(v)

        with pytest.raises(OptimizationError) as err:
            minimize(bad, bad_grad, np.zeros(2))
        assert err.value.point is not None

    def test_evaluation_budget_respected(self):
        calls = []

        def f(v):
            calls.append(1)
            return float(np.sum(np.cos(3 * v) + 0.01 * v**2))

        def g(v):
            return -3 * np.sin(3 * v) + 0.02 * v

        cfg = OptimizationConfig(max_evaluations=5)
        minimize(f, g, np.full(4, 0.7), cfg)
        assert len(calls) <= 7  # maxfun plus scipy's final polish evaluations

    def test_config_validation(self):
        with pytest.raises(ValueError):
            OptimizationConfig(gradient_tolerance=0.0)
        with pytest.raises(ValueError):
            OptimizationConfig(max_evaluations=0)

    def test_fused_callable(self):
        def vag(v):
            return quadratic(v), quadratic_grad(v)

        res = minimize(None, None, np.zeros(2), value_and_gradient=vag)
        assert np.max(np.abs(res.t_opt - 1.0)) < 1e-8


class TestOnQccProblem:
    def test_h2_single_amplitude_matches_closed_form(self, h2_problem):
        from iqcc.engine import qcc_energy_and_gradient

        _, h, ref = h2_problem
        sel, _ = rank_generators(h, ref, 1)
        r = sel[0]
        base = Ansatz([(r.generator, 0.0)])

        def vag(v):
            e, g = qcc_energy_and_gradient(h, base.with_amplitudes(v), ref)
            return e, np.asarray(g)

        res = minimize(None, None, np.array([r.t_estimate]), value_and_gradient=vag)
        t_closed, _ = estimate_amplitude(r.omega_signed, r.d_value)
        assert abs(res.t_opt[0] - t_closed) < 1e-8
        assert res.converged
