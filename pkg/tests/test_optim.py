"""
Tests for the Adam optimizer and the early-stopping controller.
"""

import numpy as np
import pytest

from ratnet.exceptions import NonFiniteError
from ratnet.services.optim import Adam, Decision, EarlyStopController, adam_step, early_stop_update


class TestAdam:
    """Bias-corrected Adam updates."""

    def test_zero_gradient_leaves_parameters(self):
        params = {"w": np.array([1.0, -2.0, 3.0])}
        adam = Adam()
        adam.step(params, {"w": np.zeros(3)})
        assert params["w"].tolist() == [1.0, -2.0, 3.0]
        assert adam.t == 1

    def test_first_step_is_learning_rate(self):
        g = np.array([0.5, -2.0, 0.1, 0.05])
        params = {"w": np.zeros(4)}
        adam = Adam(lr=1e-4)
        adam.step(params, {"w": g})
        np.testing.assert_allclose(np.abs(params["w"]), 1e-4, rtol=1e-6, atol=0)
        assert np.all(np.sign(params["w"]) == -np.sign(g))

    def test_defaults(self):
        adam = Adam()
        assert (adam.lr, adam.beta1, adam.beta2, adam.eps) == (1e-4, 0.9, 0.999, 1e-8)

    def test_quadratic_convergence(self):
        params = {"p": np.array([1.0])}
        adam = Adam(lr=0.01)
        reached = None
        for step in range(1, 2001):
            adam.step(params, {"p": 2.0 * params["p"]})
            if abs(params["p"][0]) < 0.01:
                reached = step
                break
        assert reached is not None

    def test_non_finite_gradient_aborts(self):
        params = {"a": np.array([1.0]), "b": np.array([2.0, 3.0])}
        adam = Adam()
        with pytest.raises(NonFiniteError) as excinfo:
            adam.step(params, {"a": np.array([0.5]), "b": np.array([np.nan, 1.0])})
        assert excinfo.value.slot == "b"
        assert params["a"].tolist() == [1.0]
        assert params["b"].tolist() == [2.0, 3.0]
        assert adam.t == 0

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            Adam().step({"a": np.zeros(2)}, {"a": np.zeros(3)})

    def test_identical_runs_identical_trajectories(self):
        def run():
            params = {"w": np.array([0.3, -0.8])}
            adam = Adam(lr=0.05)
            trajectory = []
            for _ in range(50):
                adam_step(adam, params, {"w": np.sin(params["w"] * 3.0)})
                trajectory.append(params["w"].copy())
            return np.array(trajectory)

        assert np.array_equal(run(), run())

    def test_second_moments_non_negative(self):
        params = {"w": np.zeros(3)}
        adam = Adam()
        for g in ([1.0, -1.0, 0.0], [-3.0, 2.0, 0.5]):
            adam.step(params, {"w": np.array(g)})
        assert np.all(adam.v["w"] >= 0.0)

    def test_invalid_learning_rate(self):
        with pytest.raises(ValueError):
            Adam(lr=0.0)


class TestEarlyStop:
    """Training-accuracy early stopping."""

    def test_increasing_accuracy_never_stops(self):
        ctrl = EarlyStopController(patience=3)
        for acc in np.linspace(0.1, 0.9, 20):
            assert ctrl.update(float(acc)) == Decision.CONTINUE

    def test_constant_accuracy_stops_at_patience(self):
        ctrl = EarlyStopController(patience=10)
        decisions = [ctrl.update(0.5) for _ in range(11)]
        assert decisions[:10] == [Decision.CONTINUE] * 10
        assert decisions[10] == Decision.STOP

    def test_repeated_value_after_gain(self):
        ctrl = EarlyStopController(patience=3, min_delta=1e-4)
        decisions = [early_stop_update(ctrl, acc) for acc in (0.5, 0.6, 0.6, 0.6, 0.6)]
        assert decisions == [Decision.CONTINUE] * 4 + [Decision.STOP]

    def test_gain_below_min_delta_is_not_improvement(self):
        ctrl = EarlyStopController(patience=2, min_delta=1e-4)
        ctrl.update(0.5)
        ctrl.update(0.50005)
        assert not ctrl.improved
        assert ctrl.evals_since_improve == 1
        assert ctrl.best_metric == 0.5

    def test_improvement_resets_counter(self):
        ctrl = EarlyStopController(patience=2)
        ctrl.update(0.5)
        ctrl.update(0.5)
        assert ctrl.update(0.7) == Decision.CONTINUE
        assert ctrl.improved
        assert ctrl.evals_since_improve == 0

    def test_first_evaluation_always_improves(self):
        ctrl = EarlyStopController()
        ctrl.update(0.0)
        assert ctrl.improved

    def test_rejects_out_of_range_accuracy(self):
        with pytest.raises(ValueError):
            EarlyStopController().update(1.5)
