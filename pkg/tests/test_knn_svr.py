"""Nearest-neighbour and support-vector regressors."""

import numpy as np
import pytest

from cyclelife.errors import SpecError
from cyclelife.features import Standardizer
from cyclelife.models import RegressorSpec, predict, train
from cyclelife.models.svr import rbf_kernel


class TestKNN:
    def test_k1_reproduces_training_targets(self, rng):
        X = rng.normal(size=(20, 3))
        y = rng.normal(size=20)
        model = train(RegressorSpec("KNN", {"k": 1}, seed=0), X, y)
        assert np.array_equal(predict(model, X), y)

    def test_equidistant_tie_takes_lower_index(self):
        X = np.array([[0.0], [2.0]])
        y = np.array([1.0, 5.0])
        model = train(RegressorSpec("KNN", {"k": 1}, seed=0), X, y)
        # The query sits exactly between both points (standardization
        # is affine, so equidistance survives scaling).
        assert predict(model, np.array([[1.0]]))[0] == 1.0

    def test_k2_averages_both_neighbors(self):
        X = np.array([[0.0], [2.0]])
        y = np.array([1.0, 5.0])
        model = train(RegressorSpec("KNN", {"k": 2}, seed=0), X, y)
        assert predict(model, np.array([[1.0]]))[0] == 3.0

    def test_oversized_k_clamps_to_sample_count(self, rng):
        X = rng.normal(size=(4, 2))
        y = np.array([1.0, 2.0, 3.0, 6.0])
        model = train(RegressorSpec("KNN", {"k": 10}, seed=0), X, y)
        assert model.payload["k"] == 4
        assert np.allclose(predict(model, rng.normal(size=(3, 2))), 3.0)

    def test_nonpositive_k_rejected(self, rng):
        X = rng.normal(size=(5, 2))
        with pytest.raises(SpecError):
            train(RegressorSpec("KNN", {"k": 0}, seed=0), X, np.arange(5.0))

    def test_matches_brute_force_oracle(self, rng):
        X = rng.normal(size=(30, 4))
        y = rng.normal(size=30)
        Q = rng.normal(size=(12, 4))
        k = 5
        model = train(RegressorSpec("KNN", {"k": k}, seed=0), X, y)
        sc = Standardizer().fit(X)
        Z, ZQ = sc.transform(X), sc.transform(Q)
        want = np.empty(12)
        for i in range(12):
            d = np.sum((Z - ZQ[i]) ** 2, axis=1)
            order = np.argsort(d, kind="stable")  # lower index wins ties
            want[i] = y[order[:k]].mean()
        assert np.allclose(predict(model, Q), want)


@pytest.fixture(scope="module")
def sine_fit():
    rng = np.random.default_rng(6)
    X = np.sort(rng.uniform(size=(40, 1)), axis=0)
    y = np.sin(2 * np.pi * X[:, 0])
    model = train(RegressorSpec("SVR", seed=0), X, y)
    return model, X, y


class TestSVR:
    def test_converges_on_smooth_target(self, sine_fit):
        model, X, y = sine_fit
        assert model.diagnostics["converged"] is True

    def test_dual_variables_respect_the_box(self, sine_fit):
        model, _, _ = sine_fit
        beta = model.payload["beta"]
        C = model.params["c"]
        assert np.all(np.abs(beta) <= C + 1e-9)

    def test_dual_variables_balance(self, sine_fit):
        # The equality constraint of the dual: coefficients sum to zero.
        model, _, _ = sine_fit
        assert abs(float(model.payload["beta"].sum())) < 1e-8

    def test_in_tube_points_carry_zero_coefficient(self, sine_fit):
        model, X, y = sine_fit
        err = np.abs(predict(model, X) - y)
        eps = model.params["eps"]
        inside = err < eps - 5e-3
        assert inside.any()  # the fixture really exercises the tube
        assert np.all(np.abs(model.payload["beta"][inside]) < 1e-6)

    def test_free_coefficients_sit_on_the_tube_boundary(self, sine_fit):
        model, X, y = sine_fit
        beta = model.payload["beta"]
        C = model.params["c"]
        eps = model.params["eps"]
        err = np.abs(predict(model, X) - y)
        free = (np.abs(beta) > 1e-6) & (np.abs(beta) < C - 1e-6)
        assert free.any()
        assert np.all(np.abs(err[free] - eps) < 5e-3)

    def test_training_error_stays_near_the_tube(self, sine_fit):
        model, X, y = sine_fit
        err = np.abs(predict(model, X) - y)
        assert float(err.max()) < model.params["eps"] + 5e-3

    def test_gamma_zero_means_reciprocal_feature_count(self, rng):
        X = rng.normal(size=(10, 4))
        y = rng.normal(size=10)
        model = train(RegressorSpec("SVR", seed=0), X, y)
        assert model.payload["gamma"] == 0.25

    def test_rbf_kernel_values(self):
        A = np.array([[0.0, 0.0], [1.0, 0.0]])
        K = rbf_kernel(A, A, gamma=0.5)
        assert K[0, 0] == 1.0 and K[1, 1] == 1.0
        assert K[0, 1] == pytest.approx(np.exp(-0.5))
        assert K[0, 1] == K[1, 0]
