"""Regression-tree splitting against an exhaustive oracle."""

import numpy as np
import pytest

from cyclelife.errors import NoValidSplit
from cyclelife.models import RegressorSpec, predict, train
from cyclelife.models.tree import best_split, grow_tree, tree_predict


def exhaustive_split(x, y):
    """Try every midpoint between adjacent distinct values; pick the
    largest SSE gain, smallest threshold on ties."""
    def sse(v):
        return float(np.sum((v - v.mean()) ** 2)) if v.size else 0.0

    levels = np.unique(x)
    best = None
    for a, b in zip(levels, levels[1:]):
        thr = (a + b) / 2.0
        mask = x <= thr
        gain = sse(y) - sse(y[mask]) - sse(y[~mask])
        if best is None or gain > best[1] + 1e-12:
            best = (thr, gain)
    return best


class TestBestSplit:
    def test_step_column(self):
        thr, gain = best_split(np.array([1.0, 2, 3, 4]), np.array([0.0, 0, 10, 10]))
        assert thr == 2.5
        assert gain == pytest.approx(100.0)

    def test_two_points(self):
        thr, gain = best_split(np.array([1.0, 2.0]), np.array([0.0, 10.0]))
        assert thr == 1.5
        assert gain == pytest.approx(50.0)

    def test_constant_column_has_no_split(self):
        with pytest.raises(NoValidSplit):
            best_split(np.full(6, 3.0), np.arange(6.0))

    def test_tie_takes_smallest_threshold(self):
        # Splitting at 1.5 and 2.5 gives the same gain; the lower wins.
        thr, _ = best_split(np.array([1.0, 2.0, 3.0]), np.array([0.0, 1.0, 0.0]))
        assert thr == 1.5

    def test_matches_exhaustive_oracle_on_100_random_columns(self, rng):
        for trial in range(100):
            n = int(rng.integers(2, 31))
            if trial % 2:
                x = rng.normal(size=n)
            else:
                # Integer draws force duplicate feature values.
                x = rng.integers(0, 5, size=n).astype(np.float64)
            y = rng.normal(size=n)
            if np.unique(x).size < 2:
                with pytest.raises(NoValidSplit):
                    best_split(x, y)
                continue
            thr_ref, gain_ref = exhaustive_split(x, y)
            thr, gain = best_split(x, y)
            assert thr == pytest.approx(thr_ref, rel=1e-12)
            assert gain == pytest.approx(gain_ref, rel=1e-9, abs=1e-9)


class TestGrowTree:
    def test_single_leaf_on_constant_targets(self, rng):
        X = rng.normal(size=(10, 3))
        tree = grow_tree(X, np.full(10, 4.0))
        assert tree["feature"].shape == (1,)
        assert tree["feature"][0] == -1
        assert tree["value"][0] == 4.0

    def test_routing_sends_boundary_left(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        y = np.array([0.0, 0.0, 10.0, 10.0])
        tree = grow_tree(X, y, max_depth=1)
        assert tree["threshold"][0] == 2.5
        # The threshold itself routes left.
        assert tree_predict(tree, np.array([[2.5]]))[0] == 0.0
        assert tree_predict(tree, np.array([[2.5 + 1e-9]]))[0] == 10.0

    def test_depth_limit_caps_nodes(self, rng):
        X = rng.normal(size=(50, 2))
        y = rng.normal(size=50)
        stump = grow_tree(X, y, max_depth=1)
        assert stump["feature"].shape[0] == 3  # root + two leaves


class TestDecisionTree:
    def test_zero_training_error_on_separable_data(self, rng):
        # Distinct feature values let an unlimited-depth tree memorize.
        X = rng.normal(size=(40, 3))
        y = rng.normal(size=40)
        model = train(RegressorSpec("DecisionTree", seed=0), X, y)
        assert np.array_equal(predict(model, X), y)

    def test_stump_predicts_side_means(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        y = np.array([1.0, 3.0, 10.0, 14.0])
        model = train(RegressorSpec("DecisionTree", {"max_depth": 1}, seed=0), X, y)
        got = predict(model, np.array([[0.0], [9.0]]))
        assert got[0] == 2.0 and got[1] == 12.0

    def test_deterministic_and_seed_free(self, rng):
        X = rng.normal(size=(30, 4))
        y = rng.normal(size=30)
        a = train(RegressorSpec("DecisionTree", seed=1), X, y)
        b = train(RegressorSpec("DecisionTree", seed=999), X, y)
        probe = rng.normal(size=(10, 4))
        assert np.array_equal(predict(a, probe), predict(b, probe))

    def test_node_count_reported(self, rng):
        X = rng.normal(size=(20, 2))
        y = rng.normal(size=20)
        model = train(RegressorSpec("DecisionTree", seed=0), X, y)
        assert model.diagnostics["n_nodes"] == model.payload["tree"]["feature"].shape[0]
        assert model.diagnostics["n_nodes"] >= 3
