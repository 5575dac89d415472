"""Regression trees: variance-reduction CART in an array encoding.

Trees are stored as parallel arrays (feature, threshold, left, right,
value); feature < 0 marks a leaf.  Internal nodes route
x[feature] <= threshold to the left child.  The same builder serves the
standalone decision tree and every tree ensemble; boosted trees swap in
the second-order split objective.
"""

from __future__ import annotations

import numpy as np

from cyclelife import kernels
from cyclelife.errors import NoValidSplit
from cyclelife.models.base import register


def best_split(x, y):
    """Best variance-reducing split of one feature column.

    Returns (threshold, sse_gain); thresholds are midpoints between
    adjacent sorted distinct values, ties broken by the smallest
    threshold.  Raises NoValidSplit when all values are equal.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    thr, gain, found = kernels.best_split(x, y)
    if not found:
        raise NoValidSplit("all feature values equal")
    return thr, gain


class _TreeBuilder:
    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []

    def add_leaf(self, v):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(float(v))
        return len(self.feature) - 1

    def add_internal(self, j, thr):
        self.feature.append(int(j))
        self.threshold.append(float(thr))
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def arrays(self):
        return {
            "feature": np.array(self.feature, dtype=np.int64),
            "threshold": np.array(self.threshold, dtype=np.float64),
            "left": np.array(self.left, dtype=np.int64),
            "right": np.array(self.right, dtype=np.int64),
            "value": np.array(self.value, dtype=np.float64),
        }


def grow_tree(X, y, max_depth=0, feature_sampler=None, leaf_fn=None, split_fn=None):
    """Grow one tree and return its array encoding.

    max_depth 0 means unlimited.  feature_sampler(), when given, yields
    the candidate feature indices for each split (random-forest style);
    leaf_fn/split_fn override the leaf value and per-column objective
    for boosted variants.  The best (gain, lowest candidate order)
    split wins; a node becomes a leaf when no column splits.
    """
    if leaf_fn is None:
        leaf_fn = lambda idx: float(np.mean(y[idx]))
    if split_fn is None:
        split_fn = lambda col, idx: kernels.best_split(col, y[idx])
    p = X.shape[1]
    tb = _TreeBuilder()

    def rec(idx, depth):
        if idx.shape[0] < 2 or (max_depth and depth >= max_depth):
            return tb.add_leaf(leaf_fn(idx))
        candidates = range(p) if feature_sampler is None else feature_sampler()
        best_gain = 0.0
        best = None
        for j in candidates:
            thr, gain, found = split_fn(np.ascontiguousarray(X[idx, j]), idx)
            if found and gain > best_gain:
                best_gain = gain
                best = (j, thr)
        if best is None:
            return tb.add_leaf(leaf_fn(idx))
        j, thr = best
        node = tb.add_internal(j, thr)
        mask = X[idx, j] <= thr
        l = rec(idx[mask], depth + 1)
        r = rec(idx[~mask], depth + 1)
        tb.left[node] = l
        tb.right[node] = r
        return node

    rec(np.arange(X.shape[0], dtype=np.int64), 0)
    return tb.arrays()


def tree_predict(tree, X):
    return kernels.tree_predict(
        tree["feature"], tree["threshold"], tree["left"], tree["right"],
        tree["value"], X,
    )


def _train_decision_tree(params, X, y, seed):
    tree = grow_tree(X, y, max_depth=int(params["max_depth"]))
    return {"tree": tree}, {
        "iterations": 1,
        "converged": True,
        "n_nodes": int(tree["feature"].shape[0]),
    }


def _predict_decision_tree(payload, X):
    return tree_predict(payload["tree"], X)


register("DecisionTree")(_train_decision_tree, _predict_decision_tree)
