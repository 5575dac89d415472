"""Tree ensembles: bagging, gradient boosting, AdaBoost.R2, and
second-order (curvature-aware) boosting.

Per-tree randomness always derives from (seed, tree_index), so results
are identical no matter how training is scheduled.
"""

from __future__ import annotations

import math

import numpy as np

from cyclelife import kernels
from cyclelife.models.base import register
from cyclelife.models.tree import grow_tree, tree_predict
from cyclelife.rng import SplitMix64, derive_seed


def _bootstrap_indices(rng, n):
    return np.array([rng.below(n) for _ in range(n)], dtype=np.int64)


def _train_random_forest(params, X, y, seed):
    n, p = X.shape
    n_trees = int(params["n_trees"])
    max_depth = int(params["max_depth"])
    m = max(1, p // 3)
    trees = []
    for t in range(n_trees):
        rng = SplitMix64(derive_seed(seed, t))
        boot = _bootstrap_indices(rng, n)
        sampler = lambda: rng.sample_without_replacement(p, m)
        trees.append(grow_tree(X[boot], y[boot], max_depth, feature_sampler=sampler))
    return {"trees": trees}, {"iterations": n_trees, "converged": True}


def _predict_forest_mean(payload, X):
    acc = np.zeros(X.shape[0])
    for tree in payload["trees"]:
        acc += tree_predict(tree, X)
    return acc / len(payload["trees"])


def _predict_boosted(payload, X):
    acc = np.full(X.shape[0], payload["base"])
    for tree in payload["trees"]:
        acc += payload["lr"] * tree_predict(tree, X)
    return acc


def _train_gradient_boost(params, X, y, seed):
    n_rounds = int(params["n_rounds"])
    lr = float(params["lr"])
    max_depth = int(params["max_depth"])
    base = float(np.mean(y))
    F = np.full(y.shape[0], base)
    trees = []
    for _ in range(n_rounds):
        r = y - F
        tree = grow_tree(
            X,
            r,
            max_depth=max_depth,
            leaf_fn=lambda idx: float(np.mean(r[idx])),
            split_fn=lambda col, idx: kernels.best_split(col, r[idx]),
        )
        F += lr * tree_predict(tree, X)
        trees.append(tree)
    return (
        {"trees": trees, "base": base, "lr": lr},
        {"iterations": n_rounds, "converged": True},
    )


def _train_adaboost(params, X, y, seed):
    n, _ = X.shape
    n_rounds = int(params["n_rounds"])
    max_depth = int(params["max_depth"])
    w = np.full(n, 1.0 / n)
    trees = []
    tree_weights = []
    for t in range(n_rounds):
        rng = SplitMix64(derive_seed(seed, t))
        cum = np.cumsum(w)
        cum[-1] = max(cum[-1], 1.0)
        draws = np.array([rng.uniform() for _ in range(n)])
        idx = np.minimum(np.searchsorted(cum, draws, side="right"), n - 1)
        tree = grow_tree(X[idx], y[idx], max_depth=max_depth)
        pred = tree_predict(tree, X)
        err = np.abs(pred - y)
        max_err = float(err.max())
        if max_err == 0.0:
            trees.append(tree)
            tree_weights.append(math.log(1e10))
            break
        loss = err / max_err
        avg_loss = float(w @ loss)
        if avg_loss >= 0.5:
            if not trees:
                trees.append(tree)
                tree_weights.append(1e-10)
            break
        beta = avg_loss / (1.0 - avg_loss)
        trees.append(tree)
        tree_weights.append(math.log(1.0 / beta))
        w = w * beta ** (1.0 - loss)
        w = w / w.sum()
    return (
        {"trees": trees, "tree_weights": np.array(tree_weights)},
        {"iterations": len(trees), "converged": True},
    )


def _predict_adaboost(payload, X):
    """Weighted median over the ensemble's per-tree predictions."""
    trees = payload["trees"]
    tw = payload["tree_weights"]
    preds = np.stack([tree_predict(t, X) for t in trees])  # (m, nq)
    out = np.empty(X.shape[0])
    half = 0.5 * tw.sum()
    for q in range(X.shape[0]):
        order = np.argsort(preds[:, q], kind="mergesort")
        csum = np.cumsum(tw[order])
        pos = int(np.searchsorted(csum, half, side="left"))
        out[q] = preds[order[min(pos, len(trees) - 1)], q]
    return out


def _train_xgboost_style(params, X, y, seed):
    n_rounds = int(params["n_rounds"])
    lr = float(params["lr"])
    lam = float(params["lam"])
    gamma = float(params["gamma"])
    max_depth = int(params["max_depth"])
    base = float(np.mean(y))
    F = np.full(y.shape[0], base)
    h = np.ones(y.shape[0])
    trees = []
    for _ in range(n_rounds):
        g = F - y

        def leaf_fn(idx):
            return float(-g[idx].sum() / (h[idx].sum() + lam))

        def split_fn(col, idx):
            thr, gain, found = kernels.xgb_best_split(col, g[idx], h[idx], lam)
            return thr, gain - gamma, found

        tree = grow_tree(X, y, max_depth=max_depth, leaf_fn=leaf_fn, split_fn=split_fn)
        F += lr * tree_predict(tree, X)
        trees.append(tree)
    return (
        {"trees": trees, "base": base, "lr": lr},
        {"iterations": n_rounds, "converged": True},
    )


register("RandomForest")(_train_random_forest, _predict_forest_mean)
register("GradientBoost")(_train_gradient_boost, _predict_boosted)
register("AdaBoost")(_train_adaboost, _predict_adaboost)
register("XGBoostStyle")(_train_xgboost_style, _predict_boosted)
