"""Epsilon-insensitive support vector regression with an RBF kernel,
solved by pairwise coordinate optimization of the dual."""

from __future__ import annotations

import numpy as np

from cyclelife import kernels
from cyclelife.models.base import register


def rbf_kernel(A, B, gamma):
    """exp(-gamma * ||a - b||^2) for every row pair."""
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


def _train_svr(params, X, y, seed):
    gamma = float(params["gamma"]) or 1.0 / X.shape[1]
    K = rbf_kernel(X, X, gamma)
    beta, b, passes, converged = kernels.smo_svr(
        K,
        y,
        float(params["c"]),
        float(params["eps"]),
        float(params["tol"]),
        int(params["max_passes"]),
    )
    return (
        {"train_X": X.copy(), "beta": beta, "b": b, "gamma": gamma},
        {"iterations": passes, "converged": bool(converged)},
    )


def _predict_svr(payload, X):
    K = rbf_kernel(np.ascontiguousarray(X), payload["train_X"], payload["gamma"])
    return K @ payload["beta"] + payload["b"]


register("SVR")(_train_svr, _predict_svr)
