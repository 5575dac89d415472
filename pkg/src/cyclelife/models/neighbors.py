"""k-nearest-neighbour regression on standardized features."""

from __future__ import annotations

import numpy as np

from cyclelife import kernels
from cyclelife.errors import SpecError
from cyclelife.models.base import register


def _train_knn(params, X, y, seed):
    k = int(params["k"])
    if k < 1:
        raise SpecError("knn needs k >= 1")
    # Lazy learner: training just snapshots the data.
    return (
        {"train_X": X.copy(), "train_y": y.copy(), "k": min(k, X.shape[0])},
        {"iterations": 0, "converged": True},
    )


def _predict_knn(payload, X):
    return kernels.knn_predict(
        payload["train_X"],
        payload["train_y"],
        np.ascontiguousarray(X),
        int(payload["k"]),
    )


register("KNN")(_train_knn, _predict_knn)
