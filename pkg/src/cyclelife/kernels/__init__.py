"""Hot-loop kernels with backend dispatch (see cyclelife.backend)."""

from __future__ import annotations

from cyclelife.backend import select_backend

BACKEND = select_backend()

if BACKEND == "numba":
    from cyclelife.kernels import numba_impl as _impl
else:
    from cyclelife.kernels import numpy_impl as _impl

best_split = _impl.best_split
xgb_best_split = _impl.xgb_best_split
tree_predict = _impl.tree_predict
cd_sweeps = _impl.cd_sweeps
sgd_epochs = _impl.sgd_epochs
smo_svr = _impl.smo_svr
knn_predict = _impl.knn_predict


def active_backend() -> str:
    """Name of the kernel backend chosen at import time."""
    return BACKEND


def warmup() -> None:
    """Touch every kernel once so jit compilation happens up front."""
    import numpy as np

    x = np.array([1.0, 2.0, 3.0, 4.0])
    y = np.array([0.0, 0.0, 10.0, 10.0])
    best_split(x, y)
    xgb_best_split(x, y - 5.0, np.ones(4), 1.0)
    feature = np.array([0, -1, -1], dtype=np.int64)
    thr = np.array([2.5, 0.0, 0.0])
    left = np.array([1, -1, -1], dtype=np.int64)
    right = np.array([2, -1, -1], dtype=np.int64)
    value = np.array([0.0, 0.0, 10.0])
    tree_predict(feature, thr, left, right, value, x.reshape(-1, 1))
    XT = np.array([[1.0, -1.0, 0.5, -0.5]])
    w = np.zeros(1)
    cd_sweeps(XT, y - y.mean(), w, 0.01, 0.0, np.array([0.625]), 1e-6, 10)
    sgd_epochs(
        x.reshape(-1, 1), y, np.zeros(1), 0.0, 1e-3,
        np.array([[0, 1, 2, 3]], dtype=np.int64),
    )
    K = np.exp(-((x[:, None] - x[None, :]) ** 2))
    smo_svr(K, y, 100.0, 0.1, 1e-3, 50)
    knn_predict(x.reshape(-1, 1), y, x.reshape(-1, 1), 2)
