"""Linear-family regressors: least squares, ridge, lasso, elastic net,
per-sample SGD, and RANSAC consensus fitting."""

from __future__ import annotations

import numpy as np

from cyclelife import kernels
from cyclelife.errors import NoConsensus, SingularSystem, SpecError
from cyclelife.models.base import register
from cyclelife.rng import SplitMix64, derive_seed

JITTER = 1e-10


def soft_threshold(rho: float, lam: float) -> float:
    """sign(rho) * max(|rho| - lam, 0); the lasso coordinate update."""
    if lam < 0:
        raise SpecError("soft_threshold needs lambda >= 0")
    return float(np.sign(rho) * max(abs(rho) - lam, 0.0))


def _lstsq_qr(A, y):
    """Least squares via QR; jittered normal equations on rank deficiency."""
    if A.shape[0] >= A.shape[1]:
        q, r = np.linalg.qr(A)
        diag = np.abs(np.diag(r))
        if diag.min() > 1e-10 * max(diag.max(), 1.0):
            return np.linalg.solve(r, q.T @ y)
    G = A.T @ A
    G[np.diag_indices_from(G)] += JITTER
    try:
        coef = np.linalg.solve(G, A.T @ y)
    except np.linalg.LinAlgError as e:
        raise SingularSystem(f"normal equations singular even with jitter: {e}") from e
    if not np.all(np.isfinite(coef)):
        raise SingularSystem("non-finite solution from jittered normal equations")
    return coef


def _fit_ols(X, y):
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    coef = _lstsq_qr(A, y)
    return coef[:-1], float(coef[-1])


def _train_linear(params, X, y, seed):
    w, b = _fit_ols(X, y)
    return {"w": w, "b": b}, {"iterations": 1, "converged": True}


def _predict_linear(payload, X):
    return X @ payload["w"] + payload["b"]


def _train_ridge(params, X, y, seed):
    lam = float(params["lam"])
    if lam < 0:
        raise SpecError("ridge lambda must be >= 0")
    # Centre so the intercept stays unpenalized.
    xm = X.mean(axis=0)
    ym = y.mean()
    Xc = X - xm
    G = Xc.T @ Xc + lam * np.eye(X.shape[1])
    try:
        w = np.linalg.solve(G, Xc.T @ (y - ym))
    except np.linalg.LinAlgError:
        G[np.diag_indices_from(G)] += JITTER
        w = np.linalg.solve(G, Xc.T @ (y - ym))
    b = float(ym - xm @ w)
    return {"w": w, "b": b}, {"iterations": 1, "converged": True}


def _coordinate_descent(X, y, l1, l2, tol, max_sweeps):
    n, p = X.shape
    ym = y.mean()
    yc = y - ym
    col_sq = (X * X).mean(axis=0)
    active = col_sq > 0.0
    w_active = np.zeros(int(active.sum()))
    XT = np.ascontiguousarray(X[:, active].T)
    sweeps, converged = kernels.cd_sweeps(
        XT, yc, w_active, l1, l2, col_sq[active], tol, max_sweeps
    )
    w = np.zeros(p)
    w[active] = w_active
    b = float(ym - X.mean(axis=0) @ w)
    return w, b, sweeps, converged


def _train_lasso(params, X, y, seed):
    w, b, sweeps, converged = _coordinate_descent(
        X, y, float(params["lam"]), 0.0, float(params["tol"]), int(params["max_sweeps"])
    )
    return {"w": w, "b": b}, {"iterations": sweeps, "converged": converged}


def _train_elastic_net(params, X, y, seed):
    lam = float(params["lam"])
    mix = float(params["mix"])
    if not (0.0 <= mix <= 1.0):
        raise SpecError("elastic net mix must lie in [0, 1]")
    w, b, sweeps, converged = _coordinate_descent(
        X, y, lam * mix, lam * (1.0 - mix), float(params["tol"]), int(params["max_sweeps"])
    )
    return {"w": w, "b": b}, {"iterations": sweeps, "converged": converged}


def _train_sgd(params, X, y, seed):
    n, p = X.shape
    epochs = int(params["epochs"])
    rng = SplitMix64(derive_seed(seed, 0))
    perms = np.empty((epochs, n), dtype=np.int64)
    for e in range(epochs):
        perms[e] = rng.permutation(n)
    w = np.zeros(p)
    b = kernels.sgd_epochs(X, y, w, 0.0, float(params["lr"]), perms)
    return {"w": w, "b": float(b)}, {"iterations": epochs, "converged": True}


def _train_ransac(params, X, y, seed):
    n, p = X.shape
    min_samples = int(params["min_samples"]) or p + 1
    if n < min_samples:
        raise SpecError(f"RANSAC needs at least {min_samples} rows, got {n}")
    n_iters = int(params["n_iters"])
    trials = []
    tightest = np.inf
    for it in range(n_iters):
        rng = SplitMix64(derive_seed(seed, it))
        idx = rng.sample_without_replacement(n, min_samples)
        try:
            w, b = _fit_ols(X[idx], y[idx])
        except SingularSystem:
            continue
        resid = X @ w + b - y
        med = np.median(resid)
        mad = float(np.median(np.abs(resid - med)))
        trials.append((w, b))
        tightest = min(tightest, mad)
    best_count = -1
    best_inliers = None
    if trials:
        # One common acceptance band, set by the tightest trial's residual
        # spread: a wild trial must win under the best trial's scale rather
        # than inflating its own.  The floor keeps exact fits (mad = 0) from
        # rejecting their own points over floating-point residual noise.
        thresh = max(3.0 * tightest, 1e-8 * (1.0 + float(np.abs(y).max())))
        for w, b in trials:
            inliers = np.abs(X @ w + b - y) <= thresh
            count = int(inliers.sum())
            if count > best_count:
                best_count = count
                best_inliers = inliers
    if best_inliers is None or best_count < min_samples:
        raise NoConsensus(
            f"no trial produced {min_samples} inliers in {n_iters} iterations"
        )
    w, b = _fit_ols(X[best_inliers], y[best_inliers])
    return (
        {"w": w, "b": b, "inlier_mask": best_inliers},
        {"iterations": n_iters, "converged": True, "n_inliers": best_count},
    )


register("Linear")(_train_linear, _predict_linear)
register("Ridge")(_train_ridge, _predict_linear)
register("Lasso")(_train_lasso, _predict_linear)
register("ElasticNet")(_train_elastic_net, _predict_linear)
register("SGD")(_train_sgd, _predict_linear)
register("RANSAC")(_train_ransac, _predict_linear)
