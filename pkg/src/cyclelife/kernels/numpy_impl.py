"""Pure numpy reference implementations of the hot kernels.

Each function here has a numba twin in numba_impl.py with identical
semantics; this module is the fallback when numba is disabled and the
reference the benchmark compares against.
"""

from __future__ import annotations

import numpy as np

NO_SPLIT = (0.0, -1.0, False)


def best_split(x, y):
    """Best variance-reducing split of one feature column.

    Returns (threshold, sse_gain, found).  Thresholds are midpoints
    between adjacent sorted distinct values; on equal gain the smallest
    threshold wins.  found is False when all values are equal.
    """
    n = x.shape[0]
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ys = y[order]
    cs = np.cumsum(ys)
    cq = np.cumsum(ys * ys)
    total = cs[n - 1]
    total_sq = cq[n - 1]
    parent = total_sq - total * total / n

    k = np.arange(1, n)
    valid = xs[1:] > xs[:-1]
    if not np.any(valid):
        return NO_SPLIT
    sl = cs[:-1]
    ql = cq[:-1]
    sse_l = ql - sl * sl / k
    sr = total - sl
    qr = total_sq - ql
    sse_r = qr - sr * sr / (n - k)
    gain = parent - sse_l - sse_r
    gain = np.where(valid, gain, -np.inf)
    best = int(np.argmax(gain))
    thr = 0.5 * (xs[best] + xs[best + 1])
    return thr, float(gain[best]), True


def xgb_best_split(x, g, h, lam):
    """Best split under the second-order boosting objective.

    Returns (threshold, gain, found) with gain the half-sum-of-scores
    improvement (caller subtracts the complexity penalty).
    """
    n = x.shape[0]
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    cg = np.cumsum(g[order])
    ch = np.cumsum(h[order])
    G = cg[n - 1]
    H = ch[n - 1]

    valid = xs[1:] > xs[:-1]
    if not np.any(valid):
        return NO_SPLIT
    gl = cg[:-1]
    hl = ch[:-1]
    score = gl * gl / (hl + lam) + (G - gl) ** 2 / (H - hl + lam)
    gain = 0.5 * (score - G * G / (H + lam))
    gain = np.where(valid, gain, -np.inf)
    best = int(np.argmax(gain))
    thr = 0.5 * (xs[best] + xs[best + 1])
    return thr, float(gain[best]), True


def tree_predict(feature, threshold, left, right, value, X):
    """Route rows of X through an array-encoded tree (feature < 0 = leaf)."""
    n = X.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


def cd_sweeps(XT, yc, w, l1, l2, col_sq, tol, max_sweeps):
    """Cyclic coordinate descent for the elastic-net objective.

    Minimises (1/2n)||yc - X w||^2 + l1*||w||_1 + (l2/2)*||w||_2^2 over
    centred targets yc and column-major features XT (p, n).  Mutates w
    in place; returns (sweeps_done, converged).
    """
    p, n = XT.shape
    r = yc - XT.T @ w
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        max_delta = 0.0
        for j in range(p):
            wj = w[j]
            rho = XT[j] @ r / n + col_sq[j] * wj
            wj_new = np.sign(rho) * max(abs(rho) - l1, 0.0) / (col_sq[j] + l2)
            if wj_new != wj:
                r -= XT[j] * (wj_new - wj)
                w[j] = wj_new
            delta = abs(wj_new - wj)
            if delta > max_delta:
                max_delta = delta
        if max_delta < tol:
            return sweeps, True
    return sweeps, False


def sgd_epochs(X, y, w, b, lr, perms):
    """Per-sample squared-loss SGD updates in the given visit order.

    perms has one row per epoch.  Mutates w in place; returns the bias.
    """
    for e in range(perms.shape[0]):
        for t in range(perms.shape[1]):
            i = perms[e, t]
            err = X[i] @ w + b - y[i]
            w -= lr * err * X[i]
            b -= lr * err
    return b


def smo_svr(K, y, C, eps, tol, max_passes):
    """SMO over the epsilon-SVR dual with 2n box variables.

    Variables are stacked [alpha; alpha_star] with signs z = [+1; -1];
    the equality constraint sum(z*theta) = 0 carries the bias.  Returns
    (beta, b, passes, converged) with beta = alpha - alpha_star.
    """
    n = K.shape[0]
    theta = np.zeros(2 * n)
    G = np.concatenate([eps - y, eps + y])
    z = np.concatenate([np.ones(n), -np.ones(n)])
    neg_inf = -np.inf

    passes = 0
    converged = False
    m = M = 0.0
    while passes < max_passes:
        s = -z * G
        up = np.where((z > 0) & (theta < C) | (z < 0) & (theta > 0), s, neg_inf)
        low = np.where((z > 0) & (theta > 0) | (z < 0) & (theta < C), s, np.inf)
        i = int(np.argmax(up))
        j = int(np.argmin(low))
        m = up[i]
        M = low[j]
        if m - M <= tol:
            converged = True
            break
        ii = i % n
        jj = j % n
        a = K[ii, ii] + K[jj, jj] - 2.0 * K[ii, jj]
        if a <= 1e-12:
            a = 1e-12
        t = (s[i] - s[j]) / a
        t_max_i = C - theta[i] if z[i] > 0 else theta[i]
        t_max_j = theta[j] if z[j] > 0 else C - theta[j]
        t = min(t, t_max_i, t_max_j)
        theta[i] += z[i] * t
        theta[j] -= z[j] * t
        theta[i] = min(max(theta[i], 0.0), C)
        theta[j] = min(max(theta[j], 0.0), C)
        col = K[:, ii] - K[:, jj]
        G[:n] += t * col
        G[n:] -= t * col
        passes += 1

    free = (theta > 0.0) & (theta < C)
    if np.any(free):
        b = float(np.mean((-z * G)[free]))
    else:
        b = 0.5 * (m + M)
    beta = theta[:n] - theta[n:]
    return beta, b, passes, converged


def knn_predict(train_X, train_y, query_X, k):
    """Mean of the k nearest training targets; distance ties favour the
    lower training row index (stable ordering)."""
    nq = query_X.shape[0]
    out = np.empty(nq, dtype=np.float64)
    for q in range(nq):
        d = np.sum((train_X - query_X[q]) ** 2, axis=1)
        order = np.argsort(d, kind="mergesort")
        out[q] = np.mean(train_y[order[:k]])
    return out
