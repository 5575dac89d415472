"""Numba-jitted twins of the kernels in numpy_impl.

Same contracts and tie-break rules; loops replace vectorised numpy so
the jit can fuse them.  Dot products are explicit accumulations, which
keeps the kernels free of BLAS threading effects.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NO_SPLIT = (0.0, -1.0, False)


@njit(cache=True, nogil=True)
def best_split(x, y):
    n = x.shape[0]
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ys = y[order]
    cs = np.cumsum(ys)
    cq = np.cumsum(ys * ys)
    total = cs[n - 1]
    total_sq = cq[n - 1]
    parent = total_sq - total * total / n

    best_gain = -np.inf
    best_thr = 0.0
    found = False
    for k in range(1, n):
        if xs[k] <= xs[k - 1]:
            continue
        sl = cs[k - 1]
        ql = cq[k - 1]
        sse_l = ql - sl * sl / k
        sr = total - sl
        qr = total_sq - ql
        sse_r = qr - sr * sr / (n - k)
        gain = parent - sse_l - sse_r
        if gain > best_gain:
            best_gain = gain
            best_thr = 0.5 * (xs[k - 1] + xs[k])
            found = True
    if not found:
        return 0.0, -1.0, False
    return best_thr, best_gain, True


@njit(cache=True, nogil=True)
def xgb_best_split(x, g, h, lam):
    n = x.shape[0]
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    cg = np.cumsum(g[order])
    ch = np.cumsum(h[order])
    G = cg[n - 1]
    H = ch[n - 1]

    base = G * G / (H + lam)
    best_gain = -np.inf
    best_thr = 0.0
    found = False
    for k in range(1, n):
        if xs[k] <= xs[k - 1]:
            continue
        gl = cg[k - 1]
        hl = ch[k - 1]
        score = gl * gl / (hl + lam) + (G - gl) ** 2 / (H - hl + lam)
        gain = 0.5 * (score - base)
        if gain > best_gain:
            best_gain = gain
            best_thr = 0.5 * (xs[k - 1] + xs[k])
            found = True
    if not found:
        return 0.0, -1.0, False
    return best_thr, best_gain, True


@njit(cache=True, nogil=True)
def tree_predict(feature, threshold, left, right, value, X):
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


@njit(cache=True, nogil=True)
def cd_sweeps(XT, yc, w, l1, l2, col_sq, tol, max_sweeps):
    p, n = XT.shape
    r = yc.copy()
    for j in range(p):
        if w[j] != 0.0:
            for i in range(n):
                r[i] -= XT[j, i] * w[j]
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        max_delta = 0.0
        for j in range(p):
            wj = w[j]
            dot = 0.0
            for i in range(n):
                dot += XT[j, i] * r[i]
            rho = dot / n + col_sq[j] * wj
            mag = abs(rho) - l1
            if mag < 0.0:
                mag = 0.0
            wj_new = np.sign(rho) * mag / (col_sq[j] + l2)
            if wj_new != wj:
                diff = wj_new - wj
                for i in range(n):
                    r[i] -= XT[j, i] * diff
                w[j] = wj_new
            delta = abs(wj_new - wj)
            if delta > max_delta:
                max_delta = delta
        if max_delta < tol:
            return sweeps, True
    return sweeps, False


@njit(cache=True, nogil=True)
def sgd_epochs(X, y, w, b, lr, perms):
    p = X.shape[1]
    for e in range(perms.shape[0]):
        for t in range(perms.shape[1]):
            i = perms[e, t]
            pred = b
            for j in range(p):
                pred += X[i, j] * w[j]
            err = pred - y[i]
            for j in range(p):
                w[j] -= lr * err * X[i, j]
            b -= lr * err
    return b


@njit(cache=True, nogil=True)
def smo_svr(K, y, C, eps, tol, max_passes):
    n = K.shape[0]
    theta = np.zeros(2 * n)
    G = np.empty(2 * n)
    for i in range(n):
        G[i] = eps - y[i]
        G[n + i] = eps + y[i]

    passes = 0
    converged = False
    m = 0.0
    M = 0.0
    while passes < max_passes:
        m = -np.inf
        M = np.inf
        i = -1
        j = -1
        for t in range(2 * n):
            zt = 1.0 if t < n else -1.0
            s = -zt * G[t]
            in_up = theta[t] < C if zt > 0 else theta[t] > 0
            in_low = theta[t] > 0 if zt > 0 else theta[t] < C
            if in_up and s > m:
                m = s
                i = t
            if in_low and s < M:
                M = s
                j = t
        if m - M <= tol:
            converged = True
            break
        zi = 1.0 if i < n else -1.0
        zj = 1.0 if j < n else -1.0
        ii = i % n
        jj = j % n
        a = K[ii, ii] + K[jj, jj] - 2.0 * K[ii, jj]
        if a <= 1e-12:
            a = 1e-12
        t_step = (m - M) / a
        t_max_i = C - theta[i] if zi > 0 else theta[i]
        t_max_j = theta[j] if zj > 0 else C - theta[j]
        if t_max_i < t_step:
            t_step = t_max_i
        if t_max_j < t_step:
            t_step = t_max_j
        theta[i] += zi * t_step
        theta[j] -= zj * t_step
        theta[i] = min(max(theta[i], 0.0), C)
        theta[j] = min(max(theta[j], 0.0), C)
        for s_ in range(n):
            col = K[s_, ii] - K[s_, jj]
            G[s_] += t_step * col
            G[n + s_] -= t_step * col
        passes += 1

    b_sum = 0.0
    b_count = 0
    for t in range(2 * n):
        if theta[t] > 0.0 and theta[t] < C:
            zt = 1.0 if t < n else -1.0
            b_sum += -zt * G[t]
            b_count += 1
    if b_count > 0:
        b = b_sum / b_count
    else:
        b = 0.5 * (m + M)
    beta = np.empty(n)
    for t in range(n):
        beta[t] = theta[t] - theta[n + t]
    return beta, b, passes, converged


@njit(cache=True, nogil=True)
def knn_predict(train_X, train_y, query_X, k):
    nt = train_X.shape[0]
    nq = query_X.shape[0]
    p = train_X.shape[1]
    out = np.empty(nq, dtype=np.float64)
    d = np.empty(nt, dtype=np.float64)
    for q in range(nq):
        for i in range(nt):
            acc = 0.0
            for j in range(p):
                diff = train_X[i, j] - query_X[q, j]
                acc += diff * diff
            d[i] = acc
        order = np.argsort(d, kind="mergesort")
        s = 0.0
        for t in range(k):
            s += train_y[order[t]]
        out[q] = s / k
    return out
