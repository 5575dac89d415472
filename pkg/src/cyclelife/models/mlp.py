"""Fully connected feed-forward regressor trained by Adam on MSE.

Two rectified-linear hidden layers by default.  The loss/gradient pair
is exposed as a pure function so the analytic backward pass can be
checked against finite differences.
"""

from __future__ import annotations

import numpy as np

from cyclelife.models.base import register
from cyclelife.rng import derive_seed, uniform_stream

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def init_params(n_inputs, hidden, seed):
    """Weights uniform in +/- 1/sqrt(fan_in), biases zero."""
    sizes = [int(n_inputs)] + [int(h) for h in hidden] + [1]
    params = {}
    for i in range(len(sizes) - 1):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        scale = 1.0 / np.sqrt(fan_in)
        u = uniform_stream(derive_seed(seed, i), fan_in * fan_out)
        params[f"W{i}"] = ((2.0 * u - 1.0) * scale).reshape(fan_in, fan_out)
        params[f"b{i}"] = np.zeros(fan_out)
    return params


def _n_layers(params):
    return sum(1 for k in params if k.startswith("W"))


def forward(params, X):
    a = X
    L = _n_layers(params)
    for i in range(L - 1):
        a = np.maximum(a @ params[f"W{i}"] + params[f"b{i}"], 0.0)
    return (a @ params[f"W{L-1}"] + params[f"b{L-1}"])[:, 0]


def loss_and_grads(params, X, y):
    """Mean squared error and its gradient for every parameter."""
    L = _n_layers(params)
    acts = [X]
    a = X
    for i in range(L - 1):
        a = np.maximum(a @ params[f"W{i}"] + params[f"b{i}"], 0.0)
        acts.append(a)
    pred = (a @ params[f"W{L-1}"] + params[f"b{L-1}"])[:, 0]
    n = y.shape[0]
    diff = pred - y
    loss = float(diff @ diff / n)

    grads = {}
    delta = (2.0 * diff / n)[:, None]  # (n, 1)
    for i in range(L - 1, -1, -1):
        grads[f"W{i}"] = acts[i].T @ delta
        grads[f"b{i}"] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params[f"W{i}"].T) * (acts[i] > 0.0)
    return loss, grads


def _train_mlp(params, X, y, seed):
    hidden = tuple(int(h) for h in params["hidden"])
    lr = float(params["lr"])
    epochs = int(params["epochs"])
    net = init_params(X.shape[1], hidden, seed)
    m = {k: np.zeros_like(v) for k, v in net.items()}
    v = {k: np.zeros_like(v) for k, v in net.items()}
    loss = np.inf
    for t in range(1, epochs + 1):
        loss, grads = loss_and_grads(net, X, y)
        for k in net:
            g = grads[k]
            m[k] = ADAM_BETA1 * m[k] + (1.0 - ADAM_BETA1) * g
            v[k] = ADAM_BETA2 * v[k] + (1.0 - ADAM_BETA2) * g * g
            mhat = m[k] / (1.0 - ADAM_BETA1**t)
            vhat = v[k] / (1.0 - ADAM_BETA2**t)
            net[k] = net[k] - lr * mhat / (np.sqrt(vhat) + ADAM_EPS)
    payload = {"hidden": np.array(hidden, dtype=np.int64)}
    payload.update(net)
    return payload, {"iterations": epochs, "converged": True, "final_loss": loss}


def _predict_mlp(payload, X):
    net = {k: v for k, v in payload.items() if k[0] in ("W", "b")}
    return forward(net, X)


register("MLP")(_train_mlp, _predict_mlp)
