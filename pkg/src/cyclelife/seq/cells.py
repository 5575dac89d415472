"""Recurrent cells (vanilla RNN, LSTM, GRU) with optional softmax
attention, as explicit forward / backward passes over full sequences.

Everything is float64 and batch-first: inputs are (B, T, C).  The
backward pass propagates d(1/2 * squared error)/d(parameter) through
all T steps with no truncation; correctness is pinned by
finite-difference tests rather than by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cyclelife.errors import ShapeMismatch, SpecError
from cyclelife.rng import derive_seed, uniform_stream

CELL_KINDS = ("RNN", "LSTM", "GRU")

_CELL_PARAM_NAMES = {
    "RNN": ("Wx", "Wh", "bh"),
    "LSTM": ("Wi", "Ui", "bi", "Wf", "Uf", "bf", "Wg", "Ug", "bg", "Wo", "Uo", "bo"),
    "GRU": ("Wz", "Uz", "bz", "Wr", "Ur", "br", "Wn", "Un", "bn"),
}


@dataclass(frozen=True)
class SequenceModelSpec:
    cell_kind: str
    hidden_size: int
    attention: bool
    input_channels: int
    seed: int = 0

    def __post_init__(self):
        if self.cell_kind not in CELL_KINDS:
            raise SpecError(f"unknown cell kind {self.cell_kind!r}")
        if self.hidden_size < 1:
            raise SpecError("hidden_size must be >= 1")
        if self.input_channels < 1:
            raise SpecError("input_channels must be >= 1")


def param_names(spec: SequenceModelSpec):
    names = list(_CELL_PARAM_NAMES[spec.cell_kind])
    if spec.attention:
        names += ["att_v", "att_b"]
    names += ["Wy", "by"]
    return names


def _shape_for(name, C, H):
    if name in ("Wx", "Wi", "Wf", "Wg", "Wo", "Wz", "Wr", "Wn"):
        return (C, H)
    if name in ("Wh", "Ui", "Uf", "Ug", "Uo", "Uz", "Ur", "Un"):
        return (H, H)
    if name in ("bh", "bi", "bf", "bg", "bo", "bz", "br", "bn"):
        return (H,)
    if name in ("att_v", "Wy"):
        return (H,)
    if name in ("att_b", "by"):
        return (1,)
    raise SpecError(f"unknown parameter {name}")


def init_params(spec: SequenceModelSpec) -> dict:
    """Uniform +/- 1/sqrt(fan_in) weights; zero biases except the LSTM
    forget-gate bias, which starts at 1.0 to keep early memory open."""
    C, H = spec.input_channels, spec.hidden_size
    params = {}
    for idx, name in enumerate(param_names(spec)):
        shape = _shape_for(name, C, H)
        if name.startswith("b") or name == "att_b":
            fill = 1.0 if name == "bf" else 0.0
            params[name] = np.full(shape, fill)
            continue
        fan_in = shape[0]
        scale = 1.0 / np.sqrt(fan_in)
        u = uniform_stream(derive_seed(spec.seed, idx), int(np.prod(shape)))
        params[name] = ((2.0 * u - 1.0) * scale).reshape(shape)
    return params


def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _check_batch(spec, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2:
        X = X[None]
    if X.ndim != 3 or X.shape[2] != spec.input_channels:
        raise ShapeMismatch(
            f"expected (batch, steps, {spec.input_channels}) series, got {X.shape}"
        )
    return X


def forward_batch(spec: SequenceModelSpec, params: dict, X):
    """Run the cell over every step; returns (pred, cache, attention).

    cache holds everything backward_batch needs; attention is (B, T)
    softmax weights or None.
    """
    X = _check_batch(spec, X)
    B, T, _ = X.shape
    H = spec.hidden_size
    hs = np.zeros((T + 1, B, H))
    cache = {"X": X, "hs": hs}
    kind = spec.cell_kind

    if kind == "RNN":
        for t in range(T):
            hs[t + 1] = np.tanh(X[:, t] @ params["Wx"] + hs[t] @ params["Wh"] + params["bh"])
    elif kind == "LSTM":
        cs = np.zeros((T + 1, B, H))
        gates = {k: np.empty((T, B, H)) for k in ("i", "f", "g", "o")}
        for t in range(T):
            x, h = X[:, t], hs[t]
            i = _sigmoid(x @ params["Wi"] + h @ params["Ui"] + params["bi"])
            f = _sigmoid(x @ params["Wf"] + h @ params["Uf"] + params["bf"])
            g = np.tanh(x @ params["Wg"] + h @ params["Ug"] + params["bg"])
            o = _sigmoid(x @ params["Wo"] + h @ params["Uo"] + params["bo"])
            cs[t + 1] = f * cs[t] + i * g
            hs[t + 1] = o * np.tanh(cs[t + 1])
            gates["i"][t], gates["f"][t], gates["g"][t], gates["o"][t] = i, f, g, o
        cache["cs"] = cs
        cache["gates"] = gates
    else:  # GRU
        gates = {k: np.empty((T, B, H)) for k in ("z", "r", "n", "hr")}
        for t in range(T):
            x, h = X[:, t], hs[t]
            z = _sigmoid(x @ params["Wz"] + h @ params["Uz"] + params["bz"])
            r = _sigmoid(x @ params["Wr"] + h @ params["Ur"] + params["br"])
            hr = r * h
            n = np.tanh(x @ params["Wn"] + hr @ params["Un"] + params["bn"])
            hs[t + 1] = (1.0 - z) * n + z * h
            gates["z"][t], gates["r"][t], gates["n"][t], gates["hr"][t] = z, r, n, hr
        cache["gates"] = gates

    if spec.attention:
        # h_t -> scalar score via the linear scoring layer, softmax over
        # steps, context = weighted sum of hidden states.
        scores = np.einsum("tbh,h->bt", hs[1:], params["att_v"]) + params["att_b"][0]
        scores -= scores.max(axis=1, keepdims=True)
        e = np.exp(scores)
        att = e / e.sum(axis=1, keepdims=True)  # (B, T)
        context = np.einsum("bt,tbh->bh", att, hs[1:])
        cache["att"] = att
        cache["context"] = context
        pred = context @ params["Wy"] + params["by"][0]
    else:
        att = None
        pred = hs[T] @ params["Wy"] + params["by"][0]
    cache["pred"] = pred
    return pred, cache, att


def backward_batch(spec: SequenceModelSpec, params: dict, cache, y):
    """Gradients of sum_b 1/2 * (pred_b - y_b)^2 for every parameter."""
    X, hs = cache["X"], cache["hs"]
    B, T, _ = X.shape
    H = spec.hidden_size
    grads = {k: np.zeros_like(v) for k, v in params.items()}
    dpred = cache["pred"] - np.asarray(y, dtype=np.float64)  # (B,)

    dh_steps = np.zeros((T, B, H))  # per-step external dL/dh_t
    if spec.attention:
        att, context = cache["att"], cache["context"]
        grads["Wy"] += context.T @ dpred
        grads["by"][0] += dpred.sum()
        dcontext = dpred[:, None] * params["Wy"]  # (B, H)
        datt = np.einsum("bh,tbh->bt", dcontext, hs[1:])  # (B, T)
        ds = att * (datt - (datt * att).sum(axis=1, keepdims=True))
        grads["att_v"] += np.einsum("bt,tbh->h", ds, hs[1:])
        grads["att_b"][0] += ds.sum()
        dh_steps += att.T[:, :, None] * dcontext[None] + ds.T[:, :, None] * params["att_v"]
    else:
        grads["Wy"] += hs[T].T @ dpred
        grads["by"][0] += dpred.sum()
        dh_steps[T - 1] += dpred[:, None] * params["Wy"]

    kind = spec.cell_kind
    dh = np.zeros((B, H))
    if kind == "RNN":
        for t in range(T - 1, -1, -1):
            dh = dh + dh_steps[t]
            dpre = dh * (1.0 - hs[t + 1] ** 2)
            grads["Wx"] += X[:, t].T @ dpre
            grads["Wh"] += hs[t].T @ dpre
            grads["bh"] += dpre.sum(axis=0)
            dh = dpre @ params["Wh"].T
    elif kind == "LSTM":
        cs, gates = cache["cs"], cache["gates"]
        dc = np.zeros((B, H))
        for t in range(T - 1, -1, -1):
            i, f, g, o = (gates[k][t] for k in ("i", "f", "g", "o"))
            dh = dh + dh_steps[t]
            tc = np.tanh(cs[t + 1])
            do = dh * tc
            dc = dc + dh * o * (1.0 - tc**2)
            di, df, dg = dc * g, dc * cs[t], dc * i
            dpre = {
                "i": di * i * (1.0 - i),
                "f": df * f * (1.0 - f),
                "g": dg * (1.0 - g**2),
                "o": do * o * (1.0 - o),
            }
            x, h = X[:, t], hs[t]
            dh = np.zeros_like(dh)
            for k, (W, U, b) in {
                "i": ("Wi", "Ui", "bi"),
                "f": ("Wf", "Uf", "bf"),
                "g": ("Wg", "Ug", "bg"),
                "o": ("Wo", "Uo", "bo"),
            }.items():
                grads[W] += x.T @ dpre[k]
                grads[U] += h.T @ dpre[k]
                grads[b] += dpre[k].sum(axis=0)
                dh += dpre[k] @ params[U].T
            dc = dc * f
    else:  # GRU
        gates = cache["gates"]
        for t in range(T - 1, -1, -1):
            z, r, n, hr = (gates[k][t] for k in ("z", "r", "n", "hr"))
            dh = dh + dh_steps[t]
            h_prev = hs[t]
            dn = dh * (1.0 - z)
            dz = dh * (h_prev - n)
            dh_prev = dh * z
            dpre_n = dn * (1.0 - n**2)
            grads["Wn"] += X[:, t].T @ dpre_n
            grads["Un"] += hr.T @ dpre_n
            grads["bn"] += dpre_n.sum(axis=0)
            dhr = dpre_n @ params["Un"].T
            dr = dhr * h_prev
            dh_prev = dh_prev + dhr * r
            dpre_z = dz * z * (1.0 - z)
            dpre_r = dr * r * (1.0 - r)
            grads["Wz"] += X[:, t].T @ dpre_z
            grads["Uz"] += h_prev.T @ dpre_z
            grads["bz"] += dpre_z.sum(axis=0)
            grads["Wr"] += X[:, t].T @ dpre_r
            grads["Ur"] += h_prev.T @ dpre_r
            grads["br"] += dpre_r.sum(axis=0)
            dh = dh_prev + dpre_z @ params["Uz"].T + dpre_r @ params["Ur"].T
    return grads


def forward(spec: SequenceModelSpec, params: dict, sample):
    """Single-sample prediction; returns (prediction, attention | None)."""
    series = np.asarray(sample.series if hasattr(sample, "series") else sample)
    pred, _, att = forward_batch(spec, params, series[None])
    return float(pred[0]), (att[0] if att is not None else None)


def backward(spec: SequenceModelSpec, params: dict, sample, target=None):
    """Per-sample gradients of 1/2 * (prediction - target)^2."""
    series = np.asarray(sample.series if hasattr(sample, "series") else sample)
    y = sample.target if target is None else target
    _, cache, _ = forward_batch(spec, params, series[None])
    return backward_batch(spec, params, cache, np.array([y], dtype=np.float64))
