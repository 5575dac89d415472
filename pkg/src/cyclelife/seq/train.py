"""Adam training loop over whole-sequence samples.

Batch gradients are the mean of per-sample half-squared-error
gradients; the per-epoch history records MSE and MAPE on the training
set (and a held-out set when given).  Everything downstream of the
seed — initialization, batch order, updates — is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cyclelife.errors import NumericalDivergence, SpecError
from cyclelife.rng import SplitMix64, derive_seed
from cyclelife.seq.cells import (
    SequenceModelSpec,
    backward_batch,
    forward_batch,
    init_params,
)

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class TrainRun:
    epochs: int = 100
    batch_size: int = 16
    learning_rate: float = 1e-3
    clip_norm: float = 0.0  # 0 disables clipping
    normalized_targets: bool = False
    history: list = field(default_factory=list)  # rows of dicts, one per epoch

    def __post_init__(self):
        if self.epochs < 1:
            raise SpecError("epochs must be >= 1")
        if self.batch_size < 1:
            raise SpecError("batch_size must be >= 1")


def _stack(samples):
    X = np.stack([s.series for s in samples])
    y = np.array([s.target for s in samples], dtype=np.float64)
    return X, y


def _epoch_metrics(spec, params, X, y, y_mean, y_scale):
    pred, _, _ = forward_batch(spec, params, X)
    # A diverging run overflows here; the caller checks for non-finite
    # loss, so the intermediate warning is noise.
    with np.errstate(over="ignore", invalid="ignore"):
        pred = pred * y_scale + y_mean
        err = pred - y
        mse = float(err @ err / y.shape[0])
        mape = float(100.0 * np.mean(np.abs(err) / np.abs(y)))
    return mse, mape


def train_sequence(spec: SequenceModelSpec, samples, run: TrainRun, val_samples=None):
    """Train on the given samples; returns (params, run) with the
    history filled in.  Raises NumericalDivergence (carrying the
    partial history and last finite parameters) if loss leaves the
    finite range."""
    if not samples:
        raise SpecError("need at least one training sample")
    X, y = _stack(samples)
    if run.normalized_targets:
        y_mean = float(y.mean())
        y_scale = float(y.std()) or 1.0
    else:
        y_mean, y_scale = 0.0, 1.0
    y_fit = (y - y_mean) / y_scale
    Xv = yv = None
    if val_samples:
        Xv, yv = _stack(val_samples)

    params = init_params(spec)
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v = {k: np.zeros_like(v) for k, v in params.items()}
    step = 0
    n = len(samples)
    run.history = []
    for epoch in range(1, run.epochs + 1):
        order = SplitMix64(derive_seed(spec.seed, epoch)).permutation(n)
        for lo in range(0, n, run.batch_size):
            batch = order[lo : lo + run.batch_size]
            _, cache, _ = forward_batch(spec, params, X[batch])
            grads = backward_batch(spec, params, cache, y_fit[batch])
            if run.clip_norm > 0.0:
                total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
                if total > run.clip_norm:
                    scale = run.clip_norm / total
                    grads = {k: g * scale for k, g in grads.items()}
            step += 1
            for k in params:
                g = grads[k] / batch.shape[0]
                m[k] = ADAM_BETA1 * m[k] + (1.0 - ADAM_BETA1) * g
                v[k] = ADAM_BETA2 * v[k] + (1.0 - ADAM_BETA2) * g * g
                mhat = m[k] / (1.0 - ADAM_BETA1**step)
                vhat = v[k] / (1.0 - ADAM_BETA2**step)
                params[k] = params[k] - run.learning_rate * mhat / (np.sqrt(vhat) + ADAM_EPS)

        mse, mape = _epoch_metrics(spec, params, X, y, y_mean, y_scale)
        row = {"epoch": epoch, "mse": mse, "mape": mape}
        if Xv is not None:
            row["val_mse"], row["val_mape"] = _epoch_metrics(
                spec, params, Xv, yv, y_mean, y_scale
            )
        run.history.append(row)
        if not np.isfinite(mse):
            raise NumericalDivergence(
                f"training loss became non-finite at epoch {epoch}",
                history=run.history,
                params=params,
            )
    return params, run


def history_csv(history) -> str:
    """History rows as `epoch,mse,mape[,val_mse,val_mape]` CSV text."""
    if not history:
        return "epoch,mse,mape\n"
    has_val = "val_mse" in history[0]
    cols = ["epoch", "mse", "mape"] + (["val_mse", "val_mape"] if has_val else [])
    lines = [",".join(cols)]
    for row in history:
        lines.append(",".join(repr(row[c]) if c != "epoch" else str(row[c]) for c in cols))
    return "\n".join(lines) + "\n"
