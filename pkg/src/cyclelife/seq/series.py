"""Time-series views of the first-100-cycle summaries.

Each cell becomes a T x C matrix (T = 100 steps, C channels) with
per-channel z-scoring whose statistics come from the training subset
only; pass those statistics back in to transform held-out cells.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cyclelife.data import SUMMARY_CHANNELS, Dataset
from cyclelife.errors import MissingChannel

SERIES_LENGTH = 100

DEFAULT_UNIVARIATE = ("discharge_capacity",)
DEFAULT_MULTIVARIATE = (
    "discharge_capacity",
    "charge_capacity",
    "avg_temperature",
    "internal_resistance",
)


@dataclass(eq=False)
class SeriesSample:
    cell_id: str
    series: np.ndarray  # (T, C)
    target: float


@dataclass(eq=False)
class ChannelStats:
    channels: tuple[str, ...]
    mean: np.ndarray  # (C,)
    std: np.ndarray  # (C,), zeros replaced by 1 for scaling


def build_series(ds: Dataset, channels, stats: ChannelStats | None = None):
    """Samples for every cell in ds, z-scored per channel.

    With stats=None the statistics are fitted on ds itself (the
    training subset); pass the returned stats to transform other
    datasets consistently.  Returns (samples, stats).
    """
    channels = tuple(channels)
    if not channels:
        raise MissingChannel("need at least one channel")
    for name in channels:
        if name not in SUMMARY_CHANNELS:
            raise MissingChannel(f"unknown channel {name!r}")
    raw = []
    for cell in ds.cells:
        mat = np.stack(
            [cell.channel(name, 1, SERIES_LENGTH) for name in channels], axis=1
        )
        raw.append(mat)
    if stats is None:
        stacked = np.concatenate(raw, axis=0)
        mean = stacked.mean(axis=0)
        std = stacked.std(axis=0)
        stats = ChannelStats(channels, mean, np.where(std == 0.0, 1.0, std))
    elif stats.channels != channels:
        raise MissingChannel(
            f"statistics were fitted for channels {stats.channels}, got {channels}"
        )
    samples = [
        SeriesSample(cell.cell_id, (mat - stats.mean) / stats.std, float(cell.cycle_life))
        for cell, mat in zip(ds.cells, raw)
    ]
    return samples, stats
