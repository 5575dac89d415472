"""Recurrent sequence models over first-100-cycle series."""

from cyclelife.seq.cells import (
    CELL_KINDS,
    SequenceModelSpec,
    backward,
    backward_batch,
    forward,
    forward_batch,
    init_params,
)
from cyclelife.seq.series import (
    DEFAULT_MULTIVARIATE,
    DEFAULT_UNIVARIATE,
    ChannelStats,
    SeriesSample,
    build_series,
)
from cyclelife.seq.train import TrainRun, history_csv, train_sequence

__all__ = [
    "CELL_KINDS",
    "ChannelStats",
    "DEFAULT_MULTIVARIATE",
    "DEFAULT_UNIVARIATE",
    "SequenceModelSpec",
    "SeriesSample",
    "TrainRun",
    "backward",
    "backward_batch",
    "forward",
    "forward_batch",
    "history_csv",
    "init_params",
    "train_sequence",
]
