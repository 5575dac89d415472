"""The 14 tabular regressors behind one train/predict contract."""

from cyclelife.models.base import (
    DEFAULT_HYPERPARAMS,
    DISPLAY_NAMES,
    MODEL_KINDS,
    RegressorSpec,
    TrainedRegressor,
    predict,
    train,
)

# Importing the implementation modules populates the registry.
from cyclelife.models import ensemble, linear, mlp, neighbors, svr, tree  # noqa: F401
from cyclelife.models.linear import soft_threshold
from cyclelife.models.serialize import from_text, load_model, save_model, to_text
from cyclelife.models.tree import best_split

__all__ = [
    "DEFAULT_HYPERPARAMS",
    "DISPLAY_NAMES",
    "MODEL_KINDS",
    "RegressorSpec",
    "TrainedRegressor",
    "best_split",
    "from_text",
    "load_model",
    "predict",
    "save_model",
    "soft_threshold",
    "to_text",
    "train",
]
