"""Battery cycle-life prediction toolkit.

Early-cycle feature extraction, from-scratch classical regressors,
recurrent sequence models with manual backpropagation through time,
and a benchmark harness producing model-by-feature-group error tables.
"""

from cyclelife.data import (
    CellRecord,
    CycleSummary,
    Dataset,
    DischargeCurve,
    SplitPolicy,
    VoltageGrid,
    compute_cycle_life,
    generate_synthetic,
    load_dataset,
    save_dataset,
    split_dataset,
)
from cyclelife.features import (
    FEATURE_GROUPS,
    FeatureMatrix,
    FeatureVector,
    Standardizer,
    assemble_matrix,
    delta_q,
    extract_features,
)
from cyclelife.models import RegressorSpec, TrainedRegressor, predict, train

__version__ = "0.1.0"

__all__ = [
    "CellRecord",
    "CycleSummary",
    "Dataset",
    "DischargeCurve",
    "SplitPolicy",
    "VoltageGrid",
    "compute_cycle_life",
    "generate_synthetic",
    "load_dataset",
    "save_dataset",
    "split_dataset",
    "FEATURE_GROUPS",
    "FeatureMatrix",
    "FeatureVector",
    "Standardizer",
    "assemble_matrix",
    "delta_q",
    "extract_features",
    "RegressorSpec",
    "TrainedRegressor",
    "predict",
    "train",
]
