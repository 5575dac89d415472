"""Uniform train/predict contract over the 14 tabular regressors.

Each concrete model registers a trainer (params, X, y, seed) ->
(payload, diagnostics) and a predictor (payload, X) -> predictions.
Standardization, hyperparameter validation, and shape checks live
here so the individual implementations stay purely numerical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cyclelife.errors import DimensionMismatch, ShapeMismatch, SpecError
from cyclelife.features import Standardizer

MODEL_KINDS = (
    "Linear",
    "Ridge",
    "Lasso",
    "ElasticNet",
    "SGD",
    "DecisionTree",
    "RandomForest",
    "GradientBoost",
    "AdaBoost",
    "XGBoostStyle",
    "KNN",
    "SVR",
    "RANSAC",
    "MLP",
)

DISPLAY_NAMES = {
    "Linear": "Linear Regression",
    "Ridge": "Ridge Regression",
    "Lasso": "Lasso Regression",
    "ElasticNet": "Elastic Net",
    "SGD": "SGD Regressor",
    "DecisionTree": "Decision Tree",
    "RandomForest": "Random Forest",
    "GradientBoost": "Gradient Boosting",
    "AdaBoost": "AdaBoost",
    "XGBoostStyle": "XGBoost",
    "KNN": "K-Nearest Neighbors",
    "SVR": "Support Vector Regression",
    "RANSAC": "RANSAC",
    "MLP": "Neural Network (MLP)",
}

DEFAULT_HYPERPARAMS = {
    "Linear": {},
    "Ridge": {"lam": 1.0},
    "Lasso": {"lam": 0.01, "tol": 1e-6, "max_sweeps": 10000},
    "ElasticNet": {"lam": 0.01, "mix": 0.5, "tol": 1e-6, "max_sweeps": 10000},
    "SGD": {"lr": 1e-3, "epochs": 1000},
    "DecisionTree": {"max_depth": 0},  # 0 = unlimited
    "RandomForest": {"n_trees": 100, "max_depth": 0},
    "GradientBoost": {"n_rounds": 100, "lr": 0.1, "max_depth": 3},
    "AdaBoost": {"n_rounds": 50, "max_depth": 3},
    "XGBoostStyle": {
        "n_rounds": 100,
        "lr": 0.3,
        "lam": 1.0,
        "gamma": 0.0,
        "max_depth": 6,
    },
    "KNN": {"k": 5},
    "SVR": {"c": 100.0, "eps": 0.1, "gamma": 0.0, "tol": 1e-3, "max_passes": 10000},
    "RANSAC": {"n_iters": 100, "min_samples": 0},  # 0 = columns + 1
    "MLP": {"hidden": (64, 32), "lr": 1e-3, "epochs": 500},
}

# Inputs these models are defined on; turning scaling off would change
# what the algorithm means, so an explicit False is rejected.
STANDARDIZE_REQUIRED = frozenset({"Lasso", "ElasticNet", "SGD", "KNN", "MLP"})
STANDARDIZE_DEFAULT_ON = STANDARDIZE_REQUIRED | {"SVR"}

TRAINERS: dict = {}
PREDICTORS: dict = {}


def register(kind):
    def wrap(trainer, predictor):
        TRAINERS[kind] = trainer
        PREDICTORS[kind] = predictor

    return wrap


@dataclass(frozen=True)
class RegressorSpec:
    kind: str
    hyperparams: dict = field(default_factory=dict)
    seed: int = 0
    standardize_inputs: bool | None = None  # None = kind default

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise SpecError(f"unknown model kind {self.kind!r}")
        defaults = DEFAULT_HYPERPARAMS[self.kind]
        unknown = set(self.hyperparams) - set(defaults)
        if unknown:
            raise SpecError(
                f"{self.kind}: unknown hyperparameters {sorted(unknown)}"
            )
        if self.standardize_inputs is False and self.kind in STANDARDIZE_REQUIRED:
            raise SpecError(f"{self.kind} requires standardized inputs")

    def resolved_params(self) -> dict:
        p = dict(DEFAULT_HYPERPARAMS[self.kind])
        p.update(self.hyperparams)
        return p

    def wants_standardize(self) -> bool:
        if self.standardize_inputs is None:
            return self.kind in STANDARDIZE_DEFAULT_ON
        return self.standardize_inputs


@dataclass(eq=False)
class TrainedRegressor:
    kind: str
    params: dict
    seed: int
    n_features: int
    scaler_mean: np.ndarray | None
    scaler_scale: np.ndarray | None
    payload: dict
    diagnostics: dict


def _check_training_inputs(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1:
        raise ShapeMismatch("expected 2-D features and 1-D targets")
    if X.shape[0] != y.shape[0]:
        raise ShapeMismatch(
            f"{X.shape[0]} feature rows vs {y.shape[0]} targets"
        )
    if X.shape[0] < 2:
        raise SpecError("training needs at least 2 rows")
    if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
        raise SpecError("non-finite values in training data")
    return X, y


def train(spec: RegressorSpec, X, y) -> TrainedRegressor:
    X, y = _check_training_inputs(X, y)
    params = spec.resolved_params()
    scaler_mean = scaler_scale = None
    if spec.wants_standardize():
        sc = Standardizer().fit(X)
        scaler_mean = sc.mean_
        scaler_scale = sc._scale
        X = sc.transform(X)
    payload, diagnostics = TRAINERS[spec.kind](params, X, y, spec.seed)
    return TrainedRegressor(
        kind=spec.kind,
        params=params,
        seed=spec.seed,
        n_features=X.shape[1],
        scaler_mean=scaler_mean,
        scaler_scale=scaler_scale,
        payload=payload,
        diagnostics=diagnostics,
    )


def predict(model: TrainedRegressor, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(
            f"model expects {model.n_features} features, got shape {X.shape}"
        )
    if model.scaler_mean is not None:
        X = (X - model.scaler_mean) / model.scaler_scale
    return PREDICTORS[model.kind](model.payload, X)
