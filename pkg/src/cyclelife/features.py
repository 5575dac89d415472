"""Early-cycle feature extraction.

Eleven scalar summaries of the first 100 cycles per cell, built from
the voltage-resolved capacity difference between cycles 100 and 10 and
from the per-cycle summary channels.  Feature groups select the subsets
used throughout the benchmark.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from cyclelife.data import CellRecord, Dataset
from cyclelife.errors import MissingCurve, SpecError

# Degeneracy floor: below this population variance the curve difference
# is numerically flat and the shape moments (skewness, kurtosis) are
# noise; they are reported as 0 and the vector is flagged.
VARIANCE_FLOOR = 1e-18

FEATURE_NAMES = (
    "dq_min",
    "dq_variance",
    "dq_skewness",
    "dq_kurtosis",
    "fade_slope",
    "fade_intercept",
    "qd_cycle_10",
    "qd_rise",
    "charge_time_mean",
    "ir_min",
    "ir_shift",
)

# 1-based feature indices per published grouping.
FEATURE_GROUPS = {
    "full": (1, 2, 5, 6, 7, 9, 10, 11),
    "discharge": (1, 2, 3, 4, 7, 8),
    "variance": (2,),
}


@dataclass(eq=False)
class FeatureVector:
    cell_id: str
    values: np.ndarray  # shape (11,)
    cycle_life: int
    degenerate_moments: bool


@dataclass(eq=False)
class FeatureMatrix:
    X: np.ndarray  # (n_cells, n_features)
    y: np.ndarray  # (n_cells,)
    feature_indices: tuple[int, ...]  # 1-based, into the 11-feature set
    cell_ids: list[str]


def delta_q(cell: CellRecord) -> np.ndarray:
    """Voltage-resolved capacity difference, cycle 100 minus cycle 10."""
    for c in (10, 100):
        if c not in cell.curves:
            raise MissingCurve(f"{cell.cell_id}: no discharge curve for cycle {c}")
    return cell.curves[100].q_at_v - cell.curves[10].q_at_v


def _ols_line(x: np.ndarray, y: np.ndarray):
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    slope = float(dx @ (y - ym) / (dx @ dx))
    return slope, float(ym - slope * xm)


def extract_features(cell: CellRecord) -> FeatureVector:
    dq = delta_q(cell)
    n = dq.shape[0]
    mean = dq.mean()
    centered = dq - mean
    m2 = float((centered**2).mean())
    f1 = float(dq.min())
    f2 = m2
    if m2 < VARIANCE_FLOOR:
        degenerate = True
        f3 = 0.0
        f4 = 0.0
    else:
        degenerate = False
        m3 = float((centered**3).mean())
        m4 = float((centered**4).mean())
        f3 = m3 / m2**1.5
        f4 = m4 / m2**2 - 3.0

    qd = cell.channel("discharge_capacity", 2, 100)
    cycles = np.arange(2, 101, dtype=np.float64)
    f5, f6 = _ols_line(cycles, qd)
    f7 = float(cell.channel("discharge_capacity", 10, 10)[0])
    f8 = float(qd.max() - qd[0])
    f9 = float(cell.channel("charge_time", 2, 6).mean())
    ir = cell.channel("internal_resistance", 2, 100)
    f10 = float(ir.min())
    f11 = float(
        cell.channel("internal_resistance", 100, 100)[0]
        - cell.channel("internal_resistance", 10, 10)[0]
    )

    values = np.array([f1, f2, f3, f4, f5, f6, f7, f8, f9, f10, f11])
    return FeatureVector(cell.cell_id, values, cell.cycle_life, degenerate)


def assemble_matrix(ds: Dataset, group: str, log_variance: bool = False) -> FeatureMatrix:
    """Feature matrix + cycle-life targets for one feature group.

    With log_variance the variance column enters as log10, which
    linearizes its many-decade spread; off by default.
    """
    if group not in FEATURE_GROUPS:
        raise SpecError(f"unknown feature group {group!r}")
    indices = FEATURE_GROUPS[group]
    rows = []
    y = []
    ids = []
    for cell in ds.cells:
        fv = extract_features(cell)
        vals = fv.values[[i - 1 for i in indices]].copy()
        if log_variance and 2 in indices:
            pos = indices.index(2)
            vals[pos] = np.log10(max(vals[pos], VARIANCE_FLOOR))
        rows.append(vals)
        y.append(fv.cycle_life)
        ids.append(fv.cell_id)
    return FeatureMatrix(
        X=np.array(rows, dtype=np.float64),
        y=np.array(y, dtype=np.float64),
        feature_indices=indices,
        cell_ids=ids,
    )


class Standardizer:
    """Column-wise zero-mean unit-variance scaling (population std).

    Constant columns transform to exactly 0 and invert back to their
    mean, so pipelines never divide by zero.
    """

    def __init__(self):
        self.mean_ = None
        self.std_ = None
        self._scale = None

    def fit(self, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        self.mean_ = X.mean(axis=0)
        self.std_ = X.std(axis=0)
        self._scale = np.where(self.std_ == 0.0, 1.0, self.std_)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        if self.mean_ is None:
            raise SpecError("standardizer used before fit")
        return (np.asarray(X, dtype=np.float64) - self.mean_) / self._scale

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        return self.fit(X).transform(X)

    def inverse_transform(self, Z: np.ndarray) -> np.ndarray:
        if self.mean_ is None:
            raise SpecError("standardizer used before fit")
        return np.asarray(Z, dtype=np.float64) * self._scale + self.mean_
