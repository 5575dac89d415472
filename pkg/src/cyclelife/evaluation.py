"""Metrics, repeated-run statistics, and the model x feature-group
benchmark grid with markdown / CSV / SVG rendering."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from cyclelife.data import Dataset, SplitPolicy, dataset_fingerprint, split_dataset
from cyclelife.errors import ConstantTargets, ShapeMismatch, SpecError, UnsupportedFormat, ZeroTarget
from cyclelife.features import FEATURE_GROUPS, assemble_matrix
from cyclelife.models import DISPLAY_NAMES, RegressorSpec, predict, train
from cyclelife.rng import derive_seed

METRIC_NAMES = ("mse", "mape", "r_squared")


def _paired(y, yhat):
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.ndim != 1 or y.shape != yhat.shape or y.shape[0] < 1:
        raise ShapeMismatch(f"need equal-length 1-D arrays, got {y.shape} and {yhat.shape}")
    return y, yhat


def mape(y, yhat) -> float:
    """100 * mean(|y - yhat| / |y|), in percent."""
    y, yhat = _paired(y, yhat)
    if np.any(y == 0.0):
        raise ZeroTarget("MAPE undefined when a target is zero")
    return float(100.0 * np.mean(np.abs(y - yhat) / np.abs(y)))


def mse(y, yhat) -> float:
    y, yhat = _paired(y, yhat)
    d = y - yhat
    return float(d @ d / y.shape[0])


def r_squared(y, yhat) -> float:
    """1 - SS_res/SS_tot; can be negative, 1 only for an exact fit."""
    y, yhat = _paired(y, yhat)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise ConstantTargets("R^2 undefined for constant targets")
    ss_res = float(np.sum((y - yhat) ** 2))
    return 1.0 - ss_res / ss_tot


@dataclass(frozen=True)
class MetricSet:
    mse: float
    mape: float
    r_squared: float

    @classmethod
    def compute(cls, y, yhat):
        return cls(mse(y, yhat), mape(y, yhat), r_squared(y, yhat))


@dataclass(eq=False)
class RunStats:
    """Mean (and sample std when repeats >= 2) per metric over repeats."""

    repeats: int
    mean: dict
    std: dict | None
    values: dict

    @classmethod
    def from_metric_sets(cls, sets):
        if not sets:
            raise SpecError("no metric sets to aggregate")
        values = {m: [getattr(s, m) for s in sets] for m in METRIC_NAMES}
        mean = {m: float(np.mean(v)) for m, v in values.items()}
        std = None
        if len(sets) >= 2:
            std = {m: float(np.std(v, ddof=1)) for m, v in values.items()}
        return cls(repeats=len(sets), mean=mean, std=std, values=values)


@dataclass(eq=False)
class BenchmarkReport:
    grid: dict  # (kind, group) -> RunStats, for cells that succeeded
    failures: dict  # (kind, group) -> error text
    predictions: dict  # (kind, group) -> (actual, predicted) over all repeats
    kinds: list
    groups: list
    repeats: int
    policy: SplitPolicy
    fingerprint: str
    config_echo: dict = field(default_factory=dict)


def _run_cell(spec, group, r, splits_features):
    Xtr, ytr, Xte, yte = splits_features[(group, r)]
    run_spec = RegressorSpec(
        kind=spec.kind,
        hyperparams=spec.hyperparams,
        seed=derive_seed(spec.seed, r),
        standardize_inputs=spec.standardize_inputs,
    )
    model = train(run_spec, Xtr, ytr)
    yhat = predict(model, Xte)
    return MetricSet.compute(yte, yhat), yte, yhat


def run_benchmark(
    ds: Dataset,
    specs,
    groups,
    repeats: int = 5,
    policy: SplitPolicy | None = None,
    jobs: int = 1,
) -> BenchmarkReport:
    """Train/evaluate every (model, group) over `repeats` reseeded
    splits.  A failing cell is recorded with its error text; the rest
    of the grid still completes.  Output is identical for any `jobs`."""
    if repeats < 1:
        raise SpecError("repeats must be >= 1")
    if not specs or not groups:
        raise SpecError("need at least one model spec and one feature group")
    for g in groups:
        if g not in FEATURE_GROUPS:
            raise SpecError(f"unknown feature group {g!r}")
    kinds = [s.kind for s in specs]
    if len(set(kinds)) != len(kinds):
        raise SpecError("duplicate model kinds in benchmark spec")
    if policy is None:
        policy = SplitPolicy("random_fraction", 0.2, 0)

    # One split per repeat, one feature table per (group, repeat).
    splits_features = {}
    for r in range(repeats):
        pol_r = SplitPolicy(policy.kind, policy.test_fraction, derive_seed(policy.seed, r))
        train_ds, test_ds = split_dataset(ds, pol_r)
        for g in groups:
            ftr = assemble_matrix(train_ds, g)
            fte = assemble_matrix(test_ds, g)
            splits_features[(g, r)] = (ftr.X, ftr.y, fte.X, fte.y)

    tasks = [(s, g, r) for s in specs for g in groups for r in range(repeats)]
    results = {}

    def work(task):
        s, g, r = task
        try:
            return (s.kind, g, r), _run_cell(s, g, r, splits_features), None
        except Exception as e:  # failure isolation per grid cell
            return (s.kind, g, r), None, f"repeat {r}: {type(e).__name__}: {e}"

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(work, tasks))
    else:
        outcomes = [work(t) for t in tasks]
    for key, value, err in outcomes:
        results[key] = (value, err)

    grid, failures, predictions = {}, {}, {}
    for s in specs:
        for g in groups:
            sets, actual, predicted, err_text = [], [], [], None
            for r in range(repeats):
                value, err = results[(s.kind, g, r)]
                if err is not None:
                    err_text = err_text or err
                else:
                    ms, yte, yhat = value
                    sets.append(ms)
                    actual.append(yte)
                    predicted.append(yhat)
            if err_text is not None:
                failures[(s.kind, g)] = err_text
            else:
                grid[(s.kind, g)] = RunStats.from_metric_sets(sets)
                predictions[(s.kind, g)] = (
                    np.concatenate(actual),
                    np.concatenate(predicted),
                )

    echo = {
        "models": [
            {
                "kind": s.kind,
                "hyperparams": {k: list(v) if isinstance(v, tuple) else v
                                for k, v in s.hyperparams.items()},
                "seed": s.seed,
                "standardize_inputs": s.standardize_inputs,
            }
            for s in specs
        ],
        "groups": list(groups),
        "repeats": repeats,
        "split": {
            "kind": policy.kind,
            "test_fraction": policy.test_fraction,
            "seed": policy.seed,
        },
        "dataset_fingerprint": dataset_fingerprint(ds),
    }
    return BenchmarkReport(
        grid=grid,
        failures=failures,
        predictions=predictions,
        kinds=kinds,
        groups=list(groups),
        repeats=repeats,
        policy=policy,
        fingerprint=echo["dataset_fingerprint"],
        config_echo=echo,
    )


# ---------------------------------------------------------------------------
# rendering


def _markdown_cell(report, kind, group):
    if (kind, group) in report.failures:
        return "failed"
    stats = report.grid[(kind, group)]
    if stats.std is None:
        return f"{stats.mean['mape']:.2f}"
    return f"{stats.mean['mape']:.2f} ± {stats.std['mape']:.2f}"


def render_markdown(report: BenchmarkReport) -> str:
    header = ["Model"] + [g.capitalize() for g in report.groups]
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    for kind in report.kinds:
        row = [DISPLAY_NAMES.get(kind, kind)]
        row += [_markdown_cell(report, kind, g) for g in report.groups]
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"


def render_csv(report: BenchmarkReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "group", "metric", "mean", "std", "repeats", "error"])
    for kind in report.kinds:
        for g in report.groups:
            if (kind, g) in report.failures:
                w.writerow([kind, g, "", "", "", report.repeats, report.failures[(kind, g)]])
                continue
            stats = report.grid[(kind, g)]
            for m in METRIC_NAMES:
                std = "" if stats.std is None else repr(stats.std[m])
                w.writerow([kind, g, m, repr(stats.mean[m]), std, stats.repeats, ""])
    return buf.getvalue()


def parse_report_csv(text: str) -> dict:
    """Inverse of render_csv: {(model, group): {"metrics": {...},
    "repeats": int, "error": str | None}}."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["model", "group", "metric", "mean", "std", "repeats", "error"]:
        raise UnsupportedFormat("not a benchmark CSV")
    out = {}
    for model, group, metric, mean_s, std_s, repeats_s, error in rows[1:]:
        cell = out.setdefault(
            (model, group), {"metrics": {}, "repeats": int(repeats_s), "error": None}
        )
        if error:
            cell["error"] = error
        else:
            cell["metrics"][metric] = (
                float(mean_s),
                float(std_s) if std_s else None,
            )
    return out


def render_svg_scatter(actual, predicted, title: str) -> str:
    """Predicted-vs-actual scatter with a y = x reference, as a
    self-contained SVG document."""
    actual = np.asarray(actual, dtype=np.float64)
    predicted = np.asarray(predicted, dtype=np.float64)
    w = h = 480
    margin = 56
    lo = float(min(actual.min(), predicted.min()))
    hi = float(max(actual.max(), predicted.max()))
    span = hi - lo or 1.0
    lo -= 0.05 * span
    hi += 0.05 * span

    def sx(v):
        return margin + (v - lo) / (hi - lo) * (w - 2 * margin)

    def sy(v):
        return h - margin - (v - lo) / (hi - lo) * (h - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w/2:.1f}" y="24" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{h-margin}" x2="{w-margin}" y2="{h-margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{h-margin}" stroke="black"/>',
        f'<line x1="{sx(lo):.2f}" y1="{sy(lo):.2f}" x2="{sx(hi):.2f}" y2="{sy(hi):.2f}" '
        f'stroke="#888" stroke-dasharray="4 3"/>',
        f'<text x="{w/2:.1f}" y="{h-16}" text-anchor="middle" font-size="12">actual cycle life</text>',
        f'<text x="18" y="{h/2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 18 {h/2:.1f})">predicted cycle life</text>',
    ]
    for a, p in zip(actual, predicted):
        parts.append(
            f'<circle cx="{sx(a):.2f}" cy="{sy(p):.2f}" r="3" '
            f'fill="steelblue" fill-opacity="0.6"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_report(report: BenchmarkReport, formats) -> dict:
    """Render the chosen formats; {} for an empty format list.

    Returns {"markdown": str, "csv": str, "svg_scatter": {filename: svg}}.
    """
    out = {}
    for fmt in formats:
        if fmt == "markdown":
            out["markdown"] = render_markdown(report)
        elif fmt == "csv":
            out["csv"] = render_csv(report)
        elif fmt == "svg_scatter":
            plots = {}
            for (kind, g), (actual, predicted) in sorted(report.predictions.items()):
                name = f"{kind}_{g}.svg"
                plots[name] = render_svg_scatter(
                    actual, predicted, f"{DISPLAY_NAMES.get(kind, kind)} — {g}"
                )
            out["svg_scatter"] = plots
        else:
            raise UnsupportedFormat(f"unknown report format {fmt!r}")
    return out


def baseline_mse(y_train, y_test) -> float:
    """MSE of the constant mean-of-training predictor."""
    y_train = np.asarray(y_train, dtype=np.float64)
    y_test = np.asarray(y_test, dtype=np.float64)
    return mse(y_test, np.full(y_test.shape[0], y_train.mean()))
