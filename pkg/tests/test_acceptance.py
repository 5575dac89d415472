"""Acceptance gate: one test per shipping criterion.

Each test covers exactly one criterion, prints a single verdict line
with its measured evidence, and enforces the pinned tolerance and
runtime budget.  The real-data replication test is skipped unless a
converted dataset directory is supplied via CYCLELIFE_REAL_DATA.
"""

import os
from time import perf_counter

import numpy as np
import pytest

from cyclelife.data import SplitPolicy, load_dataset, split_dataset
from cyclelife.errors import NoValidSplit
from cyclelife.evaluation import (
    baseline_mse,
    mape,
    r_squared,
    render_csv,
    render_markdown,
    run_benchmark,
    BenchmarkReport,
    MetricSet,
    RunStats,
)
from cyclelife.features import Standardizer
from cyclelife.models import MODEL_KINDS, RegressorSpec, predict, train
from cyclelife.models.mlp import init_params as mlp_init
from cyclelife.models.mlp import loss_and_grads
from cyclelife.models.tree import best_split
from cyclelife.rng import derive_seed
from cyclelife.seq import (
    SequenceModelSpec,
    SeriesSample,
    TrainRun,
    backward,
    build_series,
    forward,
    train_sequence,
)
from cyclelife.seq.cells import CELL_KINDS
from cyclelife.seq.cells import init_params as seq_init


def verdict(name, ok, detail):
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} — {detail}"
    print(line)
    assert ok, line


def rel_err(got, ref):
    return float(np.linalg.norm(got - ref) / max(np.linalg.norm(ref), 1e-300))


def test_a1_solver_oracle_suite():
    """Linear/Ridge vs normal equations (1e-8 relative, 50 instances);
    Lasso beats or ties a 201x201 grid (20 instances).  Budget 10 s."""
    t0 = perf_counter()
    rng = np.random.default_rng(1042)

    worst = 0.0
    for _ in range(50):
        p = int(rng.integers(1, 9))
        n = int(rng.integers(p + 2, 51))
        X = rng.normal(size=(n, p))
        y = X @ rng.normal(size=p) + rng.normal(scale=0.1, size=n) + rng.normal()

        A = np.hstack([X, np.ones((n, 1))])
        ref = np.linalg.solve(A.T @ A, A.T @ y)
        model = train(RegressorSpec("Linear", seed=0), X, y)
        got = np.append(model.payload["w"], model.payload["b"])
        worst = max(worst, rel_err(got, ref))

        lam = 1.0
        Xc = X - X.mean(axis=0)
        w_ref = np.linalg.solve(Xc.T @ Xc + lam * np.eye(p), Xc.T @ (y - y.mean()))
        b_ref = float(y.mean() - X.mean(axis=0) @ w_ref)
        ridge = train(RegressorSpec("Ridge", {"lam": lam}, seed=0), X, y)
        got_r = np.append(ridge.payload["w"], ridge.payload["b"])
        worst = max(worst, rel_err(got_r, np.append(w_ref, b_ref)))

    lam = 0.05
    grid_ok = 0
    for _ in range(20):
        X = rng.normal(size=(25, 2))
        y = X @ rng.normal(size=2) + rng.normal(scale=0.3, size=25)
        model = train(RegressorSpec("Lasso", {"lam": lam}, seed=0), X, y)
        w_star = model.payload["w"]
        Z = Standardizer().fit_transform(X)
        yc = y - y.mean()

        def objective(w):
            r = yc - Z @ w
            return float(r @ r) / (2 * len(yc)) + lam * float(np.abs(w).sum())

        j_star = objective(w_star)
        spans = np.maximum(0.5, np.abs(w_star))
        g0 = np.linspace(w_star[0] - spans[0], w_star[0] + spans[0], 201)
        g1 = np.linspace(w_star[1] - spans[1], w_star[1] + spans[1], 201)
        best = min(objective(np.array([a, b])) for a in g0 for b in g1)
        if j_star <= best + 1e-10:
            grid_ok += 1

    elapsed = perf_counter() - t0
    verdict(
        "solver-oracles",
        worst < 1e-8 and grid_ok == 20 and elapsed < 10.0,
        f"worst relative error {worst:.2e}, grid optimality {grid_ok}/20, "
        f"{elapsed:.1f}s of 10s",
    )


def test_a2_tree_oracle_suite():
    """best_split vs exhaustive enumeration on 100 random columns;
    unlimited-depth tree memorizes separable data.  Budget 5 s."""
    t0 = perf_counter()
    rng = np.random.default_rng(2042)

    def exhaustive(x, y):
        def sse(v):
            return float(np.sum((v - v.mean()) ** 2)) if v.size else 0.0

        levels = np.unique(x)
        out = None
        for a, b in zip(levels, levels[1:]):
            thr = (a + b) / 2.0
            m = x <= thr
            gain = sse(y) - sse(y[m]) - sse(y[~m])
            if out is None or gain > out[1] + 1e-12:
                out = (thr, gain)
        return out

    agree = 0
    checked = 0
    while checked < 100:
        n = int(rng.integers(2, 31))
        x = (
            rng.integers(0, 5, size=n).astype(np.float64)
            if checked % 2
            else rng.normal(size=n)
        )
        y = rng.normal(size=n)
        if np.unique(x).size < 2:
            with pytest.raises(NoValidSplit):
                best_split(x, y)
            continue
        checked += 1
        thr_ref, gain_ref = exhaustive(x, y)
        thr, gain = best_split(x, y)
        if thr == pytest.approx(thr_ref, rel=1e-12) and gain == pytest.approx(
            gain_ref, rel=1e-9, abs=1e-9
        ):
            agree += 1

    memorized = 0
    for seed in (0, 1, 2):
        gen = np.random.default_rng(seed)
        X = gen.normal(size=(40, 3))
        y = gen.normal(size=40)
        model = train(RegressorSpec("DecisionTree", seed=0), X, y)
        if np.array_equal(predict(model, X), y):
            memorized += 1

    elapsed = perf_counter() - t0
    verdict(
        "tree-oracles",
        agree == 100 and memorized == 3 and elapsed < 5.0,
        f"split agreement {agree}/100, memorized fixtures {memorized}/3, "
        f"{elapsed:.1f}s of 5s",
    )


def test_a3_gradient_suite():
    """Central finite differences confirm the MLP backward pass and all
    six recurrent configurations, max relative error < 1e-4.  Budget 30 s."""
    t0 = perf_counter()
    h = 1e-6
    max_rel = 0.0

    def fd_vs_analytic(params, analytic, loss_fn, samples_per_param=4):
        nonlocal max_rel
        pick = np.random.default_rng(0)
        for key in sorted(params):
            flat_p = params[key].ravel()
            flat_g = analytic[key].ravel()
            count = min(samples_per_param, flat_p.size)
            for idx in pick.choice(flat_p.size, size=count, replace=False):
                old = flat_p[idx]
                flat_p[idx] = old + h
                up = loss_fn()
                flat_p[idx] = old - h
                down = loss_fn()
                flat_p[idx] = old
                fd = (up - down) / (2 * h)
                max_rel = max(max_rel, abs(flat_g[idx] - fd) / max(abs(fd), 1e-6))

    gen = np.random.default_rng(3042)
    X = gen.normal(size=(12, 3))
    y = gen.normal(size=12)
    net = mlp_init(3, (5, 4), seed=17)
    for k in net:  # keep activations off the ReLU kink
        if k.startswith("b"):
            net[k] = net[k] + 0.05
    _, grads = loss_and_grads(net, X, y)
    fd_vs_analytic(net, grads, lambda: loss_and_grads(net, X, y)[0])

    for kind in CELL_KINDS:
        for attention in (False, True):
            spec = SequenceModelSpec(kind, 3, attention, 2, seed=13)
            params = seq_init(spec)
            sample = SeriesSample("probe", gen.normal(size=(5, 2)), 0.7)

            def seq_loss():
                pred, _ = forward(spec, params, sample)
                return 0.5 * (pred - sample.target) ** 2

            analytic = backward(spec, params, sample)
            fd_vs_analytic(params, analytic, seq_loss)

    elapsed = perf_counter() - t0
    verdict(
        "gradient-checks",
        max_rel < 1e-4 and elapsed < 30.0,
        f"max relative error {max_rel:.2e} over MLP + 6 recurrent configs, "
        f"{elapsed:.1f}s of 30s",
    )


def test_a4_metric_identities():
    """MAPE scale invariance; r² = 1 iff exact and 0 for the mean
    predictor; the markdown table renders the reference row layout."""
    y = np.array([120.0, 340.0, 560.0])
    yhat = np.array([100.0, 350.0, 500.0])
    scale_ok = (
        mape(1024.0 * y, 1024.0 * yhat) == mape(y, yhat)
        and mape(3.7 * y, 3.7 * yhat) == pytest.approx(mape(y, yhat), rel=1e-12)
    )

    exact_ok = r_squared(y, y.copy()) == 1.0 and r_squared(y, yhat) < 1.0
    mean_ok = r_squared(y, np.full(3, y.mean())) == 0.0

    stats = {
        ("RandomForest", g): RunStats.from_metric_sets(
            [MetricSet(mse=1.0, mape=m, r_squared=0.5)]
        )
        for g, m in (("full", 11.13), ("discharge", 10.7), ("variance", 9.824))
    }
    report = BenchmarkReport(
        grid=stats,
        failures={},
        predictions={},
        kinds=["RandomForest"],
        groups=["full", "discharge", "variance"],
        repeats=1,
        policy=SplitPolicy("random_fraction", 0.2, 0),
        fingerprint="0" * 16,
    )
    lines = render_markdown(report).strip().split("\n")
    table_ok = (
        lines[0] == "| Model | Full | Discharge | Variance |"
        and lines[2] == "| Random Forest | 11.13 | 10.70 | 9.82 |"
    )

    verdict(
        "metric-identities",
        scale_ok and exact_ok and mean_ok and table_ok,
        f"scale invariance {scale_ok}, r² identities {exact_ok and mean_ok}, "
        f"table row {table_ok}",
    )


def test_a5_synthetic_end_to_end(acceptance_dataset, acceptance_report):
    """124 cells @ seed 42: the full 14-model x 3-group grid completes,
    Random Forest on the variance group beats the mean-predictor MSE by
    at least 2x, and a rerun is byte-identical.  Budget 5 min."""
    t0 = perf_counter()
    report = acceptance_report
    completes = not report.failures and len(report.grid) == len(MODEL_KINDS) * 3

    rf_mse = report.grid[("RandomForest", "variance")].mean["mse"]
    baselines = []
    for r in range(report.repeats):
        pol = SplitPolicy(
            report.policy.kind,
            report.policy.test_fraction,
            derive_seed(report.policy.seed, r),
        )
        train_ds, test_ds = split_dataset(acceptance_dataset, pol)
        baselines.append(
            baseline_mse(
                [c.cycle_life for c in train_ds.cells],
                [c.cycle_life for c in test_ds.cells],
            )
        )
    ratio = float(np.mean(baselines)) / rf_mse

    specs = [RegressorSpec(kind, seed=7) for kind in MODEL_KINDS]
    rerun = run_benchmark(
        acceptance_dataset,
        specs,
        groups=("full", "discharge", "variance"),
        repeats=5,
        jobs=1,
    )
    identical = render_csv(rerun) == render_csv(report)

    elapsed = perf_counter() - t0
    verdict(
        "synthetic-end-to-end",
        completes and ratio >= 2.0 and identical and elapsed < 300.0,
        f"grid {len(report.grid)}/42 with {len(report.failures)} failures, "
        f"baseline/forest MSE ratio {ratio:.0f}x (need >= 2), "
        f"rerun identical {identical}, {elapsed:.1f}s of 300s",
    )


def test_a6_scheduling_determinism(acceptance_dataset, acceptance_report):
    """The grid is bit-reproducible with 1 worker vs 8."""
    specs = [RegressorSpec(kind, seed=7) for kind in MODEL_KINDS]
    parallel = run_benchmark(
        acceptance_dataset,
        specs,
        groups=("full", "discharge", "variance"),
        repeats=5,
        jobs=8,
    )
    identical = render_csv(parallel) == render_csv(acceptance_report)
    verdict(
        "scheduling-determinism",
        identical,
        f"jobs=8 grid byte-identical to jobs=1: {identical}",
    )


REAL_DATA = os.environ.get("CYCLELIFE_REAL_DATA", "")


@pytest.mark.skipif(
    not REAL_DATA,
    reason="real-data replication needs a converted dataset directory "
    "(set CYCLELIFE_REAL_DATA to its path)",
)
def test_secondary_real_data_replication():
    """On converted cycling data: Random Forest variance-group MAPE
    <= 15%, Elastic Net in [8, 18] on every group, raw-target recurrent
    training plateaus above 100% MAPE with attention landing lower."""
    ds = load_dataset(REAL_DATA)
    report = run_benchmark(
        ds,
        [RegressorSpec("RandomForest", seed=7), RegressorSpec("ElasticNet", seed=7)],
        groups=("full", "discharge", "variance"),
        repeats=5,
    )
    rf = report.grid[("RandomForest", "variance")].mean["mape"]
    en = {g: report.grid[("ElasticNet", g)].mean["mape"]
          for g in ("full", "discharge", "variance")}
    rf_ok = rf <= 15.0
    en_ok = all(8.0 <= v <= 18.0 for v in en.values())

    train_ds, val_ds = split_dataset(ds, SplitPolicy("random_fraction", 0.2, 0))
    samples, stats = build_series(train_ds, ("discharge_capacity",))
    val, _ = build_series(val_ds, ("discharge_capacity",), stats)
    plateaus = {}
    for attention in (False, True):
        spec = SequenceModelSpec("LSTM", 64, attention, 1, seed=7)
        _, run = train_sequence(spec, samples, TrainRun(epochs=100), val)
        plateaus[attention] = min(row["mape"] for row in run.history[-10:])
    seq_ok = plateaus[False] > 100.0 and plateaus[True] < plateaus[False]

    verdict(
        "real-data-replication",
        rf_ok and en_ok and seq_ok,
        f"forest variance MAPE {rf:.2f} (<= 15), elastic net {en}, "
        f"plain plateau {plateaus[False]:.0f}% vs attention {plateaus[True]:.0f}%",
    )
