"""Time every hot kernel under the numpy and numba backends.

The backend is chosen at import time from CYCLELIFE_NUMBA, so the
coordinator process never imports the package itself: it re-runs this
script as a worker subprocess once per backend and renders a
side-by-side table from the workers' JSON output.

Usage:
    python3 benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import json
import os
import subprocess
import sys
from time import perf_counter

import numpy as np


def build_workloads():
    """One (name, callable) pair per kernel, sized for milliseconds."""
    from cyclelife import kernels

    rng = np.random.default_rng(9000)

    split_x = rng.integers(0, 1000, size=200_000).astype(np.float64)
    split_y = rng.normal(size=200_000)
    grad = rng.normal(size=200_000)
    hess = np.abs(rng.normal(size=200_000)) + 0.5

    depth = 12
    n_nodes = 2 ** (depth + 1) - 1
    n_internal = 2**depth - 1
    feature = np.full(n_nodes, -1, dtype=np.int64)
    threshold = np.zeros(n_nodes)
    left = np.full(n_nodes, -1, dtype=np.int64)
    right = np.full(n_nodes, -1, dtype=np.int64)
    value = np.zeros(n_nodes)
    for i in range(n_internal):
        feature[i] = i % 8
        threshold[i] = rng.normal()
        left[i] = 2 * i + 1
        right[i] = 2 * i + 2
    value[n_internal:] = rng.normal(size=n_nodes - n_internal)
    tree_X = rng.normal(size=(100_000, 8))

    cd_X = rng.normal(size=(2_000, 50))
    cd_X = (cd_X - cd_X.mean(axis=0)) / cd_X.std(axis=0)
    cd_XT = np.ascontiguousarray(cd_X.T)
    cd_y = cd_X @ rng.normal(size=50) + rng.normal(size=2_000)
    cd_y -= cd_y.mean()
    col_sq = (cd_X**2).mean(axis=0)

    sgd_X = rng.normal(size=(2_000, 20))
    sgd_y = sgd_X @ rng.normal(size=20)
    perm_rows = [rng.permutation(2_000) for _ in range(50)]
    perms = np.array(perm_rows, dtype=np.int64)

    svr_x = np.sort(rng.uniform(size=400)).reshape(-1, 1)
    svr_y = np.sin(2 * np.pi * svr_x[:, 0])
    sq = ((svr_x[:, None, :] - svr_x[None, :, :]) ** 2).sum(axis=2)
    K = np.exp(-1.0 * sq)

    knn_train = rng.normal(size=(5_000, 8))
    knn_y = rng.normal(size=5_000)
    knn_query = rng.normal(size=(5_000, 8))

    return [
        ("best_split", lambda: kernels.best_split(split_x, split_y)),
        ("xgb_best_split", lambda: kernels.xgb_best_split(split_x, grad, hess, 1.0)),
        (
            "tree_predict",
            lambda: kernels.tree_predict(feature, threshold, left, right, value, tree_X),
        ),
        (
            "cd_sweeps",
            lambda: kernels.cd_sweeps(
                cd_XT, cd_y, np.zeros(50), 0.01, 0.0, col_sq, 0.0, 200
            ),
        ),
        (
            "sgd_epochs",
            lambda: kernels.sgd_epochs(sgd_X, sgd_y, np.zeros(20), 0.0, 1e-3, perms),
        ),
        ("smo_svr", lambda: kernels.smo_svr(K, svr_y, 100.0, 0.1, 1e-3, 200)),
        ("knn_predict", lambda: kernels.knn_predict(knn_train, knn_y, knn_query, 5)),
    ]


def run_worker(repeats):
    from cyclelife import kernels

    kernels.warmup()
    timings = {}
    for name, fn in build_workloads():
        fn()  # compile/warm with the real dtypes before timing
        best = min(time_once(fn) for _ in range(repeats))
        timings[name] = best
    print(json.dumps({"backend": kernels.active_backend(), "timings": timings}))


def time_once(fn):
    t0 = perf_counter()
    fn()
    return perf_counter() - t0


def run_backend(flag, repeats):
    env = dict(os.environ, CYCLELIFE_NUMBA=flag)
    proc = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker", "--repeats", str(repeats)],
        capture_output=True,
        text=True,
        env=env,
    )
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        return None
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        run_worker(args.repeats)
        return

    results = {}
    for flag in ("0", "1"):
        out = run_backend(flag, args.repeats)
        if out is None:
            print(f"CYCLELIFE_NUMBA={flag}: worker failed (backend unavailable?)")
            continue
        results[out["backend"]] = out["timings"]

    if "numpy" not in results:
        sys.exit("numpy worker failed; nothing to compare")

    names = list(results["numpy"])
    have_numba = "numba" in results
    header = f"{'kernel':<16}{'numpy':>12}" + (f"{'numba':>12}{'speedup':>10}" if have_numba else "")
    print(header)
    print("-" * len(header))
    for name in names:
        base = results["numpy"][name]
        row = f"{name:<16}{base * 1e3:>10.2f}ms"
        if have_numba:
            jit = results["numba"][name]
            row += f"{jit * 1e3:>10.2f}ms{base / jit:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
