"""Kernel backend selection and numpy/numba agreement.

The module-level dispatch is import-time, so flag behavior is probed in
subprocesses; numerical agreement compares the two implementation
modules directly.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

from cyclelife import kernels
from cyclelife.kernels import numpy_impl

try:
    from cyclelife.kernels import numba_impl

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - environment without numba
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")

KERNEL_NAMES = (
    "best_split",
    "xgb_best_split",
    "tree_predict",
    "cd_sweeps",
    "sgd_epochs",
    "smo_svr",
    "knn_predict",
)


def run_probe(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("CYCLELIFE_NUMBA", None)
    else:
        env["CYCLELIFE_NUMBA"] = env_value
    code = "from cyclelife import kernels; print(kernels.active_backend())"
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    return proc.returncode, proc.stdout.strip(), proc.stderr


class TestSelection:
    def test_forced_numpy(self):
        rc, backend, _ = run_probe("0")
        assert rc == 0 and backend == "numpy"

    @needs_numba
    def test_forced_numba(self):
        rc, backend, _ = run_probe("1")
        assert rc == 0 and backend == "numba"

    @needs_numba
    def test_auto_prefers_numba(self):
        rc, backend, _ = run_probe(None)
        assert rc == 0 and backend == "numba"

    def test_unrecognized_value_rejected(self):
        rc, _, err = run_probe("maybe")
        assert rc != 0
        assert "CYCLELIFE_NUMBA" in err

    def test_active_backend_matches_dispatch(self):
        impl = numba_impl if kernels.BACKEND == "numba" else numpy_impl
        assert kernels.active_backend() == kernels.BACKEND
        for name in KERNEL_NAMES:
            assert getattr(kernels, name) is getattr(impl, name)


@needs_numba
class TestAgreement:
    """Both implementations answer identically on the same inputs."""

    def test_best_split(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 40))
            x = rng.integers(0, 6, size=n).astype(np.float64)
            y = rng.normal(size=n)
            a = numpy_impl.best_split(x, y)
            b = numba_impl.best_split(x, y)
            assert a[2] == b[2]
            if a[2]:
                assert a[0] == b[0]
                assert a[1] == pytest.approx(b[1], rel=1e-12, abs=1e-12)

    def test_xgb_best_split(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 40))
            x = rng.normal(size=n)
            g = rng.normal(size=n)
            h = rng.uniform(0.5, 2.0, size=n)
            a = numpy_impl.xgb_best_split(x, g, h, 1.0)
            b = numba_impl.xgb_best_split(x, g, h, 1.0)
            assert a[2] == b[2]
            if a[2]:
                assert a[0] == b[0]
                assert a[1] == pytest.approx(b[1], rel=1e-12, abs=1e-12)

    def test_tree_predict(self, rng):
        feature = np.array([0, -1, 1, -1, -1], dtype=np.int64)
        thr = np.array([0.0, 0.0, 1.0, 0.0, 0.0])
        left = np.array([1, -1, 3, -1, -1], dtype=np.int64)
        right = np.array([2, -1, 4, -1, -1], dtype=np.int64)
        value = np.array([0.0, -1.0, 0.0, 2.0, 3.0])
        X = rng.normal(size=(50, 2))
        a = numpy_impl.tree_predict(feature, thr, left, right, value, X)
        b = numba_impl.tree_predict(feature, thr, left, right, value, X)
        assert np.array_equal(a, b)

    def test_cd_sweeps(self, rng):
        X = rng.normal(size=(30, 4))
        yc = rng.normal(size=30)
        col_sq = (X * X).mean(axis=0)
        wa = np.zeros(4)
        wb = np.zeros(4)
        ra = numpy_impl.cd_sweeps(
            np.ascontiguousarray(X.T), yc, wa, 0.05, 0.01, col_sq, 1e-8, 500
        )
        rb = numba_impl.cd_sweeps(
            np.ascontiguousarray(X.T), yc, wb, 0.05, 0.01, col_sq, 1e-8, 500
        )
        assert ra == rb
        assert np.allclose(wa, wb, atol=1e-14)

    def test_sgd_epochs(self, rng):
        X = rng.normal(size=(20, 3))
        y = rng.normal(size=20)
        perms = np.stack(
            [rng.permutation(20) for _ in range(5)]
        ).astype(np.int64)
        wa, wb = np.zeros(3), np.zeros(3)
        ba = numpy_impl.sgd_epochs(X, y, wa, 0.0, 1e-3, perms)
        bb = numba_impl.sgd_epochs(X, y, wb, 0.0, 1e-3, perms)
        assert ba == pytest.approx(bb, rel=1e-14, abs=1e-15)
        assert np.allclose(wa, wb, atol=1e-14)

    def test_smo_svr(self, rng):
        X = rng.normal(size=(15, 2))
        y = rng.normal(size=15)
        sq = np.sum((X[:, None] - X[None, :]) ** 2, axis=2)
        K = np.exp(-0.5 * sq)
        beta_a, ba, pa, ca = numpy_impl.smo_svr(K, y, 10.0, 0.1, 1e-3, 5000)
        beta_b, bb, pb, cb = numba_impl.smo_svr(K, y, 10.0, 0.1, 1e-3, 5000)
        assert (pa, ca) == (pb, cb)
        assert ba == pytest.approx(bb, rel=1e-12, abs=1e-12)
        assert np.allclose(beta_a, beta_b, atol=1e-12)

    def test_knn_predict(self, rng):
        X = rng.normal(size=(25, 3))
        y = rng.normal(size=25)
        Q = rng.normal(size=(10, 3))
        a = numpy_impl.knn_predict(X, y, Q, 4)
        b = numba_impl.knn_predict(X, y, Q, 4)
        assert np.array_equal(a, b)


@needs_numba
def test_full_pipeline_agrees_across_backends(tmp_path):
    """End to end across backends (subprocesses, since dispatch is
    import-time): models built on order-identical kernels must produce
    byte-identical benchmark rows; the iterative solvers (coordinate
    descent, SMO) accumulate in a different order under numba, so their
    rows agree to 1e-9 relative instead of bitwise."""
    script = tmp_path / "probe.py"
    script.write_text(
        "from cyclelife.data import DEFAULT_GRID, generate_synthetic\n"
        "from cyclelife.evaluation import render_csv, run_benchmark\n"
        "from cyclelife.models import RegressorSpec\n"
        "ds = generate_synthetic(14, DEFAULT_GRID, 21)\n"
        "specs = [RegressorSpec(k, seed=2) for k in"
        " ('Linear', 'DecisionTree', 'SVR', 'Lasso', 'KNN')]\n"
        "report = run_benchmark(ds, specs, groups=('variance',), repeats=2)\n"
        "print(render_csv(report), end='')\n"
    )
    outputs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, CYCLELIFE_NUMBA=flag)
        proc = subprocess.run(
            [sys.executable, str(script)], capture_output=True, text=True, env=env
        )
        assert proc.returncode == 0, proc.stderr
        outputs[flag] = proc.stdout.strip().split("\n")

    assert len(outputs["0"]) == len(outputs["1"])
    approx_kinds = ("Lasso", "SVR")
    for row_np, row_nb in zip(outputs["0"], outputs["1"]):
        kind = row_np.split(",", 1)[0]
        if kind not in approx_kinds:
            assert row_np == row_nb
            continue
        head_np, head_nb = row_np.split(",")[:3], row_nb.split(",")[:3]
        assert head_np == head_nb
        for a, b in zip(row_np.split(",")[3:5], row_nb.split(",")[3:5]):
            if a or b:
                assert float(a) == pytest.approx(float(b), rel=1e-9)
