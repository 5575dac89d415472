"""Feature extraction against hand-computed oracles."""

import numpy as np
import pytest

from cyclelife.data import (
    DEFAULT_GRID,
    REQUIRED_CURVES,
    CellRecord,
    CycleSummary,
    DischargeCurve,
    VoltageGrid,
    generate_synthetic,
)
from cyclelife.errors import MissingCurve, SpecError
from cyclelife.features import (
    FEATURE_GROUPS,
    FEATURE_NAMES,
    Standardizer,
    assemble_matrix,
    delta_q,
    extract_features,
)

GRID5 = VoltageGrid(2.0, 3.5, 5)


def build_cell(q10, q100, qd=None, ir=None, ctime=None, grid=GRID5):
    """Cell with fully prescribed curves and summary channels."""
    qd = qd if qd is not None else [1.1 - 1e-4 * c for c in range(1, 121)]
    ir = ir if ir is not None else [0.016] * len(qd)
    ctime = ctime if ctime is not None else [10.0] * len(qd)
    summaries = [
        CycleSummary(c + 1, qd[c], qd[c] * 1.001, 30.0, ir[c], ctime[c])
        for c in range(len(qd))
    ]
    curves = {
        10: DischargeCurve(10, np.asarray(q10, dtype=np.float64)),
        100: DischargeCurve(100, np.asarray(q100, dtype=np.float64)),
    }
    return CellRecord("crafted", summaries, curves, len(qd), 1.1)


def moments_oracle(values):
    """Plain-python population moments of a sequence."""
    n = len(values)
    mean = sum(values) / n
    m2 = sum((v - mean) ** 2 for v in values) / n
    m3 = sum((v - mean) ** 3 for v in values) / n
    m4 = sum((v - mean) ** 4 for v in values) / n
    return m2, m3 / m2**1.5, m4 / m2**2 - 3.0


def test_delta_q_is_pointwise_difference():
    q10 = [0.0, 0.3, 0.6, 0.9, 1.1]
    q100 = [0.0, 0.25, 0.5, 0.85, 1.05]
    cell = build_cell(q10, q100)
    expected = np.array(q100) - np.array(q10)
    assert np.array_equal(delta_q(cell), expected)


def test_delta_q_requires_both_curves():
    cell = build_cell([0] * 5, [0] * 5)
    del cell.curves[100]
    with pytest.raises(MissingCurve):
        delta_q(cell)


def test_moment_features_match_python_oracle():
    q10 = [0.0, 0.3, 0.6, 0.9, 1.1]
    q100 = [0.0, 0.22, 0.51, 0.84, 1.07]
    cell = build_cell(q10, q100)
    dq = [a - b for a, b in zip(q100, q10)]
    m2, skew, xkurt = moments_oracle(dq)
    fv = extract_features(cell)
    assert fv.values[0] == min(dq)
    assert fv.values[1] == pytest.approx(m2, rel=1e-12)
    assert fv.values[2] == pytest.approx(skew, rel=1e-12)
    assert fv.values[3] == pytest.approx(xkurt, rel=1e-12)
    assert not fv.degenerate_moments


def test_identical_curves_flagged_degenerate():
    q = [0.0, 0.3, 0.6, 0.9, 1.1]
    fv = extract_features(build_cell(q, q))
    assert fv.values[0] == 0.0
    assert fv.values[1] == 0.0
    assert fv.values[2] == 0.0 and fv.values[3] == 0.0
    assert fv.degenerate_moments


def test_fade_line_recovers_exact_linear_coefficients():
    # qd = 1.09 - 2e-4 * c over the fitted window -> slope and intercept
    # come back exactly (up to fp) from the least-squares line.
    qd = [1.09 - 2e-4 * c for c in range(1, 121)]
    fv = extract_features(build_cell([0] * 5, [0.0, 0.1, 0.2, 0.3, 0.4], qd=qd))
    assert fv.values[4] == pytest.approx(-2e-4, rel=1e-10)
    assert fv.values[5] == pytest.approx(1.09, rel=1e-10)


def test_channel_features_against_crafted_values():
    qd = [1.1 - 1e-3 * c for c in range(1, 121)]
    qd[4] = 1.2  # max over cycles 2..100 now sits at cycle 5
    ir = [0.02 + 1e-4 * c for c in range(1, 121)]
    ir[49] = 0.001  # min over cycles 2..100 at cycle 50
    ctime = [float(c) for c in range(1, 121)]  # mean over cycles 2..6 = 4
    fv = extract_features(
        build_cell([0] * 5, [0.0, 0.1, 0.2, 0.3, 0.4], qd=qd, ir=ir, ctime=ctime)
    )
    names = dict(zip(FEATURE_NAMES, fv.values))
    assert names["qd_cycle_10"] == qd[9]
    assert names["qd_rise"] == pytest.approx(1.2 - qd[1], rel=1e-12)
    assert names["charge_time_mean"] == pytest.approx(4.0, rel=1e-12)
    assert names["ir_min"] == 0.001
    assert names["ir_shift"] == pytest.approx(ir[99] - ir[9], rel=1e-12)


def test_moments_stable_under_grid_refinement():
    """Refining the voltage grid 500 -> 1000 moves the distribution
    moments of the curve difference by less than 0.1% on every cell."""
    worst = 0.0
    for seed in (77, 42, 5, 123, 2026, 7, 999):
        coarse = generate_synthetic(10, VoltageGrid(2.0, 3.5, 500), seed)
        fine = generate_synthetic(10, VoltageGrid(2.0, 3.5, 1000), seed)
        for a_cell, b_cell in zip(coarse.cells, fine.cells):
            a = extract_features(a_cell).values[1:4]
            b = extract_features(b_cell).values[1:4]
            worst = max(worst, float(np.max(np.abs(a - b) / np.abs(b))))
    assert worst < 1e-3


def test_group_definitions():
    assert FEATURE_GROUPS["full"] == (1, 2, 5, 6, 7, 9, 10, 11)
    assert FEATURE_GROUPS["discharge"] == (1, 2, 3, 4, 7, 8)
    assert FEATURE_GROUPS["variance"] == (2,)


def test_assemble_matrix_shapes_and_targets(small_dataset):
    fm = assemble_matrix(small_dataset, "discharge")
    assert fm.X.shape == (16, 6)
    assert fm.feature_indices == (1, 2, 3, 4, 7, 8)
    assert fm.cell_ids == [c.cell_id for c in small_dataset.cells]
    assert np.array_equal(
        fm.y, np.array([c.cycle_life for c in small_dataset.cells], dtype=float)
    )


def test_assemble_matrix_columns_match_extraction(small_dataset):
    fm = assemble_matrix(small_dataset, "variance")
    direct = np.array(
        [[extract_features(c).values[1]] for c in small_dataset.cells]
    )
    assert np.array_equal(fm.X, direct)


def test_log_variance_column(small_dataset):
    plain = assemble_matrix(small_dataset, "variance")
    logged = assemble_matrix(small_dataset, "variance", log_variance=True)
    assert np.allclose(logged.X[:, 0], np.log10(plain.X[:, 0]))
    # groups without the variance feature are unaffected by the flag
    a = assemble_matrix(small_dataset, "full", log_variance=True)
    b = assemble_matrix(small_dataset, "full")
    pos = a.feature_indices.index(2)
    assert np.allclose(a.X[:, pos], np.log10(b.X[:, pos]))


def test_assemble_matrix_unknown_group(small_dataset):
    with pytest.raises(SpecError):
        assemble_matrix(small_dataset, "everything")


class TestStandardizer:
    def test_zero_mean_unit_std(self, rng):
        X = rng.normal(3.0, 5.0, size=(40, 4))
        Z = Standardizer().fit_transform(X)
        assert np.allclose(Z.mean(axis=0), 0.0, atol=1e-12)
        assert np.allclose(Z.std(axis=0), 1.0, atol=1e-12)

    def test_constant_column_maps_to_zero(self):
        X = np.column_stack([np.arange(5.0), np.full(5, 2.5)])
        sc = Standardizer().fit(X)
        Z = sc.transform(X)
        assert np.all(Z[:, 1] == 0.0)
        back = sc.inverse_transform(Z)
        assert np.allclose(back, X)

    def test_round_trip(self, rng):
        X = rng.normal(size=(20, 3))
        sc = Standardizer().fit(X)
        assert np.allclose(sc.inverse_transform(sc.transform(X)), X, atol=1e-12)

    def test_use_before_fit_rejected(self):
        with pytest.raises(SpecError):
            Standardizer().transform(np.zeros((2, 2)))
