"""Regenerate the committed .mat test fixtures.

Writes small synthetic battery batches in the same MAT v5 layout the
converter documents for real source data: a top-level 1xN struct array
`batch` with per-cell policy/barcode char arrays, a scalar cycle_life,
a summary struct of per-cycle channels, and a 1xC cycles struct array
holding the measured discharge records (V descending, Qd ascending)
for cycles 10 and 100 (empty matrices elsewhere, as only those two are
consumed).

scipy does the writing on purpose: the TypeScript parser under test
must agree with an independent, widely used producer rather than with
a file format implementation of our own.

Usage: python3 tools/make_fixtures.py
"""

import numpy as np
from scipy.io import savemat

NOMINAL = 1.1


def fade_curve(n_cycles, life, q0, rng):
    """Discharge capacity per cycle: slow fade that accelerates near
    end of life, crossing 0.8*nominal strictly at `life` (1-based)."""
    cycles = np.arange(1, n_cycles + 1, dtype=np.float64)
    q_end = 0.8 * NOMINAL
    # power-law knee: qd(life) just below the threshold, qd(life-1) above
    t = np.clip(cycles / life, 0.0, 1.2)
    qd = q0 - (q0 - q_end) * t**4
    qd -= 1e-4 * (cycles == life)  # make the crossing strict
    qd += rng.normal(0.0, 2e-5, size=n_cycles)
    # keep the pre-life stretch above threshold despite noise
    before = cycles < life
    qd[before] = np.maximum(qd[before], q_end + 5e-4)
    qd[~before] = np.minimum(qd[~before], q_end - 1e-4)
    return qd


def discharge_record(qd_total, n_points, rng):
    """One measured Qd-vs-V discharge record. Voltage falls 3.49→2.01
    (inside the 2.0–3.5 conversion grid, so clamping is exercised at
    both ends); capacity rises 0→qd_total with a plateau shape."""
    v = np.linspace(3.49, 2.01, n_points) + rng.normal(0.0, 1e-4, n_points)
    v = np.sort(v)[::-1].copy()
    s = (3.5 - v) / 1.5
    frac = np.clip(1.22 * s - 0.35 * s**3 + 0.13 * s**7, 0.0, 1.0)
    frac = np.maximum.accumulate(frac)
    return v, qd_total * frac / frac[-1]


def make_cell(rng, life, n_cycles, q0=1.075, broken_summary=False):
    qd = fade_curve(n_cycles, life, q0, rng)
    summary = {
        "cycle": np.arange(1, n_cycles + 1, dtype=np.float64),
        "QDischarge": qd,
        "QCharge": qd + rng.uniform(0.001, 0.003, n_cycles),
        "Tavg": 30.0 + 3.0 * rng.random(n_cycles),
        "IR": 0.016 + 0.001 * rng.random(n_cycles),
        "chargetime": 10.0 + 3.0 * rng.random(n_cycles),
    }
    cycles = np.zeros((1, n_cycles), dtype=[("V", object), ("Qd", object)])
    empty = np.zeros((0, 0))
    for k in range(n_cycles):
        cyc = k + 1
        if cyc in (10, 100):
            v, q = discharge_record(float(qd[k]), 80, rng)
            cycles[0, k] = (v, q)
        else:
            cycles[0, k] = (empty, empty)
    if broken_summary:
        summary["IR"] = summary["IR"].copy()
        summary["IR"][40] = np.nan
    return summary, cycles


def make_batch(path, cells, compress):
    batch = np.zeros(
        (1, len(cells)),
        dtype=[
            ("policy", object),
            ("barcode", object),
            ("cycle_life", object),
            ("summary", object),
            ("cycles", object),
        ],
    )
    for i, cell in enumerate(cells):
        summary, cycles = make_cell(
            cell["rng"],
            cell["life"],
            cell["n_cycles"],
            broken_summary=cell.get("broken_summary", False),
        )
        batch[0, i] = (
            cell["policy"],
            cell["barcode"],
            np.array([[float(cell["life"])]]),
            summary,
            cycles,
        )
    savemat(path, {"batch": batch}, do_compression=compress)
    print(f"wrote {path} ({len(cells)} cells, compression={compress})")


def make_types_probe(path):
    """Grab-bag of array classes/storage types for parser unit tests."""
    savemat(
        path,
        {
            "dbl_mat": np.array([[1.5, -2.25], [3.0, 4.125]]),
            "int16_vec": np.array([-7, 0, 2000], dtype=np.int16),
            "uint8_vec": np.array([0, 128, 255], dtype=np.uint8),
            "single_vec": np.array([0.5, -0.5], dtype=np.float32),
            "empty": np.zeros((0, 0)),
            "label": "ΔQ probe",
            "a_cell": np.array(
                [[np.array([[1.0, 2.0]]), "two", np.zeros((0, 0))]], dtype=object
            ),
            "nested": {"inner": {"deep": np.array([[42.0]])}, "tag": "x"},
        },
        do_compression=False,
    )
    print(f"wrote {path}")


def main():
    make_types_probe("fixtures/types.mat")
    make_batch(
        "fixtures/batch_a.mat",
        [
            {"rng": np.random.default_rng(101), "life": 148, "n_cycles": 160,
             "policy": "5.3C(54%)-4C", "barcode": "EL150800737280"},
            {"rng": np.random.default_rng(102), "life": 212, "n_cycles": 226,
             "policy": "3.6C(80%)-3.6C", "barcode": "EL150800737281"},
            {"rng": np.random.default_rng(103), "life": 305, "n_cycles": 312,
             "policy": "4.8C(80%)-4.8C", "barcode": "EL150800737282"},
        ],
        compress=False,
    )
    make_batch(
        "fixtures/batch_b.mat",
        [
            # good cell, in a compressed file
            {"rng": np.random.default_rng(201), "life": 180, "n_cycles": 195,
             "policy": "4C(31%)-5C", "barcode": "EL150800737290"},
            # never crosses 80% inside its log -> excluded
            {"rng": np.random.default_rng(202), "life": 400, "n_cycles": 140,
             "policy": "1C(4%)-6C", "barcode": "EL150800737291"},
            # crosses at cycle 64 -> cycle_life <= 100, excluded
            {"rng": np.random.default_rng(203), "life": 64, "n_cycles": 120,
             "policy": "8C(15%)-8C", "barcode": "EL150800737292"},
            # summary log stops before cycle 100 -> excluded
            {"rng": np.random.default_rng(204), "life": 80, "n_cycles": 90,
             "policy": "7C(40%)-7C", "barcode": "EL150800737293"},
            # NaN in a summary channel -> excluded
            {"rng": np.random.default_rng(205), "life": 170, "n_cycles": 185,
             "policy": "6C(60%)-6C", "barcode": "EL150800737294",
             "broken_summary": True},
        ],
        compress=True,
    )


if __name__ == "__main__":
    main()
