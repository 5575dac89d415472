"""Command-line entry point.

Subcommands: validate, features, benchmark, train-seq, report.
Exit codes are a stable contract: 0 success, 1 data or convergence
failure, 2 usage/config error.  Runs are declarative: a JSON config
names the dataset, split, models, groups, and sequence settings, and
every run directory gets a config_echo.json that reproduces it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from cyclelife.data import load_dataset, split_dataset, SplitPolicy
from cyclelife.errors import (
    CycleLifeError,
    DatasetValidationError,
    MissingChannel,
    MissingManifest,
    NumericalDivergence,
    SchemaVersionMismatch,
    SpecError,
    UnsupportedFormat,
)
from cyclelife.features import FEATURE_GROUPS, FEATURE_NAMES, extract_features
from cyclelife.models import DISPLAY_NAMES, MODEL_KINDS, RegressorSpec
from cyclelife.models.serialize import encode_arrays
from cyclelife import evaluation
from cyclelife.rng import derive_seed
from cyclelife.seq import (
    DEFAULT_UNIVARIATE,
    SequenceModelSpec,
    TrainRun,
    build_series,
    history_csv,
    train_sequence,
)

USAGE_ERRORS = (SpecError, MissingManifest, SchemaVersionMismatch, UnsupportedFormat, MissingChannel)

_TOP_KEYS = {"dataset", "output_dir", "seed", "repeats", "split", "groups", "models", "sequence"}
_SPLIT_KEYS = {"kind", "test_fraction", "seed"}
_MODEL_KEYS = {"kind", "hyperparams", "seed", "standardize_inputs"}
_SEQ_KEYS = {
    "cell_kinds",
    "hidden_sizes",
    "attention",
    "channels",
    "epochs",
    "batch_size",
    "learning_rate",
    "normalized_targets",
    "clip_norm",
}


def _reject_unknown(d, allowed, where):
    unknown = set(d) - allowed
    if unknown:
        raise SpecError(f"unknown {where} keys: {sorted(unknown)}")


def _require_bool(value, where):
    # bool() would turn containers like [false] into True — reject instead.
    if not isinstance(value, bool):
        raise SpecError(f"{where} must be true or false, got {value!r}")
    return value


def load_config(path, seed_override=None, out_override=None) -> dict:
    """Read and fully validate a run config; returns the resolved form."""
    p = Path(path)
    if not p.is_file():
        raise SpecError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise SpecError(f"config is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise SpecError("config must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "config")

    if "dataset" not in raw:
        raise SpecError("config needs a 'dataset' path")
    seed = int(seed_override if seed_override is not None else raw.get("seed", 0))
    repeats = int(raw.get("repeats", 5))
    if repeats < 1:
        raise SpecError("repeats must be >= 1")

    split_raw = raw.get("split", {})
    _reject_unknown(split_raw, _SPLIT_KEYS, "split")
    split = {
        "kind": split_raw.get("kind", "random_fraction"),
        "test_fraction": float(split_raw.get("test_fraction", 0.2)),
        "seed": int(split_raw.get("seed", seed)),
    }
    SplitPolicy(split["kind"], split["test_fraction"], split["seed"])  # validates

    groups = list(raw.get("groups", list(FEATURE_GROUPS)))
    for g in groups:
        if g not in FEATURE_GROUPS:
            raise SpecError(f"unknown feature group {g!r}")

    models_raw = raw.get("models", list(MODEL_KINDS))
    models = []
    for entry in models_raw:
        if isinstance(entry, str):
            entry = {"kind": entry}
        _reject_unknown(entry, _MODEL_KEYS, "model")
        if "kind" not in entry:
            raise SpecError("every model entry needs a 'kind'")
        models.append(
            {
                "kind": entry["kind"],
                "hyperparams": dict(entry.get("hyperparams", {})),
                "seed": int(entry.get("seed", seed)),
                "standardize_inputs": entry.get("standardize_inputs"),
            }
        )

    seq = None
    if "sequence" in raw:
        s = raw["sequence"]
        _reject_unknown(s, _SEQ_KEYS, "sequence")
        seq = {
            "cell_kinds": list(s.get("cell_kinds", ["LSTM"])),
            "hidden_sizes": [int(h) for h in s.get("hidden_sizes", [64])],
            "attention": _require_bool(s.get("attention", False), "sequence.attention"),
            "channels": list(s.get("channels", DEFAULT_UNIVARIATE)),
            "epochs": int(s.get("epochs", 100)),
            "batch_size": int(s.get("batch_size", 16)),
            "learning_rate": float(s.get("learning_rate", 1e-3)),
            "normalized_targets": _require_bool(
                s.get("normalized_targets", False), "sequence.normalized_targets"
            ),
            "clip_norm": float(s.get("clip_norm", 0.0)),
        }

    config = {
        "dataset": str(raw["dataset"]),
        "output_dir": str(out_override if out_override is not None else raw.get("output_dir", "runs/latest")),
        "seed": seed,
        "repeats": repeats,
        "split": split,
        "groups": groups,
        "models": models,
        "sequence": seq,
    }
    # Instantiating every spec validates hyperparameters up front.
    for m in models:
        RegressorSpec(m["kind"], m["hyperparams"], m["seed"], m["standardize_inputs"])
    if seq:
        for kind in seq["cell_kinds"]:
            SequenceModelSpec(kind, seq["hidden_sizes"][0], seq["attention"], len(seq["channels"]), seed)
    return config


def _echo_config(config, out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    echo = {k: v for k, v in config.items()}
    (out_dir / "config_echo.json").write_text(
        json.dumps(echo, indent=2, sort_keys=True) + "\n"
    )


def cmd_validate(args) -> int:
    try:
        ds = load_dataset(args.dataset)
    except DatasetValidationError as e:
        for failure in e.failures:
            print(failure)
        return 1
    print(f"ok: {len(ds.cells)} cells, grid {ds.grid.points} points")
    return 0


def cmd_features(args) -> int:
    ds = load_dataset(args.dataset)
    out = Path(args.out or "features.csv")
    lines = ["cell_id," + ",".join(FEATURE_NAMES) + ",cycle_life"]
    for cell in ds.cells:
        fv = extract_features(cell)
        lines.append(
            fv.cell_id
            + ","
            + ",".join(repr(float(v)) for v in fv.values)
            + f",{fv.cycle_life}"
        )
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(ds.cells)} cells)")
    return 0


def cmd_benchmark(args) -> int:
    config = load_config(args.config, args.seed, args.out)
    ds = load_dataset(config["dataset"])
    specs = [
        RegressorSpec(m["kind"], m["hyperparams"], m["seed"], m["standardize_inputs"])
        for m in config["models"]
    ]
    policy = SplitPolicy(
        config["split"]["kind"], config["split"]["test_fraction"], config["split"]["seed"]
    )
    report = evaluation.run_benchmark(
        ds, specs, config["groups"], config["repeats"], policy, jobs=args.jobs
    )
    rendered = evaluation.render_report(report, ["markdown", "csv", "svg_scatter"])
    out_dir = Path(config["output_dir"])
    _echo_config(config, out_dir)
    (out_dir / "report.md").write_text(rendered["markdown"])
    (out_dir / "report.csv").write_text(rendered["csv"])
    plots = out_dir / "plots"
    plots.mkdir(parents=True, exist_ok=True)
    for name, svg in rendered["svg_scatter"].items():
        (plots / name).write_text(svg)
    print(rendered["markdown"], end="")
    if report.failures:
        print(f"\n{len(report.failures)} grid cell(s) failed; see report.csv", file=sys.stderr)
    return 0


def _seq_file_stem(kind, hidden, attention):
    return f"seq_{kind}_h{hidden}" + ("_att" if attention else "")


def cmd_train_seq(args) -> int:
    config = load_config(args.config, args.seed, args.out)
    if not config["sequence"]:
        raise SpecError("config has no 'sequence' section")
    seq = config["sequence"]
    ds = load_dataset(config["dataset"])
    policy = SplitPolicy(
        config["split"]["kind"], config["split"]["test_fraction"], config["split"]["seed"]
    )
    train_ds, val_ds = split_dataset(ds, policy)
    train_samples, stats = build_series(train_ds, seq["channels"])
    val_samples, _ = build_series(val_ds, seq["channels"], stats)
    out_dir = Path(config["output_dir"])
    _echo_config(config, out_dir)

    exit_code = 0
    for kind in seq["cell_kinds"]:
        for hidden in seq["hidden_sizes"]:
            spec = SequenceModelSpec(
                cell_kind=kind,
                hidden_size=hidden,
                attention=seq["attention"],
                input_channels=len(seq["channels"]),
                seed=derive_seed(config["seed"], hidden),
            )
            run = TrainRun(
                epochs=seq["epochs"],
                batch_size=seq["batch_size"],
                learning_rate=seq["learning_rate"],
                clip_norm=seq["clip_norm"],
                normalized_targets=seq["normalized_targets"],
            )
            stem = _seq_file_stem(kind, hidden, seq["attention"])
            try:
                params, run = train_sequence(spec, train_samples, run, val_samples)
            except NumericalDivergence as e:
                (out_dir / f"{stem}.csv").write_text(history_csv(e.history))
                print(f"{stem}: diverged — partial history saved", file=sys.stderr)
                exit_code = 1
                continue
            (out_dir / f"{stem}.csv").write_text(history_csv(run.history))
            doc = {
                "format": "cyclelife-seq/1",
                "spec": {
                    "cell_kind": spec.cell_kind,
                    "hidden_size": spec.hidden_size,
                    "attention": spec.attention,
                    "input_channels": spec.input_channels,
                    "seed": spec.seed,
                },
                "channels": list(stats.channels),
                "channel_mean": encode_arrays(stats.mean),
                "channel_std": encode_arrays(stats.std),
                "params": encode_arrays(params),
            }
            (out_dir / f"{stem}.json").write_text(json.dumps(doc, indent=1) + "\n")
            last = run.history[-1]
            print(
                f"{stem}: epoch {last['epoch']} mse {last['mse']:.1f} "
                f"mape {last['mape']:.2f}% (val mape {last['val_mape']:.2f}%)"
            )
    return exit_code


def cmd_report(args) -> int:
    """Re-render the markdown table from a run's report.csv."""
    path = Path(args.run)
    csv_path = path / "report.csv" if path.is_dir() else path
    if not csv_path.is_file():
        raise SpecError(f"no report.csv at {csv_path}")
    parsed = evaluation.parse_report_csv(csv_path.read_text())
    models = list(dict.fromkeys(k for k, _ in parsed))
    groups = list(dict.fromkeys(g for _, g in parsed))
    header = ["Model"] + [g.capitalize() for g in groups]
    print("| " + " | ".join(header) + " |")
    print("| " + " | ".join("---" for _ in header) + " |")
    for kind in models:
        row = [DISPLAY_NAMES.get(kind, kind)]
        for g in groups:
            cell = parsed.get((kind, g))
            if cell is None or cell["error"]:
                row.append("failed")
            else:
                mean, std = cell["metrics"]["mape"]
                row.append(f"{mean:.2f}" if std is None else f"{mean:.2f} ± {std:.2f}")
        print("| " + " | ".join(row) + " |")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run config JSON")
    common.add_argument("--out", help="output directory/file override")
    common.add_argument("--seed", type=int, help="global seed override")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers")

    parser = argparse.ArgumentParser(
        prog="cyclelife",
        description="Early-cycle battery cycle-life prediction benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a dataset directory")
    p.add_argument("dataset")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("features", parents=[common], help="extract the 11 features to CSV")
    p.add_argument("dataset")
    p.set_defaults(fn=cmd_features)

    p = sub.add_parser("benchmark", parents=[common], help="run the model x group grid")
    p.set_defaults(fn=cmd_benchmark)

    p = sub.add_parser("train-seq", parents=[common], help="train recurrent models")
    p.set_defaults(fn=cmd_train_seq)

    p = sub.add_parser("report", parents=[common], help="render a saved report.csv")
    p.add_argument("run", help="run directory or report.csv path")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("benchmark", "train-seq") and not args.config:
        parser.error(f"{args.command} requires --config")
    try:
        return args.fn(args)
    except USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NumericalDivergence as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except DatasetValidationError as e:
        for failure in e.failures:
            print(failure)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CycleLifeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
