"""Versioned text serialization for trained models.

The carrier is JSON with arrays stored as tagged objects
({"__array__": dtype, "shape": [...], "data": [...]}).  Python's float
repr round-trips IEEE doubles exactly, so a load restores bit-identical
predictions.  The format tag is checked on read; this is a private
format, not an interchange one.
"""

from __future__ import annotations

import json

import numpy as np

from cyclelife.errors import UnsupportedFormat
from cyclelife.models.base import TrainedRegressor

FORMAT_TAG = "cyclelife-model/1"

_DTYPES = {"f8": np.float64, "i8": np.int64, "b1": np.bool_}


def _encode(obj):
    if isinstance(obj, np.ndarray):
        code = obj.dtype.str.lstrip("<>|=")
        if code not in _DTYPES:
            raise UnsupportedFormat(f"cannot serialize array dtype {obj.dtype}")
        return {
            "__array__": code,
            "shape": list(obj.shape),
            "data": obj.ravel().tolist(),
        }
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    raise UnsupportedFormat(f"cannot serialize {type(obj).__name__}")


def _decode(obj):
    if isinstance(obj, dict):
        if "__array__" in obj:
            arr = np.array(obj["data"], dtype=_DTYPES[obj["__array__"]])
            return arr.reshape(obj["shape"])
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    return obj


# The tagged-array encoding is reused by other persistence surfaces
# (sequence model files); these are the public names for it.
encode_arrays = _encode
decode_arrays = _decode


def to_text(model: TrainedRegressor) -> str:
    doc = {
        "format": FORMAT_TAG,
        "kind": model.kind,
        "params": _encode(model.params),
        "seed": model.seed,
        "n_features": model.n_features,
        "scaler_mean": _encode(model.scaler_mean) if model.scaler_mean is not None else None,
        "scaler_scale": _encode(model.scaler_scale) if model.scaler_scale is not None else None,
        "payload": _encode(model.payload),
        "diagnostics": _encode(model.diagnostics),
    }
    return json.dumps(doc, indent=1)


def from_text(text: str) -> TrainedRegressor:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise UnsupportedFormat(f"not a serialized model: {e}") from e
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_TAG:
        raise UnsupportedFormat(
            f"expected format tag {FORMAT_TAG!r}, got {doc.get('format')!r}"
        )
    return TrainedRegressor(
        kind=doc["kind"],
        params=_decode(doc["params"]),
        seed=int(doc["seed"]),
        n_features=int(doc["n_features"]),
        scaler_mean=_decode(doc["scaler_mean"]) if doc["scaler_mean"] is not None else None,
        scaler_scale=_decode(doc["scaler_scale"]) if doc["scaler_scale"] is not None else None,
        payload=_decode(doc["payload"]),
        diagnostics=_decode(doc["diagnostics"]),
    )


def save_model(model: TrainedRegressor, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_text(model) + "\n")


def load_model(path) -> TrainedRegressor:
    with open(path) as fh:
        return from_text(fh.read())
