"""JSON system configs and CSV exports.

Config layout (indices are 1-based)::

    {
      "name": "quadratic example",
      "dim": 2,
      "tensors": [
        {"order": 2, "dense": [[0.1, 0.1], [0.1, 0.1]]},
        {"order": 3, "fill": 1.0,
         "entries": [{"idx": [1, 1, 2], "value": 0.5}, ...]}
      ],
      "constant": [0.0, 0.0],          # optional
      "metadata": {...}                # optional, free-form
    }

A tensor is given either densely (nested lists) or as a sparse list of
entries on top of a uniform ``fill`` value (default 0).
"""

from __future__ import annotations

import csv
import io
import json
import math
from numbers import Real

import numpy as np

from .errors import InputError
from .tensor_core import PolySystem, Tensor

_TOP_KEYS = {"name", "dim", "tensors", "constant", "metadata"}
_TENSOR_KEYS = {"order", "dense", "entries", "fill"}


class ConfigError(InputError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _number(v, path):
    if isinstance(v, bool) or not isinstance(v, Real) or not math.isfinite(v):
        raise ConfigError(path, f"expected a finite number, got {v!r}")
    return float(v)


def _parse_tensor(spec, n, path):
    if not isinstance(spec, dict):
        raise ConfigError(path, "tensor must be an object")
    unknown = set(spec) - _TENSOR_KEYS
    if unknown:
        raise ConfigError(path, f"unknown keys {sorted(unknown)}")
    k = spec.get("order")
    if not _is_int(k) or k < 2:
        raise ConfigError(f"{path}.order", f"expected an integer >= 2, got {k!r}")
    if "dense" in spec:
        if "entries" in spec or "fill" in spec:
            raise ConfigError(path, "'dense' cannot be combined with 'entries' or 'fill'")
        try:
            arr = np.array(spec["dense"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}.dense", f"not a numeric array ({exc})") from None
        if arr.shape != (n,) * k:
            raise ConfigError(f"{path}.dense", f"expected shape {(n,) * k}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ConfigError(f"{path}.dense", "entries must be finite")
        return k, Tensor(arr)

    fill = _number(spec.get("fill", 0.0), f"{path}.fill")
    arr = np.full((n,) * k, fill)
    entries = spec.get("entries", [])
    if not isinstance(entries, list):
        raise ConfigError(f"{path}.entries", "expected a list")
    seen = set()
    for e, entry in enumerate(entries):
        epath = f"{path}.entries[{e}]"
        if not isinstance(entry, dict) or set(entry) != {"idx", "value"}:
            raise ConfigError(epath, "expected an object with exactly 'idx' and 'value'")
        idx = entry["idx"]
        if not isinstance(idx, list) or len(idx) != k or not all(_is_int(i) for i in idx):
            raise ConfigError(f"{epath}.idx", f"expected {k} integers, got {idx!r}")
        if any(i < 1 or i > n for i in idx):
            raise ConfigError(f"{epath}.idx", f"index {idx} outside [1, {n}]")
        key = tuple(idx)
        if key in seen:
            raise ConfigError(f"{epath}.idx", f"duplicate index {idx}")
        seen.add(key)
        arr[tuple(i - 1 for i in idx)] = _number(entry["value"], f"{epath}.value")
    return k, Tensor(arr)


def system_from_dict(doc) -> PolySystem:
    if not isinstance(doc, dict):
        raise ConfigError("$", "config must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError("$", f"unknown keys {sorted(unknown)}")
    n = doc.get("dim")
    if not _is_int(n) or n < 1:
        raise ConfigError("dim", f"expected a positive integer, got {n!r}")
    specs = doc.get("tensors")
    if not isinstance(specs, list) or not specs:
        raise ConfigError("tensors", "expected a non-empty list")
    tensors = {}
    for t, spec in enumerate(specs):
        k, T = _parse_tensor(spec, n, f"tensors[{t}]")
        if k in tensors:
            raise ConfigError(f"tensors[{t}].order", f"order {k} given twice")
        tensors[k] = T
    constant = doc.get("constant")
    if constant is not None:
        if not isinstance(constant, list) or len(constant) != n:
            raise ConfigError("constant", f"expected a list of {n} numbers")
        constant = [_number(v, f"constant[{i}]") for i, v in enumerate(constant)]
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("name", "expected a string")
    return PolySystem(n, tensors, constant, name)


def parse_system_config(text: str) -> PolySystem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON ({exc})") from None
    return system_from_dict(doc)


def load_system(path) -> PolySystem:
    with open(path) as fh:
        return parse_system_config(fh.read())


def tensor_to_dict(T: Tensor) -> dict:
    """Sparse entries when at most half the tensor is nonzero, dense otherwise."""
    nz = np.argwhere(T.data != 0)
    if len(nz) > T.data.size // 2:
        return {"order": T.order, "dense": T.data.tolist()}
    entries = [{"idx": [int(i) + 1 for i in idx], "value": float(T.data[tuple(idx)])} for idx in nz]
    return {"order": T.order, "entries": entries}


def system_to_dict(sys: PolySystem, metadata=None) -> dict:
    doc = {"name": sys.name, "dim": sys.dim, "tensors": [tensor_to_dict(T) for T in sys.tensors.values()]}
    if sys.constant is not None:
        doc["constant"] = [float(v) for v in sys.constant]
    if metadata:
        doc["metadata"] = metadata
    return doc


def dump_json(doc) -> str:
    # float repr is the shortest string that round-trips exactly
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trajectory_csv(traj, V=None) -> str:
    """Columns ``t, x_1..x_n`` and ``V`` when a Lyapunov trace is given."""
    n = traj.states.shape[1]
    header = ["t"] + [f"x_{j + 1}" for j in range(n)] + (["V"] if V is not None else [])
    rows = []
    for t, x in enumerate(traj.states):
        row = [str(t)] + [fmt(v) for v in x]
        if V is not None:
            row.append(fmt(V[t]))
        rows.append(row)
    return _csv_text(header, rows)


def region_csv(sample) -> str:
    """Columns ``x0_1..x0_n, label``."""
    n = sample.grid.shape[1]
    header = [f"x0_{j + 1}" for j in range(n)] + ["label"]
    rows = [[fmt(v) for v in x] + [getattr(lab, "value", lab)] for x, lab in zip(sample.grid, sample.labels)]
    return _csv_text(header, rows)
