"""Deterministic CSV and JSON serialization of report rows."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def _scalar(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def flatten_row(row: dict) -> dict:
    """Expand complex vectors into <name>_re<j>/<name>_im<j> columns."""
    out = {}
    for key, val in row.items():
        if isinstance(val, (np.ndarray, list, tuple)) and np.iscomplexobj(np.asarray(val)):
            arr = np.asarray(val, dtype=complex).ravel()
            for j, c in enumerate(arr, start=1):
                out[f"{key}_re{j}"] = float(c.real)
                out[f"{key}_im{j}"] = float(c.imag)
        elif isinstance(val, (complex, np.complexfloating)):
            out[f"{key}_re"] = float(np.real(val))
            out[f"{key}_im"] = float(np.imag(val))
        else:
            out[key] = _scalar(val)
    return out


def _cell(x):
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def rows_to_csv(rows: list, schema: str) -> str:
    """CSV text with a versioned schema comment line; float cells use repr."""
    flat = [flatten_row(r) for r in rows]
    columns = []
    for r in flat:
        for k in r:
            if k not in columns:
                columns.append(k)
    buf = io.StringIO()
    buf.write(f"# schema: invdist.{schema}.v{SCHEMA_VERSION}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in flat:
        writer.writerow([_cell(r.get(c, "")) for c in columns])
    return buf.getvalue()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(float(np.real(x))), _jsonable(float(np.imag(x)))]
    x = _scalar(x)
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_report(out_dir, name: str, rows: list, summary: dict) -> tuple:
    """Write <name>.csv and <name>.json into out_dir; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{name}.csv"
    json_path = out / f"{name}.json"
    csv_path.write_text(rows_to_csv(rows, name))
    json_path.write_text(to_json(summary))
    return csv_path, json_path


__all__ = ["rows_to_csv", "to_json", "write_report", "flatten_row", "SCHEMA_VERSION"]
