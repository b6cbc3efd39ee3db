"""JSON and CSV artifacts with a metadata header."""
from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from ._version import __version__

SCHEMA_VERSION = "1.0"


def _clean(obj):
    # NaN/inf are not valid JSON; write them as strings
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _restore(obj):
    if isinstance(obj, dict):
        return {k: _restore(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_restore(v) for v in obj]
    if obj in ("nan", "inf", "-inf"):
        return float(obj)
    return obj


def envelope(kind: str, config: dict, data) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "kind": kind,
        "config": _clean(config),
        "data": _clean(data),
    }


def _open(path):
    if path is None or str(path) == "-":
        return None
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p.open("w", newline="")


def write_json(path, kind: str, config: dict, data) -> dict:
    doc = envelope(kind, config, data)
    text = json.dumps(doc, indent=2, sort_keys=False)
    fh = _open(path)
    if fh is None:
        sys.stdout.write(text + "\n")
    else:
        with fh:
            fh.write(text + "\n")
    return doc


def read_json(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if "schema_version" not in doc:
        raise ValueError(f"{path}: missing schema_version")
    return _restore(doc)


def write_csv(path, kind: str, config: dict, rows: list[dict], summary: dict | None = None) -> None:
    """CSV with ``#``-prefixed header lines carrying schema, version and config."""
    fh = _open(path)
    out = sys.stdout if fh is None else fh
    try:
        out.write(f"# schema_version: {SCHEMA_VERSION}\n")
        out.write(f"# version: {__version__}\n")
        out.write(f"# kind: {kind}\n")
        out.write(f"# config: {json.dumps(_clean(config))}\n")
        if summary is not None:
            out.write(f"# summary: {json.dumps(_clean(summary))}\n")
        if rows:
            w = csv.DictWriter(out, fieldnames=list(rows[0].keys()), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for k, v in r.items()})
    finally:
        if fh is not None:
            fh.close()


def read_csv(path) -> tuple[dict, list[dict]]:
    """Return ``(header, rows)``; numeric cells are converted to float."""
    header, body = {}, []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(": ")
                header[key] = json.loads(val) if key in ("config", "summary") else val
            else:
                body.append(line)
    rows = []
    for r in csv.DictReader(body):
        conv = {}
        for k, v in r.items():
            try:
                conv[k] = float(v)
            except (TypeError, ValueError):
                conv[k] = v
        rows.append(conv)
    return header, rows
