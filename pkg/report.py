#!/usr/bin/env python3
# Copyright (c) 2026 Mark Menkhus <mark.menkhus@gmail.com>
# SPDX-License-Identifier: MIT
"""
report.py - Column statistics and atomic CSV/JSON artifact writers

Every artifact carries a metadata block {seed, mode, version, config}:
JSON artifacts under the "metadata" key, CSV artifacts as a single
leading comment line "# quadlab {json}". Nothing time-dependent is
written, so the same configuration and seed give byte-identical files.

CSV schemas:
    profile     distance,count
    two_point   n,seed,value
    checks      check,ok,detail
    dimension   center,radius,volume,slope
    stats       column,n,mean,std,stderr,min,max,median,q1,q3,ci_95_low,ci_95_high

Usage:
    from report import write_report, artifact_metadata

    meta = artifact_metadata(config.to_dict(), seed=7, mode="exact")
    write_report({"schema": "profile", "rows": rows, "metadata": meta}, "csv", Path("p.csv"))
"""

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from scipy import stats

from settings import __version__

SCHEMAS: Dict[str, List[str]] = {
    "profile": ["distance", "count"],
    "two_point": ["n", "seed", "value"],
    "checks": ["check", "ok", "detail"],
    "dimension": ["center", "radius", "volume", "slope"],
    "stats": ["column", "n", "mean", "std", "stderr", "min", "max",
              "median", "q1", "q3", "ci_95_low", "ci_95_high"],
}

CSV_META_PREFIX = "# quadlab "


def artifact_metadata(config: dict, seed: Optional[int], mode: Optional[str]) -> dict:
    return {"seed": seed, "mode": mode, "version": __version__, "config": config}


# ============================================================================
# STATISTICS
# ============================================================================

def compute_column_stats(rows: list, column: str) -> dict:
    """
    Descriptive statistics for a numeric column; non-numeric cells are skipped.

    Quartiles use linear interpolation; the 95% interval is Student's t
    around the mean.
    """
    cells = [row.get(column) for row in rows]
    arr = np.asarray([v for v in cells if isinstance(v, (int, float, np.number)) and not isinstance(v, bool)],
                     dtype=np.float64)
    if not arr.size:
        return {"column": column, "n": 0}

    n = int(arr.size)
    mean = float(arr.mean())
    q1, median, q3 = (float(q) for q in np.quantile(arr, [0.25, 0.5, 0.75]))
    out = {"column": column, "n": n, "mean": mean, "min": float(arr.min()), "max": float(arr.max()),
           "median": median, "q1": q1, "q3": q3, "std": 0.0, "stderr": 0.0,
           "ci_95_low": mean, "ci_95_high": mean}
    if n > 1:
        out["std"] = float(arr.std(ddof=1))
        out["stderr"] = float(stats.sem(arr))
        if out["stderr"] > 0:
            low, high = stats.t.interval(0.95, n - 1, loc=mean, scale=out["stderr"])
            out["ci_95_low"], out["ci_95_high"] = float(low), float(high)
    return out


# ============================================================================
# WRITERS
# ============================================================================

def _atomic_write(path: Path, text: str) -> None:
    """Write text (UTF-8) via a temp file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}-", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(temp_path, path)
    except:
        os.unlink(temp_path)
        raise


def render_csv(rows: List[dict], fieldnames: List[str], metadata: Optional[dict] = None) -> str:
    buf = io.StringIO()
    if metadata is not None:
        buf.write(CSV_META_PREFIX + json.dumps(metadata, sort_keys=True) + "\n")
    writer = csv.DictWriter(buf, fieldnames=fieldnames, extrasaction='ignore', lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def render_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def write_csv(path: Path, rows: List[dict], fieldnames: List[str], metadata: Optional[dict] = None) -> Path:
    _atomic_write(path, render_csv(rows, fieldnames, metadata))
    return Path(path)


def write_json(path: Path, data: dict) -> Path:
    _atomic_write(path, render_json(data))
    return Path(path)


def read_csv(path: Path) -> List[dict]:
    """Rows of a CSV artifact, skipping the metadata comment line."""
    with open(path, encoding="utf-8", newline="") as f:
        lines = [line for line in f if not line.startswith(CSV_META_PREFIX)]
    return list(csv.DictReader(lines))


def write_report(results: dict, fmt: str, path: Path) -> Path:
    """
    Write a results bundle as CSV or JSON.

    results holds "metadata" and either "rows" with a "schema" name from
    SCHEMAS (CSV or JSON) or any other JSON-serialisable keys (JSON only).
    """
    if fmt == "csv":
        schema = results.get("schema")
        if schema not in SCHEMAS:
            raise ValueError(f"no CSV schema for results of kind {schema!r}")
        return write_csv(path, results.get("rows", []), SCHEMAS[schema], results.get("metadata"))
    if fmt == "json":
        return write_json(path, results)
    raise ValueError(f"unknown report format {fmt!r}")
