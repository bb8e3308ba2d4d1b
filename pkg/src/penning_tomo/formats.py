"""JSON / CSV / matrix-text formats for states, measurements, grids and reports.

Every JSON document has ``format`` and ``format_version`` keys at top level.
Complex numbers are stored as ``{"re": ..., "im": ...}`` (arrays as parallel
``re``/``im`` lists). Floats are written with ``repr`` precision, so grids and
seeds round-trip bit-exactly. Files are written atomically.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .analysis import ComparisonReport
from .fock import QuantumState
from .grids import CartesianGrid, WignerGrid, grid_from_dict
from .measurement import OhtRecord, PntRecord

__all__ = [
    "FORMAT_VERSION",
    "atomic_write",
    "state_to_json",
    "state_from_json",
    "measurement_to_json",
    "measurement_from_json",
    "grid_to_json",
    "grid_from_json",
    "grid_to_csv",
    "grid_to_matrix_text",
    "report_to_json",
    "write_json",
    "read_json",
]

FORMAT_VERSION = 1

PathLike = Union[str, os.PathLike]


def atomic_write(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path: PathLike, doc: dict) -> Path:
    return atomic_write(path, json.dumps(doc, indent=1) + "\n")


def read_json(path: PathLike, expected_format: Optional[str] = None) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if expected_format is not None and doc.get("format") != expected_format:
        raise ValueError(f"{path}: expected a {expected_format!r} document, found {doc.get('format')!r}")
    if doc.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format_version {doc.get('format_version')!r}")
    return doc


def _header(kind: str) -> dict:
    return {"format": f"penning-tomo/{kind}", "format_version": FORMAT_VERSION}


def _cplx_list(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def _from_cplx_list(d: dict) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


# -- states ----------------------------------------------------------------

def state_to_json(state: QuantumState, provenance: Optional[dict] = None) -> dict:
    doc = _header("state")
    doc["dim"] = state.dim
    if state.vector is not None:
        doc["amplitudes"] = _cplx_list(state.vector)
    else:
        doc["matrix"] = _cplx_list(state.matrix)
    doc["provenance"] = provenance or {}
    return doc


def state_from_json(doc: dict) -> QuantumState:
    if "amplitudes" in doc:
        return QuantumState.from_vector(_from_cplx_list(doc["amplitudes"]))
    return QuantumState.from_matrix(_from_cplx_list(doc["matrix"]))


# -- measurements ----------------------------------------------------------

def measurement_to_json(records: list, config: Optional[dict] = None, grid: Optional[dict] = None) -> dict:
    if not records:
        raise ValueError("no records to serialize")
    doc = _header("measurement")
    if isinstance(records[0], OhtRecord):
        doc["protocol"] = "OHT"
        doc["records"] = [
            {"phi": r.phi, "seed": r.seed, "efficiency": r.efficiency, "samples": r.samples.tolist()}
            for r in records
        ]
    else:
        doc["protocol"] = "PNT"
        doc["records"] = [
            {
                "E": {"re": r.E.real, "im": r.E.imag},
                "total": r.total,
                "seed": r.seed,
                "efficiency": r.efficiency,
                "counts": {str(n): c for n, c in r.counts.items()},
            }
            for r in records
        ]
    if grid is not None:
        doc["grid"] = grid
    doc["config"] = config or {}
    return doc


def measurement_from_json(doc: dict) -> list:
    if doc["protocol"] == "OHT":
        return [OhtRecord(r["phi"], np.asarray(r["samples"]), int(r["seed"]), r["efficiency"]) for r in doc["records"]]
    if doc["protocol"] == "PNT":
        return [
            PntRecord(
                complex(r["E"]["re"], r["E"]["im"]),
                {int(n): int(c) for n, c in r["counts"].items()},
                int(r["total"]),
                int(r["seed"]),
                r["efficiency"],
            )
            for r in doc["records"]
        ]
    raise ValueError(f"unknown protocol {doc['protocol']!r}")


# -- grids -----------------------------------------------------------------

def grid_to_json(wg: WignerGrid, config: Optional[dict] = None) -> dict:
    doc = _header("wigner-grid")
    doc["grid"] = wg.grid.to_dict()
    doc["values"] = wg.values.tolist()
    doc["stderr"] = None if wg.stderr is None else wg.stderr.tolist()
    doc["meta"] = wg.meta
    doc["config"] = config or {}
    return doc


def grid_from_json(doc: dict) -> WignerGrid:
    stderr = doc.get("stderr")
    return WignerGrid(
        grid_from_dict(doc["grid"]),
        np.asarray(doc["values"], dtype=float),
        dict(doc["meta"]),
        None if stderr is None else np.asarray(stderr, dtype=float),
    )


def grid_to_csv(wg: WignerGrid) -> str:
    pts = wg.points
    cols = ["re", "im", "value"] + (["stderr"] if wg.stderr is not None else [])
    lines = [",".join(cols)]
    for i, E in enumerate(pts):
        row = [repr(float(E.real)), repr(float(E.imag)), repr(float(wg.values[i]))]
        if wg.stderr is not None:
            row.append(repr(float(wg.stderr[i])))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def grid_to_matrix_text(wg: WignerGrid) -> str:
    """Gnuplot ``nonuniform matrix`` block: first row ``N re_1..re_N``, then ``im_j W_j1..W_jN``."""
    if not isinstance(wg.grid, CartesianGrid):
        raise TypeError("matrix export needs a Cartesian grid")
    m = wg.as_matrix()
    re, im = wg.grid.re_axis, wg.grid.im_axis
    lines = [" ".join([str(re.size)] + [f"{v:.10g}" for v in re])]
    for j, y in enumerate(im):
        lines.append(" ".join([f"{y:.10g}"] + [f"{v:.10g}" for v in m[j]]))
    return "\n".join(lines) + "\n"


def report_to_json(report: ComparisonReport, extra: Optional[dict[str, Any]] = None) -> dict:
    doc = _header("comparison")
    doc.update(report.to_dict())
    doc.update(extra or {})
    return doc
