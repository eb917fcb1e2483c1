"""Delimited-text export of time series with plain-text metadata sidecars.

Every table is one row per time sample: the time first, then the per-site
or per-mode values.  Numbers are written with %.17g so a re-import
reproduces the float64 values bit for bit; given identical inputs the
files are byte-stable on a given platform.
"""

from __future__ import annotations

import configparser
from pathlib import Path

import numpy as np

__all__ = [
    "export_table",
    "import_table",
    "read_metadata",
    "write_report",
    "read_report",
]

_FMT = "%.17g"


def export_table(
    path: str | Path,
    times: np.ndarray,
    values: np.ndarray,
    columns: list[str] | None = None,
    metadata: dict | None = None,
) -> Path:
    """Write a (time, values...) table plus a key-value sidecar.

    values may be 1-D (single column) or 2-D with one row per sample.  The
    sidecar lands next to the table as <name>.meta and records the column
    layout plus any caller-supplied metadata.
    """
    path = Path(path)
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] != times.size:
        raise ValueError(f"row count mismatch: {times.size} times vs {values.shape[0]} rows")
    table = np.column_stack([times, values])
    try:
        np.savetxt(path, table, fmt=_FMT, delimiter="\t")
    except OSError as exc:
        raise OSError(f"failed to write {path}: {exc}") from exc

    meta = {"rows": str(times.size), "columns": str(1 + values.shape[1]), "column_0": "time"}
    if columns is not None:
        if len(columns) != values.shape[1]:
            raise ValueError("column label count does not match the value columns")
        for i, name in enumerate(columns):
            meta[f"column_{i + 1}"] = name
    if metadata:
        meta.update({str(k): str(v) for k, v in metadata.items()})
    sidecar = path.with_suffix(path.suffix + ".meta")
    with open(sidecar, "w") as fh:
        for k, v in meta.items():
            fh.write(f"{k} = {v}\n")
    return path


def import_table(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a table written by export_table; returns (times, values)."""
    data = np.loadtxt(path, delimiter="\t", ndmin=2)
    return data[:, 0], data[:, 1:]


def read_metadata(path: str | Path) -> dict[str, str]:
    """Parse a sidecar written by export_table."""
    meta = {}
    for line in Path(path).read_text().splitlines():
        if "=" in line:
            k, _, v = line.partition("=")
            meta[k.strip()] = v.strip()
    return meta


def write_report(path: str | Path, sections: dict[str, dict]) -> Path:
    """Write a machine-readable run report as sectioned key-value text."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    for name, entries in sections.items():
        cp[name] = {str(k): str(v) for k, v in entries.items()}
    path = Path(path)
    with open(path, "w") as fh:
        cp.write(fh)
    return path


def read_report(path: str | Path) -> dict[str, dict[str, str]]:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    with open(path) as fh:
        cp.read_file(fh)
    return {name: dict(cp[name]) for name in cp.sections()}
