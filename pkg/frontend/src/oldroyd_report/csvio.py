"""Reader for the simulator's CSV time-series schema.

Deliberately independent of the simulator package: this component consumes
the documented file formats only.  Required header::

    t,E_inf,E_1,h3_u,h3_tau,h3_n,h3_eta,l2_n,l2_u,l2_tau,
    mass,momentum_x,momentum_y[,momentum_z],tau_min[,...extra columns]
"""

from __future__ import annotations

import numpy as np


class SchemaError(ValueError):
    """The file does not match the documented series schema."""


BASE_COLUMNS_2D = [
    "t", "E_inf", "E_1", "h3_u", "h3_tau", "h3_n", "h3_eta",
    "l2_n", "l2_u", "l2_tau", "mass", "momentum_x", "momentum_y", "tau_min",
]


def required_columns(dim: int) -> list[str]:
    cols = list(BASE_COLUMNS_2D)
    if dim == 3:
        cols.insert(cols.index("tau_min"), "momentum_z")
    return cols


def read_series(path) -> dict[str, np.ndarray]:
    """Parse a series CSV into named float columns; schema-checked."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise SchemaError(f"{path}: empty file")
        cols = header.split(",")
        dim = 3 if "momentum_z" in cols else 2
        missing = [c for c in required_columns(dim) if c not in cols]
        if missing:
            raise SchemaError(f"{path}: missing required column(s) {missing}")
        data: list[list[float]] = [[] for _ in cols]
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise SchemaError(
                    f"{path}:{line_no}: expected {len(cols)} fields, got {len(parts)}"
                )
            try:
                for i, part in enumerate(parts):
                    data[i].append(float(part))
            except ValueError:
                raise SchemaError(f"{path}:{line_no}: non-numeric field") from None
    if not data[0]:
        raise SchemaError(f"{path}: no data rows")
    return {c: np.asarray(v) for c, v in zip(cols, data)}


def column_sum(columns: dict[str, np.ndarray], expr: str) -> np.ndarray:
    """A column name or a '+'-joined sum of column names."""
    parts = [p.strip() for p in expr.split("+")]
    missing = [p for p in parts if p not in columns]
    if missing:
        raise SchemaError(f"unknown column(s) {missing} in expression {expr!r}")
    out = columns[parts[0]].astype(float).copy()
    for p in parts[1:]:
        out = out + columns[p]
    return out
