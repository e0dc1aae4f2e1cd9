"""CSV interchange for observation matrices and experiment records.

Floats are written with 17 significant digits so that a write/read cycle
reproduces every binary64 value exactly.
"""
from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass, fields

import numpy as np

from .errors import DimensionError, ParseError

LAYOUTS = ("rows-are-time",)


@dataclass(frozen=True)
class ObservationMatrix:
    """Time-ordered sample; row ``t`` is the observation at time ``t``."""

    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionError(f"observations must be a 2-d array, got ndim={values.ndim}")
        n, p = values.shape
        if n < 2 or p < 1:
            raise DimensionError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if not np.isfinite(values).all():
            raise DimensionError("observations contain NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]


def as_array(X):
    """Validated float array view of an ObservationMatrix or array-like."""
    if isinstance(X, ObservationMatrix):
        return X.values
    return ObservationMatrix(X).values


def format_float(x):
    return format(float(x), ".17g")


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_matrix(path, layout="rows-are-time"):
    """Read a numeric CSV into an :class:`ObservationMatrix`.

    A first row containing any non-numeric cell is treated as a header.
    """
    if layout not in LAYOUTS:
        raise ValueError(f"unsupported layout {layout!r}")
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if rows and not all(_is_number(c) for c in rows[0]):
        start = 1
    else:
        start = 0
    width = None
    data = []
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(
                f"row {lineno} has {len(row)} cells, expected {width}", row=lineno
            )
        parsed = []
        for cell in row:
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric cell {cell!r} in row {lineno}", row=lineno, cell=cell)
            if not math.isfinite(value):
                raise ParseError(f"non-finite cell {cell!r} in row {lineno}", row=lineno, cell=cell)
            parsed.append(value)
        data.append(parsed)
    if len(data) < 2:
        raise DimensionError(f"need at least 2 observations, found {len(data)}")
    return ObservationMatrix(np.array(data, dtype=float))


def save_matrix(X, path, header=None):
    """Write observations as CSV, one time point per line."""
    values = as_array(X)
    with open(path, "w", newline="") as fh:
        if header is not None:
            fh.write(",".join(header) + "\n")
        for row in values:
            fh.write(",".join(format_float(v) for v in row) + "\n")


@dataclass(frozen=True)
class ExperimentRecord:
    """Outcome of one statistic on one simulated replicate."""

    scenario: str
    n: int
    p: int
    M: int
    replicate: int
    statistic: str
    value: float
    p_value: float
    reject: bool


RECORD_COLUMNS = tuple(f.name for f in fields(ExperimentRecord))


def _format_record(rec):
    out = []
    for name, v in zip(RECORD_COLUMNS, astuple(rec)):
        if name == "reject":
            out.append("1" if v else "0")
        elif isinstance(v, float):
            out.append(format_float(v))
        else:
            out.append(str(v))
    return out


def save_results(results, path):
    """Write experiment records with a fixed column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RECORD_COLUMNS)
        for rec in results:
            writer.writerow(_format_record(rec))


def load_results(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RECORD_COLUMNS:
            raise ParseError(f"unexpected results header {header}", row=1)
        records = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(RECORD_COLUMNS):
                raise ParseError(f"row {lineno} has {len(row)} cells", row=lineno)
            try:
                records.append(
                    ExperimentRecord(
                        scenario=row[0],
                        n=int(row[1]),
                        p=int(row[2]),
                        M=int(row[3]),
                        replicate=int(row[4]),
                        statistic=row[5],
                        value=float(row[6]),
                        p_value=float(row[7]),
                        reject=row[8] == "1",
                    )
                )
            except ValueError as exc:
                raise ParseError(f"bad value in row {lineno}: {exc}", row=lineno)
    return records
