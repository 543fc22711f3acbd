"""Core series types, CSV ingestion, validation, and centering.

The observation container is a plain T x d float matrix with optional column
labels and row timestamps. CSV dialect is fixed: comma separated, first row
(after ``skip_rows``) is the header, '.' decimal separator, UTF-8. Missing
values are rejected, never imputed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import MissingColumn, NonFinite, NonNumericCell, TooShort

__all__ = [
    "MultivariateSeries",
    "CenteredSeries",
    "IngestConfig",
    "Finding",
    "ValidationReport",
    "load_csv",
    "write_csv",
    "center",
    "validate",
]

# cap on findings collected by validate(); keeps reports on pathological
# inputs bounded
_MAX_FINDINGS = 200


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    if out.ndim == 1:
        out = out[:, None]
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class MultivariateSeries:
    """T x d real observation matrix with optional metadata.

    Parameters
    ----------
    values : ndarray, shape (T, d)
        Observations, one row per time point. Copied and frozen.
    labels : tuple of str, optional
        Column names, length d when present.
    timestamps : tuple of str, optional
        Opaque row time labels, length T when present.

    Notes
    -----
    Construction does not validate; `load_csv` raises typed errors at ingest
    and `validate` produces a finding report for anything else. Instances are
    immutable (the values array is write-protected).
    """

    values: np.ndarray
    labels: Optional[tuple] = None
    timestamps: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        if self.timestamps is not None:
            object.__setattr__(self, "timestamps", tuple(self.timestamps))

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CenteredSeries:
    """Column-centered values plus the subtracted column means."""

    values: np.ndarray
    mean: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        m = np.array(self.mean, dtype=np.float64, copy=True).reshape(-1)
        m.setflags(write=False)
        object.__setattr__(self, "mean", m)

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class IngestConfig:
    """CSV ingestion settings.

    columns: ordered names of the numeric columns to load (the output column
    order). date_column: optional name of a column collected verbatim as row
    timestamps. skip_rows: lines to drop before the header row.
    """

    columns: Sequence[str]
    date_column: Optional[str] = None
    skip_rows: int = 0


@dataclass(frozen=True)
class Finding:
    kind: str
    row: Optional[int]
    col: Optional[int]
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.findings


def load_csv(path, config: IngestConfig) -> MultivariateSeries:
    """Load selected numeric columns of a CSV file.

    Parameters
    ----------
    path : path-like
        CSV file: comma separated, header row, '.' decimals, UTF-8.
    config : IngestConfig

    Returns
    -------
    MultivariateSeries
        Rows in file order, columns in ``config.columns`` order.

    Raises
    ------
    MissingColumn
        A requested column (or the date column) is not in the header.
    NonNumericCell
        A selected cell fails to parse; reports 1-based data row and column
        name. Empty cells count as non-numeric (missing data is rejected).
    NonFinite
        A selected cell parses to NaN or +/-inf.
    TooShort
        Fewer than 2 data rows.
    """
    if not config.columns:
        raise MissingColumn("no columns requested")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for _ in range(config.skip_rows):
            next(reader, None)
        header = next(reader, None)
        if header is None:
            raise TooShort("file has no header row")
        header = [h.strip() for h in header]
        pos = {}
        for name in config.columns:
            if name not in header:
                raise MissingColumn(f"column {name!r} not in header {header}")
            pos[name] = header.index(name)
        date_pos = None
        if config.date_column is not None:
            if config.date_column not in header:
                raise MissingColumn(
                    f"date column {config.date_column!r} not in header {header}"
                )
            date_pos = header.index(config.date_column)

        rows = []
        stamps = [] if date_pos is not None else None
        for i, raw in enumerate(reader, start=1):
            if not raw:  # blank trailing line
                continue
            vals = []
            for name in config.columns:
                j = pos[name]
                cell = raw[j].strip() if j < len(raw) else ""
                try:
                    x = float(cell)  # float('') raises, so empty cells land here
                except ValueError:
                    raise NonNumericCell(i, name, cell) from None
                if not math.isfinite(x):
                    raise NonFinite(i, name)
                vals.append(x)
            rows.append(vals)
            if stamps is not None:
                stamps.append(raw[date_pos].strip() if date_pos < len(raw) else "")

    if len(rows) < 2:
        raise TooShort(f"{len(rows)} data row(s); need at least 2")
    return MultivariateSeries(
        np.array(rows, dtype=np.float64),
        labels=tuple(config.columns),
        timestamps=tuple(stamps) if stamps is not None else None,
    )


def write_csv(series: MultivariateSeries, path) -> None:
    """Write a series as CSV with full float precision (17 significant
    digits), so a subsequent load_csv round-trips the values exactly."""
    labels = series.labels or tuple(f"x{j}" for j in range(series.d))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if series.timestamps is not None:
            writer.writerow(("date",) + tuple(labels))
            for t in range(series.T):
                writer.writerow(
                    (series.timestamps[t],)
                    + tuple(format(v, ".17g") for v in series.values[t])
                )
        else:
            writer.writerow(labels)
            for t in range(series.T):
                writer.writerow(tuple(format(v, ".17g") for v in series.values[t]))


def center(series: MultivariateSeries) -> CenteredSeries:
    """Subtract the column means. Column sums of the result vanish to within
    accumulated roundoff (well under 1e-9 per row)."""
    mean = series.values.mean(axis=0)
    return CenteredSeries(series.values - mean, mean)


def validate(series: MultivariateSeries) -> ValidationReport:
    """Report violations of the series invariants without raising.

    Checks: T >= 2, d >= 1, all entries finite, label count == d,
    timestamp count == T. An empty report means the series is valid.
    """
    findings = []
    T, d = series.values.shape
    if T < 2:
        findings.append(Finding("TooShort", None, None, f"T={T} < 2"))
    if d < 1:
        findings.append(Finding("DimensionMismatch", None, None, "d < 1"))
    bad = np.argwhere(~np.isfinite(series.values))
    for r, c in bad[:_MAX_FINDINGS]:
        findings.append(
            Finding("NonFinite", int(r), int(c), f"non-finite entry at ({r}, {c})")
        )
    if series.labels is not None and len(series.labels) != d:
        findings.append(
            Finding(
                "LabelMismatch", None, None, f"{len(series.labels)} labels for d={d}"
            )
        )
    if series.timestamps is not None and len(series.timestamps) != T:
        findings.append(
            Finding(
                "TimestampMismatch",
                None,
                None,
                f"{len(series.timestamps)} timestamps for T={T}",
            )
        )
    return ValidationReport(tuple(findings))
