"""Batch benchmark harness: seeded simulation grids, test-then-estimate
replications, and deviation metrics.

A grid is a list of named cells, each a simulation template plus a
replication count. Every replication re-seeds the template at base + rep
index, simulates, runs the mean-shift test, and — when the test rejects —
estimates the change point. Deviation metrics aggregate over the estimating
replications only (pass ``always_estimate=True`` to remove the conditioning
for sensitivity analysis). A failed replication is recorded on the row, not
silently dropped, and never stops the cell; a failed cell never stops the
grid.

Grid files are flat key=value blocks separated by blank lines. An optional
first block without a ``cell=`` key sets the grid name, the level, and
per-cell defaults; every other block defines one cell:

    name=table1
    alpha=0.05
    d=2
    T=8000
    reps=30

    cell=weak_m10_half
    m=10
    cov=exch:0.5
    delta=0.5,0.2
    k_star=0.5

Ready-made grids mirroring the benchmark tables ship in package data
(``table1`` .. ``table4``, ``h0``); see `load_shipped_grid`.
"""

from __future__ import annotations

import csv
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from .critical import CriticalValueTable
from .engine import estimate_changepoint
from .engine import test as _run_test
from .errors import DomainError, GridParseError, ToolkitError
from .simulate import (
    SimulationSpec,
    exchangeable_cov,
    gen_series,
    geometric_coefficients,
)

__all__ = [
    "ExperimentCell",
    "ExperimentGrid",
    "MetricsRow",
    "load_grid",
    "load_shipped_grid",
    "location_label",
    "metrics_from_errors",
    "parse_grid",
    "run_cell",
    "run_grid",
    "write_grid_outputs",
]

_KNOWN_METRICS = ("deviation", "abs_deviation", "rms_deviation")

SHIPPED_GRIDS = ("table1", "table2", "table3", "table4", "h0")


@dataclass(frozen=True)
class ExperimentCell:
    """One named simulation template plus its replication count. The
    template's seed acts as the cell's base seed: replication k runs at
    seed base + k."""

    name: str
    template: SimulationSpec
    replications: int

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError(
                f"cell {self.name!r}: replications must be >= 1, "
                f"got {self.replications}"
            )


@dataclass(frozen=True)
class ExperimentGrid:
    name: str
    cells: Tuple[ExperimentCell, ...]
    alpha: float = 0.05
    metrics_requested: Tuple[str, ...] = _KNOWN_METRICS

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        object.__setattr__(self, "metrics_requested", tuple(self.metrics_requested))
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")
        names = [c.name for c in self.cells]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DomainError(f"duplicate cell names: {dupes}")
        unknown = [m for m in self.metrics_requested if m not in _KNOWN_METRICS]
        if unknown:
            raise DomainError(f"unknown metrics requested: {unknown}")


@dataclass(frozen=True)
class MetricsRow:
    """Aggregated outcome of one cell.

    Deviation metrics are over the replications that produced an estimate
    and have a true break time; they are NaN when that set is empty (e.g.
    a null cell, or nothing rejected). ``estimates`` keeps the individual
    break estimates for histogramming; ``failures`` records one line per
    failed replication.
    """

    cell_id: str
    deviation: float
    abs_deviation: float
    rms_deviation: float
    mean_sq_deviation: float
    reject_count: int
    replications: int
    estimates: Tuple[int, ...] = ()
    failures: Tuple[str, ...] = ()


def metrics_from_errors(errors: Sequence[float]):
    """(mean, mean abs, root mean square, mean square) of the estimation
    errors T* - T-hat; all NaN for an empty sample."""
    if len(errors) == 0:
        return math.nan, math.nan, math.nan, math.nan
    e = np.asarray(errors, dtype=np.float64)
    mean_sq = float(np.mean(e * e))
    return float(e.mean()), float(np.abs(e).mean()), math.sqrt(mean_sq), mean_sq


def run_cell(
    template: SimulationSpec,
    replications: int,
    alpha: float,
    table: CriticalValueTable,
    cell_id: str = "cell",
    always_estimate: bool = False,
) -> MetricsRow:
    """Run one cell: simulate, test, estimate-on-rejection, aggregate.

    Replication k uses seed ``template.seed + k``. Any toolkit or linear-
    algebra error inside a replication is recorded in ``failures`` and the
    remaining replications still run.
    """
    if replications < 1:
        raise DomainError(f"replications must be >= 1, got {replications}")
    rejects = 0
    errors: list = []
    estimates: list = []
    failures: list = []
    for rep in range(replications):
        spec = replace(template, seed=template.seed + rep)
        try:
            series, t_star = gen_series(spec)
            result = _run_test(series, alpha, table)
            if result.reject:
                rejects += 1
            if result.reject or always_estimate:
                est = estimate_changepoint(series, method="quadform_argmax")
                estimates.append(est.t_hat)
                if t_star is not None:
                    errors.append(t_star - est.t_hat)
        except (ToolkitError, np.linalg.LinAlgError) as exc:
            failures.append(f"rep {rep}: {type(exc).__name__}: {exc}")
    dev, abs_dev, rms_dev, mean_sq = metrics_from_errors(errors)
    return MetricsRow(
        cell_id=cell_id,
        deviation=dev,
        abs_deviation=abs_dev,
        rms_deviation=rms_dev,
        mean_sq_deviation=mean_sq,
        reject_count=rejects,
        replications=replications,
        estimates=tuple(estimates),
        failures=tuple(failures),
    )


def run_grid(
    grid: ExperimentGrid,
    table: CriticalValueTable,
    output_dir=None,
    always_estimate: bool = False,
    threads: int = 1,
):
    """Run every cell of a grid; rows come back in grid order.

    A cell that fails outright (bad template interaction, etc.) yields a
    row with NaN metrics and the failure recorded; other cells proceed.
    When ``output_dir`` is given, also writes ``<name>.csv``, one estimate
    histogram per cell, and ``summary.txt`` (see `write_grid_outputs`).
    """

    def one(cell: ExperimentCell) -> MetricsRow:
        try:
            return run_cell(
                cell.template,
                cell.replications,
                grid.alpha,
                table,
                cell_id=cell.name,
                always_estimate=always_estimate,
            )
        except Exception as exc:  # cell-level isolation
            nan = math.nan
            return MetricsRow(
                cell.name,
                nan,
                nan,
                nan,
                nan,
                0,
                cell.replications,
                (),
                (f"cell: {type(exc).__name__}: {exc}",),
            )

    if threads > 1 and len(grid.cells) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, grid.cells))
    else:
        rows = [one(cell) for cell in grid.cells]
    if output_dir is not None:
        write_grid_outputs(grid, rows, output_dir)
    return rows


def location_label(k_star: Optional[float]) -> str:
    """Human-readable break location: 'T/2', 'T/5', ... or 'none'."""
    if k_star is None:
        return "none"
    inverse = 1.0 / k_star
    nearest = round(inverse)
    if nearest >= 1 and abs(inverse - nearest) < 1e-9:
        return f"T/{int(nearest)}"
    return f"{k_star:g}T"


def _hist_root(grid_name: str) -> str:
    m = re.fullmatch(r"table(\w*)", grid_name)
    return f"hist{m.group(1)}" if m else f"{grid_name}_hist"


def write_grid_outputs(grid: ExperimentGrid, rows, output_dir) -> None:
    """Emit the grid's artifacts into a directory.

    ``<name>.csv``: one row per cell with the benchmark-table columns
    (change, m-dependence, location, the three deviation metrics) plus the
    raw mean square, reject count, replication count, and failure count.
    ``hist<N>_<cell>.csv`` (or ``<name>_hist_<cell>.csv`` for grids not
    named table<N>): the individual break estimates of each estimating
    replication, for conditional-distribution histograms. ``summary.txt``:
    one line per cell and a completion tally. All floats use 17 significant
    digits so reruns are byte-comparable.
    """
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    by_name = {cell.name: cell for cell in grid.cells}

    with open(out / f"{grid.name}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            [
                "cell",
                "change",
                "m_dependence",
                "location",
                "T",
                "deviation",
                "abs_deviation",
                "rms_deviation",
                "mean_sq_deviation",
                "reject_count",
                "replications",
                "failures",
            ]
        )
        for row in rows:
            t = by_name[row.cell_id].template
            change = (
                ",".join(format(v, "g") for v in t.delta)
                if t.k_star is not None
                else "0"
            )
            w.writerow(
                [
                    row.cell_id,
                    change,
                    t.m,
                    location_label(t.k_star),
                    t.T,
                    format(row.deviation, ".17g"),
                    format(row.abs_deviation, ".17g"),
                    format(row.rms_deviation, ".17g"),
                    format(row.mean_sq_deviation, ".17g"),
                    row.reject_count,
                    row.replications,
                    len(row.failures),
                ]
            )

    root = _hist_root(grid.name)
    for row in rows:
        if not row.estimates:
            continue
        with open(out / f"{root}_{row.cell_id}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_hat"])
            for t_hat in row.estimates:
                w.writerow([t_hat])

    completed = sum(1 for row in rows if not row.failures)
    with open(out / "summary.txt", "w") as fh:
        fh.write(f"grid={grid.name} alpha={grid.alpha:g} cells={len(rows)}\n")
        for row in rows:
            fh.write(
                f"cell={row.cell_id} replications={row.replications} "
                f"rejects={row.reject_count} failures={len(row.failures)} "
                f"deviation={row.deviation:.6g} "
                f"abs_deviation={row.abs_deviation:.6g} "
                f"rms_deviation={row.rms_deviation:.6g}\n"
            )
        for row in rows:
            for failure in row.failures:
                fh.write(f"failure {row.cell_id}: {failure}\n")
        fh.write(f"completed={completed}/{len(rows)}\n")


# ---------------------------------------------------------------------------
# grid config files

_HEADER_KEYS = {"name", "alpha", "metrics"}
_CELL_KEYS = {
    "cell",
    "d",
    "T",
    "m",
    "rho",
    "tol",
    "base",
    "cov",
    "delta",
    "k_star",
    "reps",
    "seed",
}


def _parse_int(value: str, lineno: int, source: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise GridParseError(
            f"{source}:{lineno}: expected an integer, got {value!r}"
        ) from None


def _parse_float(value: str, lineno: int, source: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise GridParseError(
            f"{source}:{lineno}: expected a number, got {value!r}"
        ) from None


def _parse_floats(value: str, lineno: int, source: str):
    return np.array(
        [_parse_float(part.strip(), lineno, source) for part in value.split(",")]
    )


def _build_cell(name: str, kv: dict, source: str) -> ExperimentCell:
    """kv maps key -> (lineno, raw value); defaults already merged in."""

    def take(key, default=None):
        return kv.pop(key, (None, default))

    line_d, raw_d = take("d")
    line_T, raw_T = take("T")
    line_m, raw_m = take("m")
    line_reps, raw_reps = take("reps")
    for key, raw in (("d", raw_d), ("T", raw_T), ("m", raw_m), ("reps", raw_reps)):
        if raw is None:
            raise GridParseError(f"{source}: cell {name!r}: missing required key {key!r}")
    d = _parse_int(raw_d, line_d, source)
    T = _parse_int(raw_T, line_T, source)
    m = _parse_int(raw_m, line_m, source)
    reps = _parse_int(raw_reps, line_reps, source)

    line_rho, raw_rho = take("rho", "0.5")
    rho = _parse_float(raw_rho, line_rho, source)
    line_tol, raw_tol = take("tol", "1e-12")
    tol = _parse_float(raw_tol, line_tol, source)
    line_seed, raw_seed = take("seed", "0")
    seed = _parse_int(raw_seed, line_seed, source)

    line_base, raw_base = take("base", "unit_gain")
    if raw_base == "unit_gain":
        base = None
    elif raw_base == "identity":
        base = np.eye(d)
    else:
        flat = _parse_floats(raw_base, line_base, source)
        if flat.size != d * d:
            raise GridParseError(
                f"{source}:{line_base}: base needs {d * d} values, got {flat.size}"
            )
        base = flat.reshape(d, d)

    line_cov, raw_cov = take("cov", "eye")
    if raw_cov == "eye":
        cov = None
    elif raw_cov.startswith("exch:"):
        off = _parse_float(raw_cov[len("exch:"):], line_cov, source)
        try:
            cov = exchangeable_cov(d, off)
        except ToolkitError as exc:
            raise GridParseError(f"{source}:{line_cov}: {exc}") from exc
    else:
        flat = _parse_floats(raw_cov, line_cov, source)
        if flat.size != d * d:
            raise GridParseError(
                f"{source}:{line_cov}: cov needs {d * d} values, got {flat.size}"
            )
        cov = flat.reshape(d, d)

    line_delta, raw_delta = take("delta")
    delta = None
    if raw_delta is not None and raw_delta != "none":
        flat = _parse_floats(raw_delta, line_delta, source)
        if flat.size != d:
            raise GridParseError(
                f"{source}:{line_delta}: delta needs {d} values, got {flat.size}"
            )
        delta = flat

    line_ks, raw_ks = take("k_star")
    k_star = None
    if raw_ks is not None and raw_ks != "none":
        k_star = _parse_float(raw_ks, line_ks, source)

    if kv:
        lineno, _ = next(iter(kv.values()))
        raise GridParseError(
            f"{source}:{lineno}: key {next(iter(kv))!r} not valid in a cell block"
        )

    try:
        coeff = geometric_coefficients(d, rho=rho, base=base, tol=tol)
        template = SimulationSpec(
            d=d,
            T=T,
            m=m,
            coeff=coeff,
            innovation_cov=cov,
            delta=delta,
            k_star=k_star,
            seed=seed,
        )
        return ExperimentCell(name, template, reps)
    except ToolkitError as exc:
        raise GridParseError(
            f"{source}: cell {name!r}: {type(exc).__name__}: {exc}"
        ) from exc


def parse_grid(text: str, source: str = "<string>") -> ExperimentGrid:
    """Parse a grid config (see the module docstring for the format).

    Raises GridParseError with ``source:line`` provenance for malformed
    lines, unknown or duplicate keys, missing required keys, and values the
    simulation spec rejects.
    """
    blocks: list = []
    current: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            if current:
                blocks.append(current)
                current = []
            continue
        if line.startswith("#"):
            continue
        if "=" not in line:
            raise GridParseError(
                f"{source}:{lineno}: expected key=value, got {line!r}"
            )
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CELL_KEYS and key not in _HEADER_KEYS:
            raise GridParseError(f"{source}:{lineno}: unknown key {key!r}")
        if any(k == key for _, k, _ in current):
            raise GridParseError(f"{source}:{lineno}: duplicate key {key!r}")
        current.append((lineno, key, value))
    if current:
        blocks.append(current)

    name = "grid"
    alpha = 0.05
    metrics = _KNOWN_METRICS
    defaults: dict = {}
    start = 0
    if blocks and not any(key == "cell" for _, key, _ in blocks[0]):
        for lineno, key, value in blocks[0]:
            if key == "name":
                name = value
            elif key == "alpha":
                alpha = _parse_float(value, lineno, source)
            elif key == "metrics":
                metrics = tuple(part.strip() for part in value.split(","))
            else:
                defaults[key] = (lineno, value)
        start = 1

    cells = []
    seen = set()
    for block in blocks[start:]:
        keys = {key: (lineno, value) for lineno, key, value in block}
        if "cell" not in keys:
            raise GridParseError(
                f"{source}:{block[0][0]}: block has no cell= key"
            )
        for lineno, key, _ in block:
            if key in _HEADER_KEYS:
                raise GridParseError(
                    f"{source}:{lineno}: key {key!r} only valid in the header block"
                )
        cell_name = keys.pop("cell")[1]
        if cell_name in seen:
            raise GridParseError(
                f"{source}:{block[0][0]}: duplicate cell {cell_name!r}"
            )
        seen.add(cell_name)
        merged = dict(defaults)
        merged.update(keys)
        cells.append(_build_cell(cell_name, merged, source))

    try:
        return ExperimentGrid(
            name=name, cells=tuple(cells), alpha=alpha, metrics_requested=metrics
        )
    except DomainError as exc:
        raise GridParseError(f"{source}: {exc}") from exc


def load_grid(path) -> ExperimentGrid:
    """Parse a grid config file."""
    with open(path, encoding="utf-8") as fh:
        return parse_grid(fh.read(), source=str(path))


def load_shipped_grid(name: str) -> ExperimentGrid:
    """One of the packaged benchmark grids: table1..table4 or h0."""
    if name not in SHIPPED_GRIDS:
        raise DomainError(
            f"unknown shipped grid {name!r}; available: {', '.join(SHIPPED_GRIDS)}"
        )
    ref = resources.files("mvcusum").joinpath(f"data/{name}.grid")
    with resources.as_file(ref) as path:
        return load_grid(path)
