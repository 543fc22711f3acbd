"""Command-line pipeline around the detection toolkit.

One executable, seven subcommands: ``simulate`` draws synthetic series from
the linear-process model, ``spectrum`` reports the long-run covariance and
exports a smoothed-spectrum grid, ``detect`` runs the mean-shift test (and
optionally the change-point estimate, the multi-break scan, and the curve
export), ``estimate`` and ``scan`` expose those two pieces alone,
``critval`` queries or extends a critical-value table, and ``bench`` runs a
benchmark grid of simulation cells.

Exit codes: 0 success, 2 usage or data problems (every deliberate toolkit
error), 3 unexpected internal failures.  Errors print one machine-parseable
line to stderr: ``error: <Category>: <message>``.  All file outputs are
plain CSV or key=value text, and every subcommand is bit-reproducible given
the same flags and seed.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import engine
from .critical import (
    DEFAULT_GRID,
    DEFAULT_PATHS,
    Budget,
    CriticalValueTable,
    critical_value,
    default_table,
)
from .errors import (
    DomainError,
    GridParseError,
    MissingColumn,
    ToolkitError,
    TooShort,
)
from .experiments import (
    SHIPPED_GRIDS,
    _build_cell,
    _CELL_KEYS,
    load_grid,
    load_shipped_grid,
    run_grid,
)
from .series import IngestConfig, MultivariateSeries, center, load_csv, write_csv
from .simulate import gen_series
from .spectral import (
    dft,
    export_spectrum_csv,
    long_run_covariance,
    sma_kernel,
    spectral_estimate,
)

__all__ = ["CommandConfig", "apply_transform", "build_parser", "main"]

_SUBCOMMANDS = ("simulate", "spectrum", "detect", "estimate", "scan",
                "critval", "bench")
_TRANSFORMS = ("none", "center", "log", "diff")
_SIM_KEYS = frozenset(_CELL_KEYS) - {"cell", "reps"}


@dataclass(frozen=True)
class CommandConfig:
    """One parsed invocation: the subcommand, its paths, and its flags.

    Input paths are checked for existence at construction, before any work
    or output happens.
    """

    subcommand: str
    inputs: tuple = ()
    outputs: tuple = ()
    alpha: float | None = None
    bandwidth: int | None = None
    method: str | None = None
    transform: str | None = None
    smoothing_window: int | None = None
    min_prominence: float | None = None
    seed: int | None = None
    budget: Budget | None = None

    def __post_init__(self):
        if self.subcommand not in _SUBCOMMANDS:
            raise DomainError(f"unknown subcommand {self.subcommand!r}")
        for path in self.inputs:
            if not os.path.exists(path):
                raise FileNotFoundError(f"no such input file: {path}")


def apply_transform(series: MultivariateSeries, name: str) -> MultivariateSeries:
    """Pre-analysis value transform: none, center, log, or diff.

    ``diff`` drops the first row (and its timestamp); ``log`` insists on
    strictly positive values rather than silently producing -inf.
    """
    if name == "none":
        return series
    if name == "center":
        return MultivariateSeries(center(series).values, labels=series.labels,
                                  timestamps=series.timestamps)
    if name == "log":
        if np.any(series.values <= 0.0):
            raise DomainError("log transform needs strictly positive values")
        return MultivariateSeries(np.log(series.values), labels=series.labels,
                                  timestamps=series.timestamps)
    if name == "diff":
        if series.T < 3:
            raise TooShort(
                f"differencing needs at least 3 observations, got {series.T}"
            )
        stamps = None if series.timestamps is None else series.timestamps[1:]
        return MultivariateSeries(np.diff(series.values, axis=0),
                                  labels=series.labels, timestamps=stamps)
    raise DomainError(f"unknown transform {name!r}")


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _fmt_floats(arr) -> str:
    return ",".join(_fmt(v) for v in np.asarray(arr, dtype=float).ravel())


def _resolve_out(args, path) -> str:
    """Resolve an output path: relative paths land under --output-dir."""
    p = os.fspath(path)
    if not os.path.isabs(p):
        p = os.path.join(args.output_dir or ".", p)
    parent = os.path.dirname(p) or "."
    os.makedirs(parent, exist_ok=True)
    return p


def _load_table(path) -> CriticalValueTable:
    return CriticalValueTable.load_csv(path) if path else default_table()


def _read_header(path, skip_rows: int) -> list[str]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for _ in range(skip_rows):
            next(reader, None)
        header = next(reader, None)
    if not header:
        raise MissingColumn(f"{path}: no header row")
    return [h.strip() for h in header]


def _load_input(args) -> MultivariateSeries:
    """Load the input CSV per the column flags, then apply --transform.

    Without --columns, every column is loaded except the date column
    (--date-column, or a column literally named 'date' if present).
    """
    path = args.input
    header = _read_header(path, args.skip_rows)
    date = args.date_column
    if date is None:
        date = next((h for h in header if h.lower() == "date"), None)
    if args.columns:
        columns = tuple(c.strip() for c in args.columns.split(","))
    else:
        columns = tuple(h for h in header if h != date)
        if not columns:
            raise MissingColumn(f"{path}: no value columns besides the date column")
    series = load_csv(path, IngestConfig(columns=columns, date_column=date,
                                         skip_rows=args.skip_rows))
    return apply_transform(series, args.transform)


def _print_estimate(est) -> None:
    print(f"t_hat={est.t_hat}")
    print(f"k_hat={_fmt(est.k_hat)}")
    print(f"method={est.method}")
    print(f"curve_value={_fmt(est.curve_value)}")


def _print_scan(scan) -> None:
    print(f"smoothing_window={scan.smoothing_window}")
    print(f"min_prominence={_fmt(scan.min_prominence)}")
    for e in scan.extrema:
        print(f"extremum index={e.index} kind={e.kind} "
              f"value={_fmt(e.value)} prominence={_fmt(e.prominence)}")
    print(f"extrema_count={len(scan.extrema)}")


# ------------------------------------------------------------------ simulate


def _read_sim_config(path) -> dict:
    """Flat key=value file with the same vocabulary as one grid cell
    (minus ``cell`` and ``reps``); values stay raw strings for _build_cell."""
    kv = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or not key:
                raise GridParseError(
                    f"{path}:{lineno}: expected key=value, got {line!r}",
                    line=lineno,
                )
            if key not in _SIM_KEYS:
                raise GridParseError(
                    f"{path}:{lineno}: unknown key {key!r}", line=lineno
                )
            if key in kv:
                raise GridParseError(
                    f"{path}:{lineno}: duplicate key {key!r}", line=lineno
                )
            kv[key] = (lineno, value)
    return kv


def _write_sim_meta(path, spec, t_star) -> None:
    coeff = spec.coeff
    lines = [
        f"d={spec.d}",
        f"T={spec.T}",
        f"m={spec.m}",
        f"kind={coeff.kind}",
        f"rho={_fmt(coeff.rho)}",
        f"k_max={coeff.K_max}",
        f"seed={spec.seed}",
        f"k_star={'none' if spec.k_star is None else _fmt(spec.k_star)}",
        f"t_star={'none' if t_star is None else t_star}",
        f"delta={_fmt_floats(spec.delta)}",
        f"innovation_cov={_fmt_floats(spec.innovation_cov)}",
        f"base={_fmt_floats(coeff.base)}",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_simulate(args) -> int:
    out = _resolve_out(args, args.out)
    meta_out = _resolve_out(args, args.meta) if args.meta else out + ".meta"
    config = CommandConfig(
        subcommand="simulate",
        inputs=(os.fspath(args.config),) if args.config else (),
        outputs=(out, meta_out),
        seed=args.seed,
    )
    source = config.inputs[0] if config.inputs else "command line"
    kv = _read_sim_config(args.config) if args.config else {}
    overrides = (
        ("d", args.d), ("T", args.T), ("m", args.m), ("rho", args.rho),
        ("tol", args.tol), ("base", args.base), ("cov", args.cov),
        ("delta", args.delta), ("k_star", args.k_star), ("seed", args.seed),
    )
    for key, value in overrides:
        if value is not None:
            kv[key] = ("--" + key.replace("_", "-"), str(value))
    kv["reps"] = ("<internal>", "1")
    spec = _build_cell("simulate", kv, source).template

    series, t_star = gen_series(spec)
    write_csv(series, out)
    _write_sim_meta(meta_out, spec, t_star)
    print(f"series={out}")
    print(f"meta={meta_out}")
    print(f"T={spec.T}")
    print(f"d={spec.d}")
    print(f"t_star={'none' if t_star is None else t_star}")
    return 0


# ------------------------------------------------------------------ spectrum


def cmd_spectrum(args) -> int:
    out = _resolve_out(args, args.out)
    config = CommandConfig(
        subcommand="spectrum",
        inputs=(args.input,),
        outputs=(out,),
        bandwidth=args.h,
        transform=args.transform,
    )
    if args.freqs < 2:
        raise DomainError(f"need at least 2 frequencies, got {args.freqs}")
    series = _load_input(args)
    lr = long_run_covariance(series, config.bandwidth)
    est = spectral_estimate(dft(center(series)), sma_kernel(lr.h_used))
    omegas = np.linspace(0.0, math.pi, args.freqs)
    export_spectrum_csv(out, omegas, [est.at(w) for w in omegas])
    print(f"T={series.T}")
    print(f"d={series.d}")
    print(f"h_used={lr.h_used}")
    print(f"ridge_applied={_fmt(lr.ridge_applied)}")
    for i in range(series.d):
        print(f"sigma_{i}={_fmt_floats(lr.sigma[i])}")
    print(f"spectrum={out}")
    return 0


# -------------------------------------------------------------------- detect


def _two_pass_sigma(series, method, trim, h):
    """Pilot estimate on the first-pass covariance, then re-estimate the
    long-run covariance after demeaning each segment at the pilot break."""
    first = long_run_covariance(series, h)
    pilot = engine.estimate_changepoint(series, method=method, sigma=first,
                                        trim=trim)
    x = series.values.copy()
    k = pilot.t_hat
    x[:k] -= x[:k].mean(axis=0)
    x[k:] -= x[k:].mean(axis=0)
    return long_run_covariance(MultivariateSeries(x), h), pilot


def cmd_detect(args) -> int:
    curve_out = _resolve_out(args, args.emit_curve) if args.emit_curve else None
    inputs = (args.input,) + ((args.table,) if args.table else ())
    config = CommandConfig(
        subcommand="detect",
        inputs=inputs,
        outputs=(curve_out,) if curve_out else (),
        alpha=args.alpha,
        bandwidth=args.h,
        method=args.method,
        transform=args.transform,
        smoothing_window=args.smoothing_window,
        min_prominence=args.min_prominence,
    )
    table = _load_table(args.table)
    series = _load_input(args)

    sigma = pilot = None
    if args.two_pass:
        sigma, pilot = _two_pass_sigma(series, config.method, args.trim,
                                       config.bandwidth)
    result = engine.test(series, config.alpha, table, h=config.bandwidth,
                         sigma=sigma)
    sys.stdout.write(engine.test_result_text(result))
    if args.two_pass:
        print("two_pass=true")
        print(f"pilot_t_hat={pilot.t_hat}")
    if result.reject:
        est = engine.estimate_changepoint(series, method=config.method,
                                          sigma=result.sigma, trim=args.trim)
        _print_estimate(est)
    if args.scan or curve_out:
        curve = engine.quadform(engine.cusum(series), result.sigma)
        if args.scan:
            _print_scan(engine.scan_extrema(curve, config.smoothing_window,
                                            config.min_prominence, args.trim))
        if curve_out:
            engine.export_curve_csv(curve, curve_out)
            print(f"curve={curve_out}")
    return 0


# --------------------------------------------------------- estimate and scan


def cmd_estimate(args) -> int:
    config = CommandConfig(
        subcommand="estimate",
        inputs=(args.input,),
        bandwidth=args.h,
        method=args.method,
        transform=args.transform,
    )
    series = _load_input(args)
    sigma = None
    if config.method == "quadform_argmax":
        sigma = long_run_covariance(series, config.bandwidth)
    est = engine.estimate_changepoint(series, method=config.method,
                                      sigma=sigma, trim=args.trim)
    _print_estimate(est)
    return 0


def cmd_scan(args) -> int:
    curve_out = _resolve_out(args, args.emit_curve) if args.emit_curve else None
    config = CommandConfig(
        subcommand="scan",
        inputs=(args.input,),
        outputs=(curve_out,) if curve_out else (),
        bandwidth=args.h,
        transform=args.transform,
        smoothing_window=args.smoothing_window,
        min_prominence=args.min_prominence,
    )
    series = _load_input(args)
    lr = long_run_covariance(series, config.bandwidth)
    curve = engine.quadform(engine.cusum(series), lr)
    _print_scan(engine.scan_extrema(curve, config.smoothing_window,
                                    config.min_prominence, args.trim))
    if curve_out:
        engine.export_curve_csv(curve, curve_out)
        print(f"curve={curve_out}")
    return 0


# ------------------------------------------------------------------- critval


def cmd_critval(args) -> int:
    budget = None
    if args.paths is not None or args.grid is not None or args.seed is not None:
        budget = Budget(
            paths=DEFAULT_PATHS if args.paths is None else args.paths,
            grid=DEFAULT_GRID if args.grid is None else args.grid,
            seed=args.seed,
        )
    CommandConfig(subcommand="critval", alpha=args.alpha, seed=args.seed,
                  budget=budget)
    if args.table and os.path.exists(args.table):
        table = CriticalValueTable.load_csv(args.table)
    elif args.table:
        table = CriticalValueTable()
    else:
        table = default_table()
    cached = table.get(args.d, args.alpha) is not None
    critical_value(args.d, args.alpha, table, budget)
    entry = table.get(args.d, args.alpha)
    print(f"d={args.d}")
    print(f"alpha={_fmt(args.alpha)}")
    print(f"value={_fmt(entry.value)}")
    print(f"paths={entry.paths}")
    print(f"grid={entry.grid}")
    print(f"seed={entry.seed}")
    print(f"stderr_estimate={_fmt(entry.stderr_estimate)}")
    print(f"source={'cache' if cached else 'computed'}")
    if args.table:
        table.save_csv(args.table)
        print(f"table={args.table}")
    return 0


# --------------------------------------------------------------------- bench


def cmd_bench(args) -> int:
    extra = (args.table,) if args.table else ()
    if os.path.exists(args.grid):
        CommandConfig(subcommand="bench", inputs=(args.grid,) + extra)
        grid = load_grid(args.grid)
    elif args.grid in SHIPPED_GRIDS:
        CommandConfig(subcommand="bench", inputs=extra)
        grid = load_shipped_grid(args.grid)
    else:
        raise DomainError(
            f"no grid file or shipped grid named {args.grid!r}; "
            "shipped grids: " + ", ".join(SHIPPED_GRIDS)
        )
    table = _load_table(args.table)
    if args.reps is not None:
        if args.reps < 1:
            raise DomainError(f"replication override must be >= 1, got {args.reps}")
        grid = replace(grid, cells=tuple(
            replace(cell, replications=args.reps) for cell in grid.cells
        ))
    out_dir = args.output_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    rows = run_grid(grid, table, output_dir=out_dir,
                    always_estimate=args.always_estimate, threads=args.threads)
    failures = 0
    for row in rows:
        failures += len(row.failures)
        print(f"cell {row.cell_id}: reject {row.reject_count}/{row.replications} "
              f"mean_abs_dev={_fmt(row.abs_deviation)} "
              f"failures={len(row.failures)}")
    print(f"grid={grid.name}")
    print(f"wrote {os.path.join(out_dir, grid.name + '.csv')}")
    print(f"wrote {os.path.join(out_dir, 'summary.txt')}")
    completed = sum(1 for row in rows if not row.failures)
    print(f"completed={completed}/{len(rows)}")
    if failures and not args.keep_going:
        print(f"error: CellFailures: {failures} failed replications "
              "across the grid", file=sys.stderr)
        return 2
    return 0


# -------------------------------------------------------------------- parser


def _add_input_flags(sub) -> None:
    sub.add_argument("input", help="input CSV file (header row, comma separated)")
    sub.add_argument("--columns", default=None, metavar="NAMES",
                     help="comma-separated column names to load (default: "
                          "every column except the date column)")
    sub.add_argument("--date-column", default=None, metavar="NAME",
                     help="timestamp column carried through to outputs "
                          "(default: a column named 'date', if present)")
    sub.add_argument("--skip-rows", type=int, default=0, metavar="N",
                     help="lines to skip before the header row (default: 0)")
    sub.add_argument("--transform", choices=_TRANSFORMS, default="none",
                     help="pre-analysis transform (default: none)")


def _add_bandwidth_flag(sub) -> None:
    sub.add_argument("--h", "--bandwidth", dest="h", type=int, default=None,
                     metavar="H",
                     help="periodogram smoothing half-width (default: "
                          "integer fourth root of T)")


def _add_scan_flags(sub) -> None:
    sub.add_argument("--smoothing-window", type=int, default=None, metavar="W",
                     help="odd moving-average width for the scan (default: "
                          "2*floor(T^(1/4))+1)")
    sub.add_argument("--min-prominence", type=float, default=None, metavar="P",
                     help="prominence floor for scan extrema (default: 10%% "
                          "of the smoothed curve's range)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvcusum",
        description="Offline mean-shift detection for multivariate series: "
                    "CUSUM test, change-point estimates, spectral long-run "
                    "covariance, Monte Carlo critical values, simulation "
                    "benchmarks.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="integer seed override (default: per-command "
                             "deterministic default)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker thread cap for bench cells (default: 1)")
    common.add_argument("--output-dir", default=None, metavar="DIR",
                        help="directory for relative output paths (default: "
                             "current directory)")
    subs = parser.add_subparsers(dest="subcommand", required=True,
                                 metavar="subcommand")

    sim = subs.add_parser(
        "simulate", parents=[common],
        help="draw one synthetic series and write it as CSV",
        description="Draw one series from the geometric linear-process "
                    "model with m-dependent Gaussian innovations and an "
                    "optional mean shift; writes the series CSV plus a "
                    "key=value .meta sidecar.")
    sim.add_argument("--config", default=None, metavar="FILE",
                     help="key=value file with the simulation keys "
                          "(d, T, m, rho, tol, base, cov, delta, k_star, "
                          "seed); flags override it")
    sim.add_argument("--d", type=int, default=None, help="dimension")
    sim.add_argument("--T", type=int, default=None, help="series length")
    sim.add_argument("--m", type=int, default=None,
                     help="innovation dependence range")
    sim.add_argument("--rho", type=float, default=None,
                     help="filter decay rate (default: 0.5)")
    sim.add_argument("--tol", type=float, default=None,
                     help="filter truncation tolerance (default: 1e-12)")
    sim.add_argument("--base", default=None,
                     help="filter base matrix: unit_gain, identity, or d*d "
                          "comma-separated values (default: unit_gain)")
    sim.add_argument("--cov", default=None,
                     help="innovation covariance: eye, exch:OFF, or d*d "
                          "comma-separated values (default: eye)")
    sim.add_argument("--delta", default=None,
                     help="mean-shift vector, comma separated (default: none)")
    sim.add_argument("--k-star", dest="k_star", default=None,
                     help="break fraction in (0,1), or none (default: none)")
    sim.add_argument("--out", default="series.csv", metavar="FILE",
                     help="output series CSV (default: series.csv)")
    sim.add_argument("--meta", default=None, metavar="FILE",
                     help="metadata sidecar path (default: <out>.meta)")
    sim.set_defaults(func=cmd_simulate)

    spec = subs.add_parser(
        "spectrum", parents=[common],
        help="long-run covariance and smoothed-spectrum export",
        description="Estimate the smoothed spectral density of a series, "
                    "print the long-run covariance (2*pi times the real "
                    "part at frequency zero), and export the spectrum over "
                    "an evenly spaced frequency grid.")
    _add_input_flags(spec)
    _add_bandwidth_flag(spec)
    spec.add_argument("--freqs", type=int, default=257, metavar="N",
                      help="number of grid frequencies in [0, pi] "
                           "(default: 257)")
    spec.add_argument("--out", default="spectrum.csv", metavar="FILE",
                      help="output spectrum CSV (default: spectrum.csv)")
    spec.set_defaults(func=cmd_spectrum)

    det = subs.add_parser(
        "detect", parents=[common],
        help="mean-shift test, with optional estimate, scan, and curve export",
        description="Run the CUSUM mean-shift test on a series; on "
                    "rejection also print the change-point estimate. "
                    "--scan adds the local-extrema reading for multiple "
                    "breaks, --emit-curve exports the test curve.")
    _add_input_flags(det)
    _add_bandwidth_flag(det)
    det.add_argument("--alpha", type=float, default=0.05,
                     help="significance level (default: 0.05)")
    det.add_argument("--table", default=None, metavar="FILE",
                     help="critical-value table CSV (default: the shipped "
                          "table)")
    det.add_argument("--method", choices=("quadform_argmax", "norm_argmax"),
                     default="quadform_argmax",
                     help="change-point estimator (default: quadform_argmax)")
    det.add_argument("--trim", type=float, default=0.0,
                     help="fraction of the grid excluded at each end for "
                          "estimates and scans (default: 0)")
    det.add_argument("--two-pass", action="store_true",
                     help="re-estimate the long-run covariance after "
                          "demeaning the two segments at a pilot break "
                          "(default: off)")
    det.add_argument("--scan", action="store_true",
                     help="also list local extrema of the test curve")
    det.add_argument("--emit-curve", default=None, metavar="FILE",
                     help="write the test curve to this CSV")
    _add_scan_flags(det)
    det.set_defaults(func=cmd_detect)

    est = subs.add_parser(
        "estimate", parents=[common],
        help="change-point estimate without the test",
        description="Argmax change-point estimate on a series (no "
                    "hypothesis test).")
    _add_input_flags(est)
    _add_bandwidth_flag(est)
    est.add_argument("--method", choices=("quadform_argmax", "norm_argmax"),
                     default="quadform_argmax",
                     help="estimator (default: quadform_argmax)")
    est.add_argument("--trim", type=float, default=0.0,
                     help="fraction of the grid excluded at each end "
                          "(default: 0)")
    est.set_defaults(func=cmd_estimate)

    scn = subs.add_parser(
        "scan", parents=[common],
        help="local extrema of the test curve (multiple breaks)",
        description="Smooth the studentized test curve and list its local "
                    "extrema, a reading surface for multiple mean shifts.")
    _add_input_flags(scn)
    _add_bandwidth_flag(scn)
    _add_scan_flags(scn)
    scn.add_argument("--trim", type=float, default=0.0,
                     help="fraction of the grid excluded at each end "
                          "(default: 0)")
    scn.add_argument("--emit-curve", default=None, metavar="FILE",
                     help="write the smoothed-input curve to this CSV")
    scn.set_defaults(func=cmd_scan)

    crit = subs.add_parser(
        "critval", parents=[common],
        help="look up or compute a critical value",
        description="Look up the critical value for (d, alpha) in a table, "
                    "simulating it at the given Monte Carlo budget on a "
                    "miss; with --table the result is persisted back to "
                    "the file.")
    crit.add_argument("--d", type=int, required=True, help="dimension")
    crit.add_argument("--alpha", type=float, default=0.05,
                      help="significance level (default: 0.05)")
    crit.add_argument("--paths", type=int, default=None,
                      help=f"Monte Carlo paths (default: {DEFAULT_PATHS})")
    crit.add_argument("--grid", type=int, default=None,
                      help=f"time-grid resolution (default: {DEFAULT_GRID})")
    crit.add_argument("--table", default=None, metavar="FILE",
                      help="table CSV to read and extend (default: the "
                           "shipped table, read-only)")
    crit.set_defaults(func=cmd_critval)

    ben = subs.add_parser(
        "bench", parents=[common],
        help="run a benchmark grid of simulation cells",
        description="Run every cell of a benchmark grid (a file, or a "
                    "shipped name: " + ", ".join(SHIPPED_GRIDS) + ") and "
                    "write the per-cell table, estimate histograms, and a "
                    "summary into the output directory.")
    ben.add_argument("grid", help="grid file path or shipped grid name")
    ben.add_argument("--reps", type=int, default=None,
                     help="override the replication count of every cell")
    ben.add_argument("--table", default=None, metavar="FILE",
                     help="critical-value table CSV (default: the shipped "
                          "table)")
    ben.add_argument("--always-estimate", action="store_true",
                     help="estimate the break on every replication, not "
                          "only on rejections")
    ben.add_argument("--keep-going", action="store_true",
                     help="exit 0 even when some replications fail")
    ben.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except ToolkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except np.linalg.LinAlgError as exc:
        print(f"error: LinAlgError: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # safety net: anything else is a bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
