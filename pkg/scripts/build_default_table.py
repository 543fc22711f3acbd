"""Regenerate the critical-value table shipped in package data.

One simulation per dimension at the default budget; the three shipped levels
take their quantiles (with per-level standard errors) from that run, so a
row's provenance is the run that actually produced it.  Output is written to
src/mvcusum/data/critical_values.csv (or --out).

Usage: python scripts/build_default_table.py [--dims 1..10]
       [--alphas 0.10,0.05,0.01] [--paths 200000] [--grid 10000] [--out PATH]
"""

import argparse
import pathlib
import sys
import time

import numpy as np

from mvcusum.critical import (
    DEFAULT_GRID,
    DEFAULT_PATHS,
    CriticalEntry,
    CriticalValueTable,
    _quantile_stderr,
    default_seed,
    simulate_sup_bridges,
)

DEFAULT_OUT = (
    pathlib.Path(__file__).resolve().parent.parent
    / "src"
    / "mvcusum"
    / "data"
    / "critical_values.csv"
)


def parse_dims(text):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="1..10")
    ap.add_argument("--alphas", default="0.10,0.05,0.01")
    ap.add_argument("--paths", type=int, default=DEFAULT_PATHS)
    ap.add_argument("--grid", type=int, default=DEFAULT_GRID)
    ap.add_argument("--out", type=pathlib.Path, default=DEFAULT_OUT)
    args = ap.parse_args(argv)

    dims = parse_dims(args.dims)
    alphas = [float(a) for a in args.alphas.split(",")]
    table = CriticalValueTable()
    for d in dims:
        seed = default_seed(d)
        t0 = time.time()
        sups = simulate_sup_bridges(d, args.paths, args.grid, seed)
        for alpha in alphas:
            p = 1.0 - alpha
            table.put(
                d,
                alpha,
                CriticalEntry(
                    value=float(np.quantile(sups, p)),
                    paths=args.paths,
                    grid=args.grid,
                    seed=seed,
                    stderr_estimate=_quantile_stderr(sups, p),
                ),
            )
        done = "  ".join(
            f"a={a}: {table.get(d, a).value:.5f}" for a in alphas
        )
        print(f"d={d} seed={seed}  {done}  ({time.time() - t0:.0f}s)", flush=True)

    problems = table.check_monotone()
    for p in problems:
        print("WARNING:", p)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    table.save_csv(args.out)
    print(f"wrote {args.out}")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
