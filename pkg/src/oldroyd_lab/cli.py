"""Command-line entry point.

Subcommands::

    oldroyd-lab run <config>                 integrate one scenario
    oldroyd-lab verify <suite>               run acceptance criteria
    oldroyd-lab fit <csv> --model {alg,exp} --window a,b [--column NAME]
    oldroyd-lab filters <dim,N,box[,k0]>     export the dyadic filter bank

Global flags: --out-dir, --quiet, --strict-means.  The environment variable
``OLDROYD_LAB_THREADS`` caps verify worker parallelism.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import spectral
from .acceptance import SUITES, run_suite
from .config import ConfigError, parse_config
from .diagnostics import fit_decay
from .grid import build_grid
from .lp import build_blocks, export_filters_csv
from .scenarios import (
    column_expression,
    read_series_csv,
    run_scenario,
    suite_exit_code,
    worker_cap,
)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="oldroyd-lab",
        description="periodic-domain simulator and frequency-analysis toolkit "
                    "for compressible viscoelastic flow",
    )
    ap.add_argument("--out-dir", default="out", help="artifact directory")
    ap.add_argument("--quiet", action="store_true", help="suppress progress lines")
    ap.add_argument("--strict-means", action="store_true",
                    help="error (instead of annihilate) on non-mean-free input "
                         "to inverse operators")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one scenario config")
    p_run.add_argument("config", help="path to a flat key-value config file")

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite",
                          help=f"suite name ({', '.join(sorted(SUITES))}) "
                               "or comma list of criteria like A1,A4")
    p_verify.add_argument("--jobs", type=int, default=1,
                          help="parallel workers (capped by OLDROYD_LAB_THREADS)")

    p_fit = sub.add_parser("fit", help="fit a decay law to a CSV column")
    p_fit.add_argument("csv")
    p_fit.add_argument("--model", choices=["alg", "exp"], required=True)
    p_fit.add_argument("--window", required=True, help="a,b")
    p_fit.add_argument("--column", default="l2_u",
                       help="column name or '+'-joined sum (default l2_u)")

    p_filters = sub.add_parser("filters", help="export the dyadic filter bank")
    p_filters.add_argument("grid_spec", help="dim,N,box_length[,k0]; "
                                             "lengths accept a pi suffix")
    p_filters.add_argument("--csv", default=None, help="output CSV path")
    return ap


def _cmd_run(args) -> int:
    try:
        cfg = parse_config(Path(args.config).read_text())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    result = run_scenario(cfg, args.out_dir, quiet=args.quiet)
    return result.exit_code


def _cmd_verify(args) -> int:
    jobs = worker_cap(args.jobs)
    verdicts = run_suite(args.suite, args.out_dir, jobs=jobs, quiet=args.quiet)
    return suite_exit_code(verdicts)


def _cmd_fit(args) -> int:
    from .config import _parse_float

    cols = read_series_csv(args.csv)
    lo_s, _, hi_s = args.window.partition(",")
    try:
        window = (_parse_float(lo_s), _parse_float(hi_s))
    except ValueError:
        print("--window must be 'a,b'", file=sys.stderr)
        return 2
    model = {"alg": "algebraic", "exp": "exponential"}[args.model]
    y = column_expression(cols, args.column)
    fit = fit_decay(list(zip(cols["t"], y)), model, window)
    label = "exponent" if model == "algebraic" else "rate"
    print(f"model={model} column={args.column} window=[{window[0]:g},{window[1]:g}]")
    print(f"{label}={fit.exponent_or_rate!r} amplitude={fit.amplitude!r} "
          f"r_squared={fit.r_squared!r} samples={fit.n_samples}")
    return 0


def _cmd_filters(args) -> int:
    from .config import _parse_float

    parts = [p.strip() for p in args.grid_spec.split(",") if p.strip()]
    if len(parts) not in (3, 4):
        print("grid spec must be dim,N,box_length[,k0]", file=sys.stderr)
        return 2
    dim, n = int(parts[0]), int(parts[1])
    box = _parse_float(parts[2])
    k0 = int(parts[3]) if len(parts) == 4 else None
    grid = build_grid(dim, n, box)
    blocks = build_blocks(grid, k0)
    out = Path(args.csv) if args.csv else Path(args.out_dir) / "filters.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    export_filters_csv(blocks, out)
    if not args.quiet:
        print(f"filter bank k in [{blocks.k_min}, {blocks.k_max}], "
              f"k0={blocks.k0} -> {out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    spectral.set_strict_means(args.strict_means)
    Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "fit":
        return _cmd_fit(args)
    if args.command == "filters":
        return _cmd_filters(args)
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
