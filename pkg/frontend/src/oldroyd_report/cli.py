"""Command line for the reporting tool.

    oldroyd-report plot --csv series.csv --column l2_u --model alg \
        --window 10,63 [--predicted -0.5] [--out plot.svg]
    oldroyd-report build --csv a.csv [--csv b.csv] [--verdict verdict.json] \
        --out-dir report [--format svg|png] [--predicted A8=-0.5]
"""

from __future__ import annotations

import argparse
import sys

from .plots import plot_decay
from .report import ReportSpec, build_report

_MODELS = {"alg": "algebraic", "exp": "exponential",
           "algebraic": "algebraic", "exponential": "exponential"}


def _parse_window(raw: str):
    lo, _, hi = raw.partition(",")
    return (float(lo), float(hi))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="oldroyd-report")
    sub = ap.add_subparsers(dest="command", required=True)

    p_plot = sub.add_parser("plot", help="render one decay plot")
    p_plot.add_argument("--csv", required=True)
    p_plot.add_argument("--column", required=True)
    p_plot.add_argument("--model", required=True, choices=sorted(_MODELS))
    p_plot.add_argument("--window", default=None)
    p_plot.add_argument("--predicted", type=float, default=None)
    p_plot.add_argument("--out", default=None)
    p_plot.add_argument("--format", default="svg", choices=["svg", "png"])

    p_build = sub.add_parser("build", help="build the full report")
    p_build.add_argument("--csv", action="append", required=True)
    p_build.add_argument("--verdict", default=None)
    p_build.add_argument("--out-dir", default="report")
    p_build.add_argument("--format", default="svg", choices=["svg", "png"])
    p_build.add_argument("--predicted", action="append", default=[],
                         help="criterion=value overlay, repeatable")
    p_build.add_argument("--extra-column", action="append", default=[],
                         help="column:model extra plot, repeatable")

    args = ap.parse_args(argv)

    if args.command == "plot":
        window = _parse_window(args.window) if args.window else None
        path, fit = plot_decay(
            args.csv, column=args.column, model=_MODELS[args.model],
            window=window, predicted=args.predicted,
            out_path=args.out, image_format=args.format,
        )
        label = "exponent" if fit.model == "algebraic" else "rate"
        print(f"{path}: {label}={fit.exponent_or_rate:.6g} "
              f"r2={fit.r_squared:.6f}")
        return 0

    predicted = {}
    for item in args.predicted:
        key, _, val = item.partition("=")
        predicted[key.strip()] = float(val)
    extra = []
    for item in args.extra_column:
        col, _, model = item.partition(":")
        extra.append((col.strip(), _MODELS[model.strip() or "exp"]))
    spec = ReportSpec(
        csv_paths=args.csv,
        verdict_path=args.verdict,
        out_dir=args.out_dir,
        image_format=args.format,
        predicted=predicted,
        extra_columns=extra,
    )
    result = build_report(spec)
    print(f"wrote {result['markdown']} and {result['html']} "
          f"({len(result['plots'])} plot(s))")
    for w in result["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
