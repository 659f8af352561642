"""soficreport: render figures/markdown from soficlab artifact directories."""

from __future__ import annotations

import argparse
import sys

from .render import ReportSpec, SchemaMismatch, render_report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="soficreport")
    parser.add_argument("csv", nargs="+", help="artifact CSV files")
    parser.add_argument("--out", default="report", help="output directory")
    parser.add_argument("--plots", default="decay,integrability,covolume",
                        help="comma-separated plot kinds")
    args = parser.parse_args(argv)
    spec = ReportSpec(csv_paths=args.csv, out_dir=args.out,
                      plots=tuple(args.plots.split(",")))
    try:
        report = render_report(spec)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return 2
    for w in report.warnings:
        print(f"warning: {w}")
    print(f"wrote {len(report.figures)} figures and {report.markdown_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
