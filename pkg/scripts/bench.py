"""Space benchmark: dfs and aux modes over a range of grid sizes, written
as CSV with log-log fits printed per mode."""

import argparse
import csv
import sys

from gridreach import EngineConfig
from gridreach.cli import CSV_FIELDS, bench_rows, fit_rows
from gridreach.instrument import FitError


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 8, 16, 32, 64])
    ap.add_argument("--seeds", type=int, default=1)
    ap.add_argument("--p", type=float, default=0.7)
    ap.add_argument("--out", default="bench.csv")
    args = ap.parse_args()
    rows = []
    with open(args.out, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        w.writeheader()
        for row in bench_rows(args.sizes, args.p, range(args.seeds), EngineConfig()):
            w.writerow(row)
            fh.flush()
            rows.append(row)
            print(row, file=sys.stderr, flush=True)
    for mode in ("dfs", "aux"):
        try:
            fit = fit_rows(rows, mode)
            print(f"{mode}: slope={fit.slope:.3f} r2={fit.r2:.3f}")
        except FitError as exc:
            print(f"{mode}: {exc}")


if __name__ == "__main__":
    main()
