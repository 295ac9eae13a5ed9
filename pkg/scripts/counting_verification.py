"""Closed-form GLCM feature-space counts against exhaustive enumeration."""
import argparse

from texdim.counting import STATISTICS, CountingParams, count_report

ap = argparse.ArgumentParser()
ap.add_argument("--cap", type=int, default=10**6)
args = ap.parse_args()

print(f"{'n':>3}{'k':>3}  {'statistic':<14}{'formula':>10}{'oracle':>10}  flags")
for n, k in ((1, 2), (2, 2), (3, 2), (4, 2), (1, 3), (2, 3), (1, 4), (2, 4)):
    for stat in STATISTICS:
        r = count_report(CountingParams(n, k), stat, brute_force=True, cap=args.cap)
        oracle = "-" if r.oracle_value is None else r.oracle_value
        print(f"{n:>3}{k:>3}  {stat:<14}{str(r.formula_value):>10}{str(oracle):>10}  {','.join(r.flags)}")
