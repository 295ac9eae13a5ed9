"""Mean nearest-point distance for the object-recognition datasets.

p is each dataset's estimated intrinsic dimension, N its training-set size.
Texture datasets need N supplied by hand: --extra NAME:P:N.
"""
import argparse

from texdim.geometry import REFERENCE_IDIM, table3_report

SIZES = {"MNIST": 60000, "CIFAR-10": 50000}

ap = argparse.ArgumentParser()
ap.add_argument("--extra", action="append", default=[])
args = ap.parse_args()

rows = [(name, REFERENCE_IDIM[name], n) for name, n in SIZES.items()]
for spec in args.extra:
    name, p, n = spec.rsplit(":", 2)
    rows.append((name, float(p), int(n)))

print(f"{'dataset':<12}{'p':>8}{'N':>10}{'D(p,N)':>10}")
for r in table3_report(rows):
    print(f"{r.name:<12}{r.p:>8.2f}{r.n:>10d}{r.formatted:>10}  ({r.value:.6f})")
