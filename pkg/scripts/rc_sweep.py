"""Relative contrast against p for a few n, plus the fitted log-log slope.

Output is plot-ready CSV on stdout.
"""
import numpy as np

from texdim.geometry import rc_decay_exponent, relative_contrast

ps = np.geomspace(1, 1e8, 33)
print("n,p,rc_paper,rc_corrected")
for n in (1, 2, 3, 10):
    for p in ps:
        print(f"{n},{p:.6g},{relative_contrast(n, p, 'paper'):.10g},{relative_contrast(n, p, 'corrected'):.10g}")

tail = [10.0**e for e in range(3, 9)]
for n in (2, 3, 10):
    s_p, s_c = rc_decay_exponent(n, tail, "paper"), rc_decay_exponent(n, tail, "corrected")
    print(f"# n={n}: slope paper {s_p:.4f}, corrected {s_c:.4f}, -(n+1) would be {-(n + 1)}")
