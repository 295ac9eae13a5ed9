"""VC scales and excess-error bounds for Dropout vs DropConnect on a (w, p) grid.

Points where the excess-error radicand goes nonpositive are printed as 'undefined'.
"""
import argparse

from texdim.capacity import excess_error_bound, monotone_regime, vc_bound_dropconnect, vc_bound_dropout
from texdim.errors import DomainError

ap = argparse.ArgumentParser()
ap.add_argument("-N", type=int, default=10**6)
ap.add_argument("--eta", type=float, default=0.05)
args = ap.parse_args()


def gamma(h):
    try:
        return f"{excess_error_bound(h, args.N, args.eta):.6g}"
    except DomainError:
        return "undefined"


print("w,p,vc_dropout,vc_dropconnect,gamma_dropout,gamma_dropconnect,monotone_do,monotone_dc")
for w in (10, 30, 100, 300, 1000):
    for i in range(10):
        p = i / 10
        h_do, h_dc = vc_bound_dropout(w, p), vc_bound_dropconnect(w, p)
        print(f"{w},{p},{h_do:.6g},{h_dc:.6g},{gamma(h_do)},{gamma(h_dc)},"
              f"{monotone_regime(h_do, args.N)},{monotone_regime(h_dc, args.N)}")
