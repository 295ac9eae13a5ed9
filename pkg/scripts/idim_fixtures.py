"""MLE intrinsic dimension on embedded cubes across seeds and k ranges."""
import argparse

import numpy as np

from texdim.idim import IdimConfig, generate_embedded_cube, mle_intrinsic_dimension

ap = argparse.ArgumentParser()
ap.add_argument("--n", type=int, default=2000)
ap.add_argument("--D", type=int, default=50)
ap.add_argument("--seeds", type=int, default=5)
args = ap.parse_args()

print("p,kmin,kmax,average,mean,std,min,max")
for p in (1, 2, 5, 10, 20):
    for kmin, kmax in ((10, 20), (5, 10), (20, 40)):
        for avg in ("mean", "inverse"):
            cfg = IdimConfig(kmin, kmax, avg)
            vals = np.array(
                [mle_intrinsic_dimension(generate_embedded_cube(args.n, p, args.D, seed=s), cfg).global_value
                 for s in range(args.seeds)]
            )
            print(f"{p},{kmin},{kmax},{avg},{vals.mean():.4f},{vals.std():.4f},{vals.min():.4f},{vals.max():.4f}")
