"""Sampled A_p constants of power weights |z|^{2 beta} as the ball sampling is refined."""
import argparse

import numpy as np

from antiwick.acceptance import ainfty_sample
from antiwick.symbols import ainfty_sweep, radial


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--betas", type=float, nargs="+", default=[-0.5, -0.4, -0.25, 0.5, 1.0])
    ap.add_argument("--densities", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()

    print("beta,density,n_balls,best_p,constant")
    for beta in args.betas:
        w = radial("power", beta)
        for k in args.densities:
            centers, radii = ainfty_sample(k)
            _, best = ainfty_sweep(w, centers, radii)
            print(f"{beta:g},{k},{best.n_balls_sampled},{best.p:g},{best.constant_estimate:.6g}")


if __name__ == "__main__":
    main()
