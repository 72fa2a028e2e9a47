"""Bottom eigenvalue and smallest low-lying gap of Op(x^2) along a basis-size ladder.

The truncated bottom approaches the continuum edge h/2 from above while the
gaps between low eigenvalues close, the finite-basis signature of essential
spectrum.  |z|^2 is shown for contrast.
"""
import argparse

from antiwick import CoherentFrame, polynomial
from antiwick.quantize import assemble
from antiwick.spectral import converge_bottom, eigen_accumulation


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, default=1.0)
    ap.add_argument("--ladder", type=int, nargs="+", default=[32, 64, 128, 256, 512])
    args = ap.parse_args()

    x2 = polynomial([(2, 0, 0.25), (1, 1, 0.5), (0, 2, 0.25)], name="x2")
    z2 = polynomial([(1, 1, 1.0)], name="z2")
    print("N_b,x2_bottom,x2_min_gap,z2_bottom,z2_min_gap")
    for n in args.ladder:
        xb = converge_bottom(x2, CoherentFrame(args.h), [n]).bottom
        zb = converge_bottom(z2, CoherentFrame(args.h), [n]).bottom
        xg = eigen_accumulation(assemble(x2, args.h, n), 10).min()
        zg = eigen_accumulation(assemble(z2, args.h, n), 10).min()
        print(f"{n},{xb:.12g},{xg:.12g},{zb:.12g},{zg:.12g}")


if __name__ == "__main__":
    main()
