#!/usr/bin/env python3
"""Angular error of the weighted-average eigenmeasure as a function of N and eps.

Compares eps = 1/N with a fixed eps against the exact Perron eigenvector of a
monodromy matrix.
"""
import argparse

from slitherkit.currents import (
    GeodesicCurrent,
    MonodromyAction,
    angular_distance,
    eigenmeasure,
    perron_vector,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--matrix", default="2,1,1,1")
    ap.add_argument("--seed", default="1,0")
    ap.add_argument("--fixed-eps", type=float, default=0.5)
    ap.add_argument("--N", default="10,20,40,80,160")
    args = ap.parse_args()

    a, b, c, d = (int(v) for v in args.matrix.split(","))
    Z = MonodromyAction(((a, b), (c, d)))
    seed = GeodesicCurrent.torus(tuple(float(v) for v in args.seed.split(",")))
    _, vec = perron_vector(Z)
    target = [float(x) for x in vec]

    print(f"{'N':>5} {'eps=1/N':>12} {f'eps={args.fixed_eps}':>12}")
    for n in (int(v) for v in args.N.split(",")):
        inv = angular_distance(eigenmeasure(Z, seed, n, eps=1 / n).vector, target)
        fixed = angular_distance(eigenmeasure(Z, seed, n, eps=args.fixed_eps).vector, target)
        print(f"{n:>5} {inv:>12.3e} {fixed:>12.3e}")


if __name__ == "__main__":
    main()
