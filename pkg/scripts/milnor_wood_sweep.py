#!/usr/bin/env python3
"""Rotation-number inequalities over seeded random PL pairs, plus the commutator bound with c = Z."""
import argparse
import json
import time

import numpy as np

from slitherkit import LiftedCircleMap
from slitherkit.circle_homeo import random_pl_map
from slitherkit.rotation import milnor_wood_suite, verify_commutator_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--iters", type=int, default=2000)
    ap.add_argument("--json", action="store_true", help="print the full suite report")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    pairs = [(random_pl_map(rng), random_pl_map(rng)) for _ in range(args.pairs)]

    t0 = time.perf_counter()
    suite = milnor_wood_suite(pairs, args.iters)
    t1 = time.perf_counter()
    z = LiftedCircleMap.translation(1)
    comm = [verify_commutator_bound(a, b, z) for a, b in pairs]
    t2 = time.perf_counter()

    if args.json:
        print(json.dumps(suite.to_dict(), indent=2, default=str))
        return
    print(f"pairs                  {args.pairs}")
    print(f"delta_r in [-1, 1]     {suite.delta.status}  ({len(suite.delta.violations)} violations)")
    print(f"|r([a,b])| <= 1        {suite.single.status}  ({len(suite.single.violations)} violations)")
    print(f"|r([a,b])| <= 1/2      {suite.half.status} on {suite.half_pairs} pairs with non-integral r(a)")
    print(f"max half-bound excess  {suite.max_half_excess:.3e}")
    print(f"suite time             {t1 - t0:.1f} s")
    worst = min(r.worst_margin for r in comm)
    print(f"Z^-2 < [a,b] < Z^2     {sum(len(r.violations) for r in comm)} violations, "
          f"tightest margin {float(worst):.4f}, {t2 - t1:.1f} s")


if __name__ == "__main__":
    main()
