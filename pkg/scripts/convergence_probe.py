#!/usr/bin/env python3
"""Overlap counts of a triple box under the genus-2 surface group and under an irrational rotation.

The surface group count settles after a few word lengths; the rotation count
keeps climbing because the orbit of the box keeps returning.
"""
import argparse
import math
from fractions import Fraction

from slitherkit import GroupRepresentation, LiftedCircleMap
from slitherkit.hyperbolic import genus2_fuchsian
from slitherkit.triples import Triple, TripleBox, proper_discontinuity_probe


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-len", type=int, default=8)
    ap.add_argument("--rotation-len", type=int, default=12)
    ap.add_argument("--box", default="0,0.03,0.06,0.0145", help="u,s,p,r for the genus-2 probe")
    args = ap.parse_args()

    u, s, p, r = (float(v) for v in args.box.split(","))
    g2 = proper_discontinuity_probe(genus2_fuchsian().representation(), TripleBox(Triple(u, s, p), r),
                                    args.max_len)
    print("genus-2 surface group")
    print("  elements by length:", g2["element_counts"])
    print("  stabilized:", g2["stabilized"])
    print("  elements:", [w or "identity" for w in g2["elements"]])

    theta = math.sqrt(2) / 60
    rot = GroupRepresentation({"a": LiftedCircleMap.rotation(theta)})
    box = TripleBox(Triple(0, Fraction(1, 3), Fraction(2, 3)), 0.15)
    out = proper_discontinuity_probe(rot, box, args.rotation_len)
    print("rotation by sqrt(2)/60")
    print("  elements by length:", out["element_counts"])
    print("  stabilized:", out["stabilized"])


if __name__ == "__main__":
    main()
