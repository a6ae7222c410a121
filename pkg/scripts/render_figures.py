#!/usr/bin/env python3
"""Write every SVG figure into a directory."""
import argparse
from pathlib import Path

from slitherkit.render import FIGURES, SceneConfig, render


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="figures")
    ap.add_argument("--leaves", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--size", type=int, default=480)
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for fig in FIGURES:
        path = out / f"{fig}.svg"
        data = render(SceneConfig(fig, args.leaves, args.seed, args.size, str(path)))
        print(f"{path}  {len(data):>8} bytes")


if __name__ == "__main__":
    main()
