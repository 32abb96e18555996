#!/usr/bin/env python3
"""Tabulate the dynamical Lie-algebra dimensions for low cutoffs.

For j_max = 1..3 and both processes, reports the computed algebra dimension
against the counts required for general and for symmetry-restricted
simultaneous controllability of the invariant blocks.
"""

import argparse

from rotorkick.cli import main


def run(out_dir: str) -> None:
    for preset in ("licl-5K", "licl-5K-alignment"):
        code = main(["controllability", "--preset", preset, "--out", out_dir, "--j-max", "1", "2", "3"])
        if code != 0:
            raise SystemExit(code)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/algebra", help="output directory")
    args = parser.parse_args()
    run(args.out)
