#!/usr/bin/env python3
"""Sweep the kinematical bounds and persistence durations for LiCl.

Writes one CSV per (process, temperature) with the attainable maxima of
<cos theta> and <cos^2 theta> for cutoffs j_max = 1..12 at 5 K and 10 K,
plus the fraction of a rotational period the block-optimal state keeps its
expectation above 0.5.
"""

import argparse

from rotorkick.cli import main


def run(out_dir: str) -> None:
    for preset in ("licl-5K", "licl-5K-alignment"):
        code = main(["bounds", "--preset", preset, "--out", out_dir])
        if code != 0:
            raise SystemExit(code)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/bounds", help="output directory")
    args = parser.parse_args()
    run(args.out)
