#!/usr/bin/env python3
"""Run the greedy pulse trains for the LiCl reference configurations.

Each preset produces the time series of the observable expectation and the
target overlap, for both the control-space propagation and the enlarged
j_sim = 16 propagation, together with the per-kick record (times,
amplitudes, maxima, slopes) and the post-train figures of merit.
"""

import argparse
import os

from rotorkick.cli import main

PRESETS = ("licl-5K", "licl-5K-s2", "licl-5K-alignment", "licl-5K-alignment-s2")


def run(out_dir: str) -> None:
    for preset in PRESETS:
        out = os.path.join(out_dir, preset)
        code = main(["simulate", "--preset", preset, "--out", out])
        if code != 0:
            raise SystemExit(code)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/trains", help="output directory")
    args = parser.parse_args()
    run(args.out)
