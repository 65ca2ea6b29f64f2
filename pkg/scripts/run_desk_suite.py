#!/usr/bin/env python3
"""Run the four desk-scale experiments over several seeds and print a summary.

Writes one directory per preset under --out (default runs/desk), each with
per-seed subdirectories of CSV traces and SVG charts. Finishes in a few
minutes on a laptop.
"""

import argparse
import dataclasses
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from freqlab.config import preset_config
from freqlab.experiments import run_experiment

DESK_PRESETS = ("desk-toy-ce", "desk-mnist-pca", "desk-poisson-dnn", "desk-d-jacobi")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="runs/desk", help="output root directory")
    parser.add_argument("--seeds", type=int, default=3, help="seeds per preset")
    parser.add_argument("--timing", action="store_true", help="record wall-clock columns")
    args = parser.parse_args()

    for preset in DESK_PRESETS:
        cfg = dataclasses.replace(
            preset_config(preset),
            seeds=args.seeds,
            out_dir=str(Path(args.out) / preset),
            svg=True,
            timing=args.timing,
        )
        t0 = time.time()
        reports = run_experiment(cfg)
        print(f"== {preset} ({time.time() - t0:.0f}s)")
        for report in reports:
            keys = [k for k in ("final_loss", "rel_sup_error", "plateau_step",
                                "cold_iterations", "first_passage", "post_iterations")
                    if k in report.metrics]
            line = ", ".join(f"{k}={report.metrics[k]}" for k in keys)
            print(f"   seed {report.seed}: {line}")


if __name__ == "__main__":
    main()
