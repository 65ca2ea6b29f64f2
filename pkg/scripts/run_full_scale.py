#!/usr/bin/env python3
"""Run one of the full-scale presets (fig2/fig3/fig4/fig5).

These use the original network widths and epoch budgets and can take hours of
CPU time; prefer scripts/run_desk_suite.py for a quick look. fig3 needs MNIST
IDX files (the 10000-image test split is the intended input) via
--mnist-images/--mnist-labels, or --synthetic to substitute the built-in
two-blob dataset.
"""

import argparse
import dataclasses
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from freqlab.config import preset_config
from freqlab.experiments import run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("preset", choices=["fig2", "fig3", "fig4", "fig5"])
    parser.add_argument("--out", default=None, help="output directory (default runs/<preset>)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--epochs", type=int, default=None, help="override the epoch budget")
    parser.add_argument("--mnist-images", default="")
    parser.add_argument("--mnist-labels", default="")
    parser.add_argument("--synthetic", action="store_true")
    args = parser.parse_args()

    cfg = preset_config(args.preset)
    overrides = {
        "seed": args.seed,
        "out_dir": args.out or f"runs/{args.preset}",
        "svg": True,
        "timing": True,
    }
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.mnist_images:
        overrides["mnist_images"] = args.mnist_images
        overrides["mnist_labels"] = args.mnist_labels
    if args.synthetic:
        overrides["synthetic"] = True
    cfg = dataclasses.replace(cfg, **overrides)

    for report in run_experiment(cfg):
        print(f"seed {report.seed} -> {report.out_dir}")
        for key, value in sorted(report.metrics.items()):
            print(f"   {key} = {value}")


if __name__ == "__main__":
    main()
