#!/usr/bin/env python3
"""Refinement study of the conjugation identity for the ellipse symbol.

Writes report.json / sweep.csv under --out and prints the residuals; the
residual must drop sharply between N = 64 and N = 128 for wave-packet data
whose spectrum avoids the conical point of the phase.
"""

import argparse

from fiolab.cli import ExperimentConfig, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/egorov")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--half-width", type=float, default=10.0)
    args = parser.parse_args()

    config = ExperimentConfig.from_dict(
        {
            "kind": "egorov",
            "symbol": {"name": "quadratic_form", "diag": [1.0, 4.0]},
            "grid": {"dim": 2, "half_width": args.half_width, "points": [32, 64, 128]},
            "data": {"sigma": 1.2, "carrier": [5.0, 0.0]},
            "seed": args.seed,
        }
    )
    report = run_experiment(config, out_dir=args.out)
    for n_pts, residual in report.results["residuals"].items():
        print(f"N={n_pts}: residual={residual:.3e}")
    print(f"report written to {args.out}")


if __name__ == "__main__":
    main()
