#!/usr/bin/env python3
"""Weighted operator norms of the ellipse canonical transform across N.

Sweeps the grid resolution at fixed box size for one weight exponent and
reports the fitted log-log slope; slopes near zero indicate the uniform
boundedness the unweighted theory predicts, growing slopes expose the
fractional-weight box artifacts discussed in the test suite.
"""

import argparse

from fiolab.cli import ExperimentConfig, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results/norms")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--weight", type=float, default=0.0, help="m for L2_m -> L2_m")
    parser.add_argument("--points", type=int, nargs="+", default=[32, 64, 128])
    args = parser.parse_args()

    config = ExperimentConfig.from_dict(
        {
            "kind": "norm",
            "operator": {"kind": "canonical"},
            "symbol": {"name": "quadratic_form", "diag": [1.0, 4.0]},
            "grid": {"dim": 2, "half_width": 10.0, "points": args.points},
            "weights": {"m_in": args.weight, "m_out": args.weight},
            "tol": 1e-5,
            "max_iters": 150,
            "seed": args.seed,
        }
    )
    report = run_experiment(config, out_dir=args.out)
    for row in report.sweep_rows:
        print(dict(zip(report.sweep_header, row)))
    if "log_slope" in report.results:
        print(f"log-log slope across N: {report.results['log_slope']:+.4f}")
    print(f"report written to {args.out}")


if __name__ == "__main__":
    main()
