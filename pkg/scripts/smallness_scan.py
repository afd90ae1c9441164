"""Locate the empirical contraction boundary of the Picard iteration.

Runs the iteration on scaled copies of a built-in family without the smallness
pre-check and reports, per amplitude, the data norm, the first contraction ratio
and whether the iteration converged.

    python3 scripts/smallness_scan.py --family x2_gaussian --N 8 --h 0.25
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from herzlab.herz import vector_herz_norm
from herzlab.initial_data import FAMILIES, family
from herzlab.solver import SmallnessViolated, SolverConfig, picard_solve
from herzlab.spectral import FrequencyGrid


def scan(fam: str, N: int, h: float, eps_values, n_times: int, max_iterations: int):
    grid = FrequencyGrid(N, h)
    cfg = SolverConfig.for_grid(grid, n_times=n_times, enforce_smallness=False, max_iterations=max_iterations)
    for eps in eps_values:
        u0 = family(fam, grid, eps=eps)
        size = vector_herz_norm(u0, cfg.herz)
        try:
            res = picard_solve(u0, cfg)
            ratio = res.contraction_ratios[0] if res.contraction_ratios else 0.0
            yield eps, size, ratio, res.iterations, "converged" if res.converged else "max-iterations"
        except SmallnessViolated:
            yield eps, size, float("nan"), -1, "diverged"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="x2_gaussian", choices=FAMILIES)
    ap.add_argument("--N", type=int, default=8)
    ap.add_argument("--h", type=float, default=0.25)
    ap.add_argument("--eps-min", type=float, default=1e-3)
    ap.add_argument("--eps-max", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--n-times", type=int, default=32)
    ap.add_argument("--max-iterations", type=int, default=200)
    args = ap.parse_args(argv)
    eps_values = np.geomspace(args.eps_min, args.eps_max, args.points)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("eps", "herz_norm", "first_ratio", "iterations", "status"))
    for row in scan(args.family, args.N, args.h, eps_values, args.n_times, args.max_iterations):
        w.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
