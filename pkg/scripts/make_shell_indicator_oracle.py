"""Regenerate the shell-indicator reference values used by the CLI test.

Everything here goes through explicit pair sums (no FFT, no shell bookkeeping), so
the file is an independent oracle for ``herzlab convolution-test --mode
shell_indicator``.

    python scripts/make_shell_indicator_oracle.py [--out tests/data/shell_indicator_oracle.json]
"""

from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

import numpy as np

from herzlab.analyticity import decompose_direct
from herzlab.herz import HerzParams
from herzlab.spectral import FrequencyGrid, ScalarField, convolve_direct_arrays


def plain_herz_norm(values: np.ndarray, grid: FrequencyGrid, params: HerzParams) -> float:
    """Herz norm with shells written as inequalities on ``|xi|^2``."""
    r2 = grid.xi2
    total = 0.0
    j = math.floor(0.5 * math.log2(float(r2[grid.nonzero].min()))) - 1
    while 4.0**j < r2.max():
        mask = (r2 > 4.0**j) & (r2 <= 4.0 ** (j + 1))
        if mask.any():
            s = grid.cell_volume * float(np.sum(np.abs(values[mask]) ** params.p))
            total += (2.0 ** (j * params.alpha) * s ** (1.0 / params.p)) ** params.q
        j += 1
    return total ** (1.0 / params.q)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="tests/data/shell_indicator_oracle.json")
    ap.add_argument("--N", type=int, default=8)
    ap.add_argument("--h", type=float, default=0.25)
    ap.add_argument("--shell", type=int, default=0)
    args = ap.parse_args()

    grid = FrequencyGrid(args.N, args.h)
    params = HerzParams(0.5, 2.0, 2.0)
    r2 = grid.xi2
    j = args.shell
    ind = ((r2 > 4.0**j) & (r2 <= 4.0 ** (j + 1))).astype(float)
    conv = convolve_direct_arrays(ind, ind, grid).real
    lhs = plain_herz_norm(grid.inv_xi_norm * conv, grid, params)
    rhs = plain_herz_norm(ind, grid, params) ** 2
    W, I1, I2, I3 = decompose_direct(ScalarField(grid, ind), ScalarField(grid, ind), params)
    payload = {
        "grid": {"N": args.N, "h": args.h},
        "herz": {"alpha": params.alpha, "p": params.p, "q": params.q},
        "shell": j,
        "values": {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs, "W": W, "I1": I1, "I2": I2, "I3": I3},
    }
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(json.dumps(payload["values"], indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
