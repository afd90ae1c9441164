"""Dyadic shells and Herz norms ``H^alpha_{p,q}`` on a frequency grid.

Shell ``j`` holds the modes with ``2^j < |xi| <= 2^(j+1)``: a mode sitting exactly on
a sphere ``|xi| = 2^j`` belongs to the lower shell.  Shell integrals are Riemann sums
weighted by the cell volume ``h^3``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from herzlab.spectral import FrequencyGrid, ScalarField, SpectralField

ORIGIN_SHELL = np.iinfo(np.int64).min


class EmptyShellRangeWarning(UserWarning):
    """The requested shell range does not meet any mode of the grid."""


@dataclass(frozen=True)
class HerzParams:
    alpha: float
    p: float = 2.0
    q: float = 2.0
    j_min: int | None = None
    j_max: int | None = None

    def __post_init__(self):
        for name in ("p", "q"):
            v = getattr(self, name)
            if not (v >= 1):
                raise ValueError(f"{name} must lie in [1, inf], got {v}")
        if not math.isfinite(self.alpha):
            raise ValueError("alpha must be finite")
        if self.j_min is not None and self.j_max is not None and self.j_min > self.j_max:
            raise ValueError(f"j_min={self.j_min} > j_max={self.j_max}")

    @classmethod
    def critical(cls, p: float, q: float = 2.0, j_min: int | None = None, j_max: int | None = None) -> HerzParams:
        """Scaling-critical exponent ``alpha = 2 - 3/p``."""
        return cls(2.0 - 3.0 / p, p, q, j_min, j_max)

    @property
    def is_critical(self) -> bool:
        return abs(self.alpha - (2.0 - 3.0 / self.p)) <= 1e-12

    @property
    def p_conjugate(self) -> float:
        if self.p == 1:
            return math.inf
        if math.isinf(self.p):
            return 1.0
        return self.p / (self.p - 1.0)

    def with_range(self, j_min: int | None, j_max: int | None) -> HerzParams:
        return replace(self, j_min=j_min, j_max=j_max)

    def full_range(self) -> HerzParams:
        return replace(self, j_min=None, j_max=None)


def _shell_of(k2: np.ndarray, h: float) -> np.ndarray:
    """Shell index with exact comparisons of ``h^2 |k|^2`` against ``4^j``."""
    out = np.full(k2.shape, ORIGIN_SHELL, dtype=np.int64)
    nz = k2 > 0
    r2 = h * h * k2[nz].astype(float)
    j = np.floor(0.5 * np.log2(r2)).astype(np.int64)
    # settle rounding: want 4^j < r2 <= 4^(j+1)
    for _ in range(3):
        j = np.where(r2 > np.exp2(2.0 * (j + 1)), j + 1, j)
        j = np.where(r2 <= np.exp2(2.0 * j), j - 1, j)
    out[nz] = j
    return out


@dataclass(frozen=True, eq=False)
class ShellDecomposition:
    """Partition of the nonzero modes of ``grid`` into dyadic shells."""

    grid: FrequencyGrid
    shell_index: np.ndarray
    js: tuple[int, ...]
    counts: tuple[int, ...]
    order: np.ndarray
    starts: np.ndarray

    @classmethod
    def build(cls, grid: FrequencyGrid) -> ShellDecomposition:
        idx = _shell_of(grid.k2, grid.spacing)
        flat = idx.ravel()
        nz = np.flatnonzero(flat != ORIGIN_SHELL)
        order = nz[np.argsort(flat[nz], kind="stable")]
        js, counts = np.unique(flat[order], return_counts=True)
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        idx.setflags(write=False)
        return cls(grid, idx, tuple(int(j) for j in js), tuple(int(c) for c in counts), order, starts)

    def mask(self, j: int) -> np.ndarray:
        return self.shell_index == j

    def count(self, j: int) -> int:
        try:
            return self.counts[self.js.index(j)]
        except ValueError:
            return 0

    def members(self, j: int) -> np.ndarray:
        """Flat indices of the modes in shell ``j``."""
        if j not in self.js:
            return np.empty(0, dtype=np.int64)
        i = self.js.index(j)
        s = self.starts[i]
        return self.order[s : s + self.counts[i]]

    def selected(self, j_min: int | None, j_max: int | None) -> np.ndarray:
        """Boolean selector over ``js`` for the closed range ``[j_min, j_max]``."""
        js = np.array(self.js)
        sel = np.ones(len(js), dtype=bool)
        if j_min is not None:
            sel &= js >= j_min
        if j_max is not None:
            sel &= js <= j_max
        return sel

    def integrals(self, values: np.ndarray, p: float) -> np.ndarray:
        """``h^3 sum_shell |f|^p`` per shell (or ``max_shell |f|`` for p = inf).

        ``values`` may carry leading batch axes; the result has shape
        ``(*batch, len(js))``.
        """
        a = np.abs(values).reshape(*values.shape[:-3], -1)[..., self.order]
        if math.isinf(p):
            return np.maximum.reduceat(a, self.starts, axis=-1)
        return self.grid.cell_volume * np.add.reduceat(a**p, self.starts, axis=-1)


@lru_cache(maxsize=32)
def shell_decomposition(grid: FrequencyGrid) -> ShellDecomposition:
    return ShellDecomposition.build(grid)


def herz_norms(values: np.ndarray, grid: FrequencyGrid, params: HerzParams) -> np.ndarray:
    """Herz norm over the last three axes of ``values``; leading axes are batch."""
    shells = shell_decomposition(grid)
    sel = shells.selected(params.j_min, params.j_max)
    if not np.any(sel):
        warnings.warn(
            f"shell range [{params.j_min}, {params.j_max}] misses grid shells {shells.js}",
            EmptyShellRangeWarning,
            stacklevel=2,
        )
        return np.zeros(values.shape[:-3])
    js = np.array(shells.js)[sel]
    S = shells.integrals(values, params.p)[..., sel]
    local = S if math.isinf(params.p) else S ** (1.0 / params.p)
    weighted = np.exp2(params.alpha * js) * local
    if math.isinf(params.q):
        return np.max(weighted, axis=-1)
    return np.sum(weighted**params.q, axis=-1) ** (1.0 / params.q)


def herz_norm(f: ScalarField, params: HerzParams) -> float:
    """``{ sum_j 2^(q j alpha) (int_shell_j |f|^p)^(q/p) }^(1/q)`` on the grid.

    ``p = inf`` replaces the shell integral by the shell maximum and ``q = inf``
    replaces the sum over shells by a supremum.  A shell range that misses the
    grid gives 0 and an :class:`EmptyShellRangeWarning`.
    """
    return float(herz_norms(f.values, f.grid, params))


def vector_herz_norm(u: SpectralField, params: HerzParams) -> float:
    """Maximum of the component Herz norms."""
    return float(np.max(herz_norms(u.data, u.grid, params)))


def random_herz_field(
    grid: FrequencyGrid, params: HerzParams, target_norm: float, seed: int
) -> ScalarField:
    """Nonnegative random field supported on shells ``[j_min, j_max]`` with a prescribed
    Herz norm.

    Each shell gets a log-uniform weight and each mode a uniform amplitude; the
    result is then rescaled globally so ``herz_norm == target_norm``.
    """
    if not target_norm > 0:
        raise ValueError("target_norm must be positive")
    shells = shell_decomposition(grid)
    j_min = shells.js[0] if params.j_min is None else params.j_min
    j_max = shells.js[-1] if params.j_max is None else params.j_max
    missing = [j for j in range(j_min, j_max + 1) if shells.count(j) == 0]
    if missing:
        raise ValueError(f"shells {missing} do not meet the grid (grid shells {shells.js})")
    rng = np.random.default_rng(seed)
    values = np.zeros(grid.size)
    for j in range(j_min, j_max + 1):
        members = shells.members(j)
        vol = len(members) * grid.cell_volume
        scale = math.exp(rng.uniform(-2.5, 2.5)) * 2.0 ** (-j * params.alpha)
        if math.isfinite(params.p):
            scale *= vol ** (-1.0 / params.p)
        values[members] = scale * rng.uniform(0.05, 1.0, size=len(members))
    values = values.reshape(grid.shape)
    norm = float(herz_norms(values, grid, params.with_range(j_min, j_max)))
    return ScalarField(grid, values * (target_norm / norm))


def dyadic_rescale(f: ScalarField, m: int) -> ScalarField:
    """``g(xi) = 4^m f(2^m xi)`` realized on the grid with spacing ``h / 2^m``.

    With ``alpha = 2 - 3/p`` this is the frequency-side form of the critical
    scaling ``u0 -> lam u0(lam x)`` and leaves the Herz norm unchanged.
    """
    grid = FrequencyGrid(f.grid.half_extent, f.grid.spacing * 2.0 ** (-m))
    return ScalarField(grid, 4.0**m * f.values)
