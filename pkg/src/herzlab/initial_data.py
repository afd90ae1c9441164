"""Built-in initial-data families and random symmetric data.

Every family is divergence-free and normalized so its largest amplitude equals
``eps``.
"""

from __future__ import annotations

import numpy as np

from herzlab.spectral import FrequencyGrid, SpectralField, leray_arrays
from herzlab.symmetry import X2_LABEL, impose_label, swap12

FAMILIES = ("zero", "x2_gaussian", "x2_imaginary", "x3_imaginary", "x1_subradial_tau", "single_mode_pair")


def _normalized(grid: FrequencyGrid, data: np.ndarray, eps: float) -> SpectralField:
    data = np.array(data, dtype=complex)
    N = grid.half_extent
    data[:, N, N, N] = 0.0
    m = float(np.max(np.abs(data)))
    if m > 0:
        data *= eps / m
    return SpectralField(grid, data)


def gaussian_envelope(grid: FrequencyGrid, sigma: float) -> np.ndarray:
    return np.exp(-grid.xi2 / (2.0 * sigma**2))


def x2_gaussian(grid: FrequencyGrid, eps: float = 1e-3, sigma: float = 0.5) -> SpectralField:
    """Leray projection of ``env(|xi|) (xi2 xi3 + i xi1, xi1 xi3 + i xi2, xi1 xi2 + i xi3)``.

    The envelope is radial and the projector multiplies by even functions of
    ``xi_k xi_l / |xi|^2`` type, so the X2 parity pattern is kept.
    """
    x1, x2, x3 = grid.xi
    env = gaussian_envelope(grid, sigma)
    raw = env * np.stack([x2 * x3 + 1j * x1, x1 * x3 + 1j * x2, x1 * x2 + 1j * x3])
    return _normalized(grid, leray_arrays(raw, grid), eps)


def x2_imaginary(grid: FrequencyGrid, eps: float = 1e-3, sigma: float = 0.5) -> SpectralField:
    """Purely imaginary X2 data without swap symmetry: ``i Leray(env (xi1 xi2^2, xi2 xi3^2, xi3 xi1^2))``."""
    x1, x2, x3 = grid.xi
    env = gaussian_envelope(grid, sigma)
    raw = 1j * env * np.stack([x1 * (1 + x2**2), x2 * (1 + 2 * x3**2), x3 * (1 + 3 * x1**2)])
    return _normalized(grid, leray_arrays(raw, grid), eps)


def x3_imaginary(grid: FrequencyGrid, eps: float = 1e-3, sigma: float = 0.5) -> SpectralField:
    """Purely imaginary data with both the X1 swap and the X2 parities:
    ``i Leray(env (xi1 xi2^2, xi2 xi1^2, xi3 (xi1^2 + xi2^2)))``."""
    x1, x2, x3 = grid.xi
    env = gaussian_envelope(grid, sigma)
    raw = 1j * env * np.stack([x1 * (1 + x2**2), x2 * (1 + x1**2), x3 * (x1**2 + x2**2)])
    return _normalized(grid, leray_arrays(raw, grid), eps)


def x1_subradial_tau(
    grid: FrequencyGrid, eps: float = 1e-3, tau: float = 4.0, sigma: float = 0.5
) -> SpectralField:
    """``(xi1 g, xi2 g, h)`` with ``g = xi3 exp(-(|xi1|^tau + |xi2|^tau)/sigma^tau - xi3^2/sigma^2)``.

    ``h = -(xi1^2 + xi2^2) g / xi3`` is written without the division, so the field is
    divergence-free on the whole grid, including ``xi3 = 0``.  For ``tau != 2`` the
    field is swap-symmetric without being sub-radial.
    """
    x1, x2, x3 = grid.xi
    e = np.exp(-(np.abs(x1) ** tau + np.abs(x2) ** tau) / sigma**tau - x3**2 / sigma**2)
    g = x3 * e
    h = -(x1**2 + x2**2) * e
    return _normalized(grid, np.stack([x1 * g, x2 * g, h]), eps)


def single_mode_pair(
    grid: FrequencyGrid, eps: float = 1e-3, k: tuple[int, int, int] = (1, 0, 0)
) -> SpectralField:
    """Amplitude ``eps`` along ``e2`` at the modes ``k`` and ``-k`` (``k`` must be orthogonal
    to ``e2``)."""
    k = tuple(int(x) for x in k)
    if k[1] != 0:
        raise ValueError("single_mode_pair needs k orthogonal to e2")
    data = np.zeros((3, *grid.shape), dtype=complex)
    data[1][grid.index(k)] = eps
    data[1][grid.index(tuple(-x for x in k))] = eps
    return _normalized(grid, data, eps)


def zero(grid: FrequencyGrid, eps: float = 0.0) -> SpectralField:
    return SpectralField.zeros(grid)


def family(name: str, grid: FrequencyGrid, **params) -> SpectralField:
    """Look up a built-in family by name."""
    table = {
        "zero": zero,
        "x2_gaussian": x2_gaussian,
        "x2_imaginary": x2_imaginary,
        "x3_imaginary": x3_imaginary,
        "x1_subradial_tau": x1_subradial_tau,
        "single_mode_pair": single_mode_pair,
    }
    if name not in table:
        raise ValueError(f"unknown initial-data family {name!r}; choose from {FAMILIES}")
    return table[name](grid, **params)


# -- random symmetric data -----------------------------------------------------


def _random_complex(rng: np.random.Generator, shape, envelope: np.ndarray) -> np.ndarray:
    return envelope * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_x1(grid: FrequencyGrid, eps: float, seed: int, sigma: float = 0.6) -> SpectralField:
    """Random divergence-free field with ``u1(xi1, xi2, xi3) = u2(xi2, xi1, xi3)``.

    ``u2`` is the swap of ``u1`` and ``u3`` is swap-symmetric before projection; the
    Leray projector commutes with the swap, so the result keeps the property.
    """
    rng = np.random.default_rng(seed)
    env = gaussian_envelope(grid, sigma)
    g = _random_complex(rng, grid.shape, env)
    w = _random_complex(rng, grid.shape, env)
    raw = np.stack([g, swap12(g), 0.5 * (w + swap12(w))])
    return _normalized(grid, leray_arrays(raw, grid), eps)


def random_x2(grid: FrequencyGrid, eps: float, seed: int, sigma: float = 0.6) -> SpectralField:
    """Random divergence-free field carrying the X2 parity label.

    Each part is projected onto its parity class by averaging reflections; the Leray
    projector preserves the label.
    """
    rng = np.random.default_rng(seed)
    env = gaussian_envelope(grid, sigma)
    raw = np.stack(
        [impose_label(_random_complex(rng, grid.shape, env), X2_LABEL[k]) for k in (1, 2, 3)]
    )
    return _normalized(grid, leray_arrays(raw, grid), eps)
