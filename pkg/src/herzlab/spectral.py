"""Frequency grids, spectral vector/scalar fields, alias-free convolution and the
Leray projector.

Modes are integer triples ``k`` with ``max|k_i| <= N``; the physical wavenumber is
``xi = h * k``.  Arrays are indexed ``[..., k1 + N, k2 + N, k3 + N]`` so that
``np.flip`` along an axis is the reflection ``xi_s -> -xi_s`` and transposing the
first two spatial axes is the swap ``(xi_1, xi_2) -> (xi_2, xi_1)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.fft as sfft

SPATIAL_AXES = (-3, -2, -1)
FIELD_FORMAT = "herzlab.field"
FIELD_FORMAT_VERSION = 1


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


@dataclass(frozen=True)
class FrequencyGrid:
    """Truncated symmetric frequency lattice ``{h k : max|k_i| <= N}``.

    The zero mode is part of the grid but is excluded from every division by
    ``|xi|``; fields are forced to vanish there.
    """

    half_extent: int
    spacing: float = 1.0

    def __post_init__(self):
        if int(self.half_extent) != self.half_extent or self.half_extent < 1:
            raise ValueError(f"half_extent must be a positive integer, got {self.half_extent}")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "half_extent", int(self.half_extent))
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def n(self) -> int:
        return 2 * self.half_extent + 1

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def size(self) -> int:
        return self.n**3

    @property
    def origin(self) -> tuple[int, int, int]:
        N = self.half_extent
        return (N, N, N)

    @property
    def cell_volume(self) -> float:
        return self.spacing**3

    def index(self, k) -> tuple[int, int, int]:
        """Array index of the integer mode ``k``."""
        N = self.half_extent
        if any(abs(int(c)) > N for c in k):
            raise IndexError(f"mode {tuple(k)} outside grid with N={N}")
        return tuple(int(c) + N for c in k)

    @cached_property
    def k(self) -> np.ndarray:
        k = np.indices(self.shape) - self.half_extent
        k.setflags(write=False)
        return k

    @cached_property
    def k2(self) -> np.ndarray:
        k2 = np.sum(self.k.astype(np.int64) ** 2, axis=0)
        k2.setflags(write=False)
        return k2

    @cached_property
    def xi(self) -> np.ndarray:
        xi = self.spacing * self.k
        xi.setflags(write=False)
        return xi

    @cached_property
    def xi2(self) -> np.ndarray:
        xi2 = self.spacing**2 * self.k2
        xi2.setflags(write=False)
        return xi2

    @cached_property
    def xi_norm(self) -> np.ndarray:
        r = np.sqrt(self.xi2)
        r.setflags(write=False)
        return r

    @cached_property
    def nonzero(self) -> np.ndarray:
        m = self.k2 > 0
        m.setflags(write=False)
        return m

    @cached_property
    def inv_xi2(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.nonzero] = 1.0 / self.xi2[self.nonzero]
        out.setflags(write=False)
        return out

    @cached_property
    def inv_xi_norm(self) -> np.ndarray:
        out = np.zeros(self.shape)
        out[self.nonzero] = 1.0 / self.xi_norm[self.nonzero]
        out.setflags(write=False)
        return out


def _check_same_grid(*grids: FrequencyGrid) -> FrequencyGrid:
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise GridMismatchError(f"grid mismatch: {first} vs {g}")
    return first


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite amplitudes")


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Complex scalar sampled on a frequency grid (``U``, ``U_e``, ``A_k``, ...)."""

    grid: FrequencyGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != self.grid.shape:
            raise ValueError(f"values shape {values.shape} != grid shape {self.grid.shape}")
        if not np.iscomplexobj(values):
            values = values.astype(float)
        _require_finite(values, "ScalarField")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> ScalarField:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def impulse(cls, grid: FrequencyGrid, k, amplitude: complex = 1.0) -> ScalarField:
        values = np.zeros(grid.shape, dtype=complex if np.iscomplexobj(amplitude) else float)
        values[grid.index(k)] = amplitude
        return cls(grid, values)

    def __add__(self, other: ScalarField) -> ScalarField:
        _check_same_grid(self.grid, other.grid)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: ScalarField) -> ScalarField:
        _check_same_grid(self.grid, other.grid)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c) -> ScalarField:
        return ScalarField(self.grid, c * self.values)

    __rmul__ = __mul__

    def abs(self) -> ScalarField:
        return ScalarField(self.grid, np.abs(self.values))

    def max_amplitude(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Complex 3-vector field ``u_hat = (u1, u2, u3)`` on a frequency grid."""

    grid: FrequencyGrid
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.shape != (3, *self.grid.shape):
            raise ValueError(f"data shape {data.shape} != {(3, *self.grid.shape)}")
        _require_finite(data, "SpectralField")
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, grid: FrequencyGrid) -> SpectralField:
        return cls(grid, np.zeros((3, *grid.shape), dtype=complex))

    @classmethod
    def from_components(cls, u1: ScalarField, u2: ScalarField, u3: ScalarField) -> SpectralField:
        grid = _check_same_grid(u1.grid, u2.grid, u3.grid)
        return cls(grid, np.stack([u1.values, u2.values, u3.values]))

    def component(self, k: int) -> ScalarField:
        """Component ``k`` in {1, 2, 3}."""
        return ScalarField(self.grid, self.data[k - 1])

    def __add__(self, other: SpectralField) -> SpectralField:
        _check_same_grid(self.grid, other.grid)
        return SpectralField(self.grid, self.data + other.data)

    def __sub__(self, other: SpectralField) -> SpectralField:
        _check_same_grid(self.grid, other.grid)
        return SpectralField(self.grid, self.data - other.data)

    def __mul__(self, c) -> SpectralField:
        return SpectralField(self.grid, c * self.data)

    __rmul__ = __mul__

    def max_amplitude(self) -> float:
        return float(np.max(np.abs(self.data)))

    def divergence(self) -> ScalarField:
        return ScalarField(self.grid, np.sum(self.grid.xi * self.data, axis=0))

    def divergence_residual(self) -> float:
        """Largest ``|xi . u| / |xi|`` over nonzero modes, relative to the largest amplitude."""
        return divergence_residual(self.data, self.grid)


def divergence_residual(data: np.ndarray, grid: FrequencyGrid) -> float:
    """``max |xi . u(xi)| / (|xi| max|u|)`` over nonzero modes (0 for a zero field).

    Normalizing by the field maximum rather than by ``|u(xi)|`` keeps the measure
    meaningful at modes where a projection cancels the amplitude down to round-off.
    """
    scale = float(np.max(np.abs(data))) if data.size else 0.0
    if scale == 0:
        return 0.0
    div = np.abs(np.sum(grid.xi * data, axis=-4)) * grid.inv_xi_norm
    return float(np.max(div)) / scale


def is_divergence_free(u: SpectralField, eps: float = 1e-12) -> bool:
    return u.divergence_residual() <= eps


# -- convolution -------------------------------------------------------------


def fft_size(N: int) -> int:
    """Smallest fast transform length that keeps the retained window alias-free.

    The full linear convolution of two (2N+1)-point sequences has 4N+1 points; only
    the central 2N+1 are kept, and any period P >= 3N+1 leaves those untouched by
    wrap-around.
    """
    return sfft.next_fast_len(3 * N + 1)


def padded_fft(values: np.ndarray, N: int, real: bool = False) -> np.ndarray:
    P = fft_size(N)
    if real:
        return sfft.rfftn(values, s=(P, P, P), axes=SPATIAL_AXES)
    return sfft.fftn(values, s=(P, P, P), axes=SPATIAL_AXES)


def cropped_ifft(spectrum: np.ndarray, N: int, real: bool = False, offset: int | None = None) -> np.ndarray:
    """Inverse of :func:`padded_fft`, cropped to a (2N+1)^3 window starting at ``offset``."""
    P = fft_size(N)
    if real:
        full = sfft.irfftn(spectrum, s=(P, P, P), axes=SPATIAL_AXES)
    else:
        full = sfft.ifftn(spectrum, axes=SPATIAL_AXES)
    o = N if offset is None else offset
    w = slice(o, o + 2 * N + 1)
    return full[..., w, w, w]


def convolve_arrays(a: np.ndarray, b: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """Batched zero-padded FFT convolution of arrays ``(..., n, n, n)``, scaled by h^3."""
    N = grid.half_extent
    real = not (np.iscomplexobj(a) or np.iscomplexobj(b))
    prod = padded_fft(a, N, real) * padded_fft(b, N, real)
    return grid.cell_volume * cropped_ifft(prod, N, real)


def convolve_direct_arrays(a: np.ndarray, b: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """Direct O(M^2) sum ``h^3 sum_eta a(xi - eta) b(eta)`` restricted to the grid."""
    n = grid.n
    N = grid.half_extent
    dtype = np.result_type(a, b)
    out = np.zeros(grid.shape, dtype=dtype)
    for idx in np.argwhere(b != 0):
        s = idx - N
        dst = tuple(slice(max(0, si), min(n, n + si)) for si in s)
        src = tuple(slice(max(0, si) - si, min(n, n + si) - si) for si in s)
        out[dst] += a[src] * b[tuple(idx)]
    return grid.cell_volume * out


def convolve(f: ScalarField, g: ScalarField, method: str = "fft") -> ScalarField:
    """Linear convolution ``(f * g)(xi) ~ int f(xi - eta) g(eta) d eta`` on the grid.

    ``method="fft"`` uses a zero-padded fast transform; ``method="direct"`` sums over
    all pairs of modes.  Both truncate the result back to the grid.
    """
    grid = _check_same_grid(f.grid, g.grid)
    if method == "fft":
        values = convolve_arrays(f.values, g.values, grid)
    elif method == "direct":
        values = convolve_direct_arrays(f.values, g.values, grid)
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    return ScalarField(grid, values)


def convolve_direct(f: ScalarField, g: ScalarField) -> ScalarField:
    """Reference convolution by explicit summation over pairs of modes."""
    return convolve(f, g, method="direct")


# -- projections -------------------------------------------------------------


def leray_arrays(data: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """``v - xi (xi . v) / |xi|^2`` on ``(..., 3, n, n, n)`` arrays; zero at the origin."""
    xi = grid.xi
    dot = np.sum(xi * data, axis=-4)
    out = data - xi * (dot * grid.inv_xi2)[..., None, :, :, :]
    N = grid.half_extent
    out[..., :, N, N, N] = 0.0
    return out


def leray_project(u: SpectralField) -> SpectralField:
    return SpectralField(u.grid, leray_arrays(u.data, u.grid))


def ediv_arrays(u1: np.ndarray, u2: np.ndarray, grid: FrequencyGrid) -> tuple[np.ndarray, np.ndarray]:
    xi1, xi2, xi3 = grid.xi
    degenerate = xi3 == 0
    safe = np.where(degenerate, 1.0, xi3)
    u3 = np.where(degenerate, 0.0, -(xi1 * u1 + xi2 * u2) / safe)
    return u3, degenerate


def solve_u3_from_divergence(u1: ScalarField, u2: ScalarField) -> tuple[ScalarField, np.ndarray]:
    """Third component forced by ``xi . u = 0``: ``u3 = -(xi1 u1 + xi2 u2) / xi3``.

    Modes on the plane ``xi3 = 0`` get ``u3 = 0``; the returned boolean mask marks
    them.
    """
    grid = _check_same_grid(u1.grid, u2.grid)
    u3, mask = ediv_arrays(u1.values, u2.values, grid)
    return ScalarField(grid, u3), mask


# -- serialization -----------------------------------------------------------


def _field_arrays(field) -> tuple[str, list[np.ndarray]]:
    if isinstance(field, SpectralField):
        return "vector", [field.data[i] for i in range(3)]
    if isinstance(field, ScalarField):
        return "scalar", [field.values]
    raise TypeError(f"cannot serialize {type(field).__name__}")


def save_field(field, path) -> None:
    """Write a field as JSON (``.json``) or numpy archive (``.npz``).

    JSON layout: ``{"format", "version", "kind", "N", "h", "components": [{"real":
    [...], "imag": [...]}, ...]}`` with each component flattened in C (row-major)
    order over ``(k1, k2, k3)``.  Floats are written with ``repr`` so the round trip
    is bit-exact.
    """
    path = Path(path)
    kind, comps = _field_arrays(field)
    grid = field.grid
    if path.suffix == ".npz":
        np.savez(
            path,
            format=FIELD_FORMAT,
            version=FIELD_FORMAT_VERSION,
            kind=kind,
            N=grid.half_extent,
            h=grid.spacing,
            components=np.stack([np.asarray(c, dtype=complex) for c in comps]),
        )
        return
    doc = {
        "format": FIELD_FORMAT,
        "version": FIELD_FORMAT_VERSION,
        "kind": kind,
        "N": grid.half_extent,
        "h": grid.spacing,
        "components": [
            {"real": np.real(c).ravel().tolist(), "imag": np.imag(c).ravel().tolist()} for c in comps
        ],
    }
    path.write_text(json.dumps(doc))


def load_field(path):
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path) as z:
            if str(z["format"]) != FIELD_FORMAT:
                raise ValueError(f"{path} is not a {FIELD_FORMAT} file")
            kind = str(z["kind"])
            grid = FrequencyGrid(int(z["N"]), float(z["h"]))
            comps = list(z["components"])
    else:
        doc = json.loads(path.read_text())
        if doc.get("format") != FIELD_FORMAT:
            raise ValueError(f"{path} is not a {FIELD_FORMAT} file")
        kind = doc["kind"]
        grid = FrequencyGrid(int(doc["N"]), float(doc["h"]))
        comps = [
            (np.array(c["real"]) + 1j * np.array(c["imag"])).reshape(grid.shape) for c in doc["components"]
        ]
    if kind == "vector":
        return SpectralField(grid, np.stack(comps))
    if kind == "scalar":
        return ScalarField(grid, comps[0])
    raise ValueError(f"unknown field kind {kind!r}")
