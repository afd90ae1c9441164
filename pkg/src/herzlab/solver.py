"""Fourier-side Picard iteration for the mild Navier-Stokes problem.

The iterate ``u^{tau+1}`` is obtained from ``u^tau`` by

    u^{tau+1}_k(t) = e^{-t|xi|^2} u0_k + i int_0^t e^{-(t-s)|xi|^2} (A_k - xi_k A_0 / |xi|^2)(s) ds

with ``A_k = sum_l xi_l (u_l * u_k)`` and ``A_0 = sum_{l,l'} xi_l xi_l' (u_l * u_l')``.
Because ``A_0 = xi . A`` the integrand is the Leray projection of ``A``.  Constant
factors of ``(2 pi)^{-3}`` coming from the transform convention are absorbed into
the amplitude of the data.

Trajectories live on a fixed node set ``0 = t_0 < t_1 < ... < t_M``.  On each
interval the nonlinear factor is frozen at the mean of its endpoint values and the
heat kernel is integrated exactly, so

    I_n = e^{-(t_n - t_{n-1}) c} I_{n-1} + Abar_n (1 - e^{-(t_n - t_{n-1}) c}) / c,   c = |xi|^2.

The running suprema ``U`` and ``U_e`` additionally sample every mode at
``t = 1/(4|xi|^2)``, where ``e^{sqrt(t)|xi|} e^{-t|xi|^2}`` peaks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from herzlab.herz import HerzParams, herz_norms, vector_herz_norm
from herzlab.spectral import (
    FrequencyGrid,
    ScalarField,
    SpectralField,
    _check_same_grid,
    cropped_ifft,
    ediv_arrays,
    leray_arrays,
    padded_fft,
)
from herzlab.symmetry import X2_LABEL, check_field_label, swap12, x1_residual

QUADRATURES = ("exp-average",)
REDUCTION_MODES = ("X1", "X2-imaginary", "X3-imaginary")


class NumericalDivergence(RuntimeError):
    """The iteration produced non-finite values or stopped contracting."""


class SmallnessViolated(NumericalDivergence):
    """The data is too large for the Picard iteration to contract."""


class SymmetryPreconditionError(ValueError):
    """Initial data lacks the symmetry a reduced iteration relies on."""


@dataclass(frozen=True)
class SolverConfig:
    """Time nodes and stopping rules for :func:`picard_solve`.

    ``time_grid`` lists the positive nodes ``t_1 < ... < t_M``; ``t_0 = 0`` is always
    added.  The residual of an iterate is the largest vector Herz norm (``herz``)
    of ``u^{tau+1}(t_n) - u^tau(t_n)`` over the nodes.
    """

    time_grid: tuple[float, ...]
    quadrature: str = "exp-average"
    max_iterations: int = 60
    contraction_tol: float = 1e-12
    herz: HerzParams = HerzParams(0.5, 2.0, 2.0)
    smallness_threshold: float = 1e-2
    enforce_smallness: bool = True
    leray_each_step: bool = True
    divergence_patience: int = 3

    def __post_init__(self):
        t = np.asarray(self.time_grid, dtype=float)
        object.__setattr__(self, "time_grid", tuple(float(x) for x in t))
        if t.ndim != 1 or len(t) < 2:
            raise ValueError("time_grid needs at least two nodes")
        if not t[0] > 0:
            raise ValueError("time nodes must be positive")
        if np.any(np.diff(t) <= 0):
            raise ValueError("time nodes must be strictly increasing")
        if self.quadrature not in QUADRATURES:
            raise ValueError(f"unknown quadrature {self.quadrature!r}; choose from {QUADRATURES}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.contraction_tol > 0:
            raise ValueError("contraction_tol must be positive")
        if self.divergence_patience < 1:
            raise ValueError("divergence_patience must be >= 1")

    @classmethod
    def for_grid(
        cls,
        grid: FrequencyGrid,
        n_times: int = 64,
        t_min_factor: float = 1e-4,
        t_max_factor: float = 10.0,
        **kwargs,
    ) -> SolverConfig:
        """Log-spaced nodes from ``t_min_factor / h^2`` to ``t_max_factor / h^2``."""
        h2 = grid.spacing**2
        times = np.geomspace(t_min_factor / h2, t_max_factor / h2, n_times)
        return cls(tuple(times), **kwargs)

    @property
    def times(self) -> np.ndarray:
        """All nodes including ``t_0 = 0``."""
        return np.concatenate([[0.0], self.time_grid])


# -- trajectories ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TrajectoryRecord:
    """Node values of one iterate plus its running suprema.

    ``data`` has shape ``(M+1, 3, n, n, n)``.  ``sup_abs_components`` and
    ``sup_exp_components`` hold ``sup_t |u_c|`` and ``sup_t e^{sqrt(t)|xi|} |u_c|``
    per component; ``bilinear_sup_exp`` is the latter for the Duhamel term alone
    (``None`` for a pure heat flow).
    """

    grid: FrequencyGrid
    times: np.ndarray
    data: np.ndarray
    sup_abs_components: np.ndarray
    sup_exp_components: np.ndarray
    bilinear_sup_exp: np.ndarray | None = None

    def __post_init__(self):
        if len(self.times) == 0:
            raise ValueError("empty trajectory")
        if self.data.shape != (len(self.times), 3, *self.grid.shape):
            raise ValueError("trajectory data does not match its time nodes and grid")

    def __len__(self) -> int:
        return len(self.times)

    def field(self, m: int) -> SpectralField:
        return SpectralField(self.grid, self.data[m])

    @property
    def fields(self) -> list[SpectralField]:
        return [self.field(m) for m in range(len(self))]

    @property
    def sup_abs(self) -> ScalarField:
        """``U(xi) = sup_t |u(t, xi)|`` with the maximum over components."""
        return ScalarField(self.grid, np.max(self.sup_abs_components, axis=0))

    @property
    def sup_exp(self) -> ScalarField:
        """``U_e(xi) = sup_t e^{sqrt(t)|xi|} |u(t, xi)|`` with the maximum over components."""
        return ScalarField(self.grid, np.max(self.sup_exp_components, axis=0))

    @property
    def bilinear_sup(self) -> ScalarField | None:
        if self.bilinear_sup_exp is None:
            return None
        return ScalarField(self.grid, np.max(self.bilinear_sup_exp, axis=0))


def heat_semigroup(u0: SpectralField, t: float) -> SpectralField:
    """``e^{-t|xi|^2} u0``."""
    if not t >= 0:
        raise ValueError("t must be nonnegative")
    return SpectralField(u0.grid, np.exp(-t * u0.grid.xi2) * u0.data)


def _peak_times(grid: FrequencyGrid) -> np.ndarray:
    """``1 / (4|xi|^2)`` per mode, 0 at the origin."""
    return 0.25 * grid.inv_xi2


def _sups(grid: FrequencyGrid, times: np.ndarray, data: np.ndarray, peak: np.ndarray):
    """Component-wise suprema over the nodes and the per-mode peak sample."""
    sqrt_t = np.sqrt(times)[:, None, None, None]
    weight_nodes = np.exp(sqrt_t * grid.xi_norm)
    mag = np.abs(data)
    sup_abs = np.max(mag, axis=0)
    sup_exp = np.max(weight_nodes[:, None] * mag, axis=0)
    pmag = np.abs(peak)
    w_peak = np.exp(np.sqrt(_peak_times(grid)) * grid.xi_norm)
    return np.maximum(sup_abs, pmag), np.maximum(sup_exp, w_peak * pmag)


def heat_flow(u0: SpectralField, cfg: SolverConfig) -> TrajectoryRecord:
    """``e^{-t|xi|^2} u0`` on the configured nodes: the zeroth Picard iterate."""
    grid = u0.grid
    times = cfg.times
    decay = np.exp(-times[:, None, None, None] * grid.xi2)
    data = decay[:, None] * u0.data
    peak = np.exp(-_peak_times(grid) * grid.xi2) * u0.data
    sup_abs, sup_exp = _sups(grid, times, data, peak)
    return TrajectoryRecord(grid, times, data, sup_abs, sup_exp, None)


# -- bilinear terms ----------------------------------------------------------


def convolution_products(u: np.ndarray, v: np.ndarray | None, grid: FrequencyGrid) -> np.ndarray:
    """``C[..., l, k] = u_l * v_k`` for arrays ``(..., 3, n, n, n)``.

    With ``v=None`` the second factor is ``u`` and only the six distinct products are
    transformed back.
    """
    N = grid.half_extent
    fu = padded_fft(u, N)
    fv = fu if v is None else padded_fft(v, N)
    out = np.empty((*u.shape[:-4], 3, 3, *grid.shape), dtype=complex)
    for l in range(3):
        for k in range(3):
            if v is None and k < l:
                out[..., l, k, :, :, :] = out[..., k, l, :, :, :]
                continue
            out[..., l, k, :, :, :] = cropped_ifft(fu[..., l, :, :, :] * fv[..., k, :, :, :], N)
    return grid.cell_volume * out


def _A_from_products(C: np.ndarray, grid: FrequencyGrid) -> tuple[np.ndarray, np.ndarray]:
    xi = grid.xi
    A = np.sum(xi[:, None] * C, axis=-5)
    A0 = np.sum(xi * A, axis=-4)
    return A, A0


@dataclass(frozen=True, eq=False)
class BilinearTerms:
    """``A_k = sum_l xi_l (u_l * v_k)`` and ``A_0 = sum_{l,l'} xi_l xi_l' (u_l * v_l')``."""

    u: SpectralField
    v: SpectralField
    A: tuple[ScalarField, ScalarField, ScalarField]
    A0: ScalarField

    def real_imag_split(self) -> dict[str, ScalarField]:
        """Real-valued pieces built from ``a = Re u``, ``b = Im u``, ``c = Re v``, ``d = Im v``.

        ``A_k1 = sum_l xi_l (a_l*d_k + b_l*c_k)`` and ``A_k2 = sum_l xi_l (a_l*c_k - b_l*d_k)``
        are the imaginary and real parts of ``A_k``.  ``A_01 = sum xi_l xi_l' a_l*d_l'``,
        ``A_02 = sum xi_l xi_l' b_l*c_l'``, ``A_03 = sum xi_l xi_l' a_l*c_l'`` and
        ``A_04 = -sum xi_l xi_l' b_l*d_l'``, so ``A_0 = (A_03 + A_04) + i (A_01 + A_02)``.
        """
        grid = self.u.grid
        a, b = self.u.data.real, self.u.data.imag
        c, d = self.v.data.real, self.v.data.imag
        xi = grid.xi

        def prods(x, y):
            return convolution_products(x, y, grid).real

        ad, bc, ac, bd = prods(a, d), prods(b, c), prods(a, c), prods(b, d)
        out = {}
        for k in range(3):
            out[f"A{k + 1}1"] = np.sum(xi * (ad[:, k] + bc[:, k]), axis=0)
            out[f"A{k + 1}2"] = np.sum(xi * (ac[:, k] - bd[:, k]), axis=0)
        xx = xi[:, None] * xi[None, :]
        out["A01"] = np.sum(xx * ad, axis=(0, 1))
        out["A02"] = np.sum(xx * bc, axis=(0, 1))
        out["A03"] = np.sum(xx * ac, axis=(0, 1))
        out["A04"] = -np.sum(xx * bd, axis=(0, 1))
        return {k: ScalarField(grid, v) for k, v in out.items()}

    def regrouped(self) -> dict[str, ScalarField]:
        """Terms obtained after eliminating ``u3`` through the divergence constraint.

        With ``w_l = -(xi_l / xi3) u_l`` (``l = 1, 2``; zero on ``xi3 = 0``):
        ``A^1_k = sum_{l<=2} xi_l (u_l * v_k)``, ``A^2_k = xi3 ((w_1 + w_2) * v_k)`` for
        ``k = 1, 2`` and the six pieces of ``A_0``

        * ``A^1_00 = xi1^2 (u1*v1) + xi2^2 (u2*v2)``, ``A^1_01 = xi1 xi2 (u1*v2 + u2*v1)``,
        * ``A^2_00 = xi3 [xi1 (w1*v1 + z1*u1) + xi2 (w2*v2 + z2*u2)]``,
        * ``A^2_01 = xi3 [xi1 (w2*v1 + z2*u1) + xi2 (w1*v2 + z1*u2)]``,
        * ``A^3_00 = xi3^2 (w1*z1 + w2*z2)``, ``A^3_01 = xi3^2 (w1*z2 + w2*z1)``,

        where ``z_l`` is built from ``v`` as ``w_l`` is from ``u``.  For ``u = v`` these
        reduce to the symmetric forms with factors of 2.  They add up to ``A_0`` (and
        ``A^1_k + A^2_k = A_k``) when both fields satisfy the constraint on the whole
        grid, i.e. when their third components vanish on ``xi3 = 0``.
        """
        grid = self.u.grid
        xi1, xi2, xi3 = grid.xi
        inv3 = np.zeros(grid.shape)
        nz = xi3 != 0
        inv3[nz] = 1.0 / xi3[nz]
        u, v = self.u.data, self.v.data
        w = np.stack([-xi1 * inv3 * u[0], -xi2 * inv3 * u[1]])
        z = np.stack([-xi1 * inv3 * v[0], -xi2 * inv3 * v[1]])

        def conv(x, y):
            return _conv(x, y, grid)

        out = {}
        w3 = w[0] + w[1]
        for k in range(2):
            out[f"A1_{k + 1}"] = xi1 * conv(u[0], v[k]) + xi2 * conv(u[1], v[k])
            out[f"A2_{k + 1}"] = xi3 * conv(w3, v[k])
        out["A1_00"] = xi1**2 * conv(u[0], v[0]) + xi2**2 * conv(u[1], v[1])
        out["A1_01"] = xi1 * xi2 * (conv(u[0], v[1]) + conv(u[1], v[0]))
        out["A2_00"] = xi3 * (
            xi1 * (conv(w[0], v[0]) + conv(z[0], u[0])) + xi2 * (conv(w[1], v[1]) + conv(z[1], u[1]))
        )
        out["A2_01"] = xi3 * (
            xi1 * (conv(w[1], v[0]) + conv(z[1], u[0])) + xi2 * (conv(w[0], v[1]) + conv(z[0], u[1]))
        )
        out["A3_00"] = xi3**2 * (conv(w[0], z[0]) + conv(w[1], z[1]))
        out["A3_01"] = xi3**2 * (conv(w[0], z[1]) + conv(w[1], z[0]))
        return {k: ScalarField(grid, val) for k, val in out.items()}


def _conv(x: np.ndarray, y: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    N = grid.half_extent
    return grid.cell_volume * cropped_ifft(padded_fft(x, N) * padded_fft(y, N), N)


def assemble_A(u: SpectralField, v: SpectralField) -> BilinearTerms:
    grid = _check_same_grid(u.grid, v.grid)
    C = convolution_products(u.data, None if v is u else v.data, grid)
    A, A0 = _A_from_products(C, grid)
    return BilinearTerms(u, v, tuple(ScalarField(grid, A[k]) for k in range(3)), ScalarField(grid, A0))


# -- Duhamel step --------------------------------------------------------------


def _phi(dt: np.ndarray, c: np.ndarray) -> np.ndarray:
    """``int_0^dt e^{-(dt - s) c} ds = (1 - e^{-dt c}) / c`` with the limit ``dt`` at ``c = 0``."""
    x = dt * c
    safe = np.where(c > 0, c, 1.0)
    return np.where(c > 0, -np.expm1(-x) / safe, dt)


def _projected_integrand(A: np.ndarray, A0: np.ndarray, grid: FrequencyGrid) -> np.ndarray:
    """``A_k - xi_k A_0 / |xi|^2``."""
    return A - grid.xi * (A0 * grid.inv_xi2)[..., None, :, :, :]


def _bilinear_update(
    data: np.ndarray, grid: FrequencyGrid, cfg: SolverConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Duhamel term at every node and at the per-mode peak time."""
    times = cfg.times
    C = convolution_products(data, None, grid)
    A, A0 = _A_from_products(C, grid)
    del C
    F = _projected_integrand(A, A0, grid)
    del A, A0
    Fbar = 0.5 * (F[1:] + F[:-1])
    c = grid.xi2
    I = np.zeros_like(F)
    for n in range(1, len(times)):
        dt = times[n] - times[n - 1]
        I[n] = np.exp(-dt * c) * I[n - 1] + Fbar[n - 1] * _phi(dt, c)
    # per-mode peak sample
    tstar = _peak_times(grid)
    m = np.clip(np.searchsorted(times, tstar, side="right") - 1, 0, len(times) - 2)
    I_m = np.take_along_axis(I, m[None, None], axis=0)[0]
    F_m = np.take_along_axis(Fbar, m[None, None], axis=0)[0]
    dt = tstar - times[m]
    I_peak = np.exp(-dt * c) * I_m + F_m * _phi(dt, c)
    B = 1j * I
    B_peak = 1j * I_peak
    if cfg.leray_each_step:
        B = leray_arrays(B, grid)
        B_peak = leray_arrays(B_peak, grid)
    N = grid.half_extent
    B[..., N, N, N] = 0.0
    B_peak[..., N, N, N] = 0.0
    return B, B_peak


def duhamel_step(traj: TrajectoryRecord, u0: SpectralField, cfg: SolverConfig) -> TrajectoryRecord:
    """One Picard update on the nodes of ``cfg``.

    Raises :class:`NumericalDivergence` when the update is not finite.
    """
    grid = _check_same_grid(traj.grid, u0.grid)
    times = cfg.times
    if len(times) != len(traj.times) or np.any(times != traj.times):
        raise ValueError("trajectory and configuration use different time nodes")
    with np.errstate(over="ignore", invalid="ignore"):
        B, B_peak = _bilinear_update(traj.data, grid, cfg)
    if not (np.all(np.isfinite(B)) and np.all(np.isfinite(B_peak))):
        raise NumericalDivergence(
            f"non-finite Duhamel term (input max amplitude {float(np.max(np.abs(traj.data))):.3e})"
        )
    heat = heat_flow(u0, cfg)
    data = heat.data + B
    peak = np.exp(-_peak_times(grid) * grid.xi2) * u0.data + B_peak
    sup_abs, sup_exp = _sups(grid, times, data, peak)
    _, w_exp = _sups(grid, times, B, B_peak)
    return TrajectoryRecord(grid, times, data, sup_abs, sup_exp, w_exp)


# -- fixed-point loop ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PicardResult:
    trajectory: TrajectoryRecord
    iterations: int
    residual_history: list[float]
    converged: bool

    def __iter__(self):
        return iter((self.trajectory, self.iterations, self.residual_history))

    @property
    def contraction_ratios(self) -> list[float]:
        r = self.residual_history
        return [r[i + 1] / r[i] for i in range(len(r) - 1) if r[i] > 0]


def trajectory_distance(a: np.ndarray, b: np.ndarray, grid: FrequencyGrid, params: HerzParams) -> float:
    """Largest vector Herz norm of ``a(t_n) - b(t_n)`` over the nodes."""
    return float(np.max(herz_norms(a - b, grid, params)))


def _check_smallness(u0: SpectralField, cfg: SolverConfig) -> None:
    if not cfg.enforce_smallness:
        return
    size = vector_herz_norm(u0, cfg.herz)
    if size > cfg.smallness_threshold:
        raise SmallnessViolated(
            f"smallness violated: data norm {size:.3e} exceeds threshold {cfg.smallness_threshold:.3e}"
        )


def _iterate(
    u0: SpectralField,
    cfg: SolverConfig,
    step: Callable[[TrajectoryRecord], TrajectoryRecord],
    start: TrajectoryRecord,
    callback: Callable[[int, TrajectoryRecord], None] | None,
) -> PicardResult:
    traj = start
    history: list[float] = []
    for it in range(1, cfg.max_iterations + 1):
        try:
            new = step(traj)
        except NumericalDivergence as exc:
            raise SmallnessViolated(f"smallness violated: {exc} at iteration {it}") from exc
        r = trajectory_distance(new.data, traj.data, u0.grid, cfg.herz)
        if not math.isfinite(r):
            raise SmallnessViolated(f"smallness violated: non-finite residual at iteration {it}")
        history.append(r)
        if callback is not None:
            callback(it, new)
        traj = new
        if r <= cfg.contraction_tol:
            return PicardResult(traj, it, history, True)
        k = cfg.divergence_patience
        if len(history) > k and all(history[-i] > history[-i - 1] for i in range(1, k + 1)):
            raise SmallnessViolated(
                f"smallness violated: residual grew for {k} consecutive iterations "
                f"(last {history[-1]:.3e})"
            )
    return PicardResult(traj, cfg.max_iterations, history, False)


def picard_solve(
    u0: SpectralField,
    cfg: SolverConfig,
    callback: Callable[[int, TrajectoryRecord], None] | None = None,
) -> PicardResult:
    """Iterate :func:`duhamel_step` from the heat flow of ``u0`` until the residual drops
    below ``cfg.contraction_tol``.

    ``callback(iteration, trajectory)`` sees every iterate.  Raises
    :class:`SmallnessViolated` when the data exceeds ``cfg.smallness_threshold`` (if
    enforced), when values become non-finite, or when the residual keeps growing.
    """
    _check_smallness(u0, cfg)
    return _iterate(u0, cfg, lambda tr: duhamel_step(tr, u0, cfg), heat_flow(u0, cfg), callback)


# -- reduced iterations --------------------------------------------------------


@dataclass(frozen=True)
class _Reduction:
    """Packing of a symmetric field into its independent real unknowns."""

    mode: str
    grid: FrequencyGrid

    @property
    def real_unknowns_per_mode(self) -> int:
        return {"X1": 2, "X2-imaginary": 2, "X3-imaginary": 1}[self.mode]

    @property
    def plane_unknowns(self) -> int:
        """Extra real values for the third component on the plane ``xi3 = 0`` (X1 only)."""
        return 2 * self.grid.n**2 if self.mode == "X1" else 0

    def pack(self, data: np.ndarray) -> tuple[np.ndarray, ...]:
        N = self.grid.half_extent
        if self.mode == "X1":
            return (data[..., 0, :, :, :].copy(), data[..., 2, :, :, N].copy())
        if self.mode == "X2-imaginary":
            return (data[..., 0, :, :, :].imag.copy(), data[..., 1, :, :, :].imag.copy())
        return (data[..., 0, :, :, :].imag.copy(),)

    def unpack(self, stored: tuple[np.ndarray, ...]) -> np.ndarray:
        grid = self.grid
        N = grid.half_extent
        if self.mode == "X1":
            u1, plane = stored
            u2 = swap12(u1)
            u3, _ = ediv_arrays(u1, u2, grid)
            u3 = np.array(u3, dtype=complex)
            u3[..., :, :, N] = plane
            return np.stack([u1, u2, u3], axis=-4)
        if self.mode == "X2-imaginary":
            b1, b2 = stored
        else:
            (b1,) = stored
            b2 = swap12(b1)
        b3, _ = ediv_arrays(b1, b2, grid)
        return 1j * np.stack([b1, b2, b3], axis=-4)

    def check(self, u0: SpectralField, tol: float) -> None:
        data = u0.data
        scale = max(u0.max_amplitude(), np.finfo(float).tiny)
        if self.mode in ("X1", "X3-imaginary"):
            r = x1_residual(data)
            if r > tol:
                raise SymmetryPreconditionError(f"{self.mode}: X1 swap residual {r:.3e} exceeds {tol:.1e}")
            r3 = float(np.max(np.abs(data[2] - swap12(data[2])))) / scale
            if r3 > tol:
                raise SymmetryPreconditionError(
                    f"{self.mode}: third-component swap residual {r3:.3e} exceeds {tol:.1e}"
                )
        if self.mode in ("X2-imaginary", "X3-imaginary"):
            r = float(np.max(np.abs(data.real))) / scale
            if r > tol:
                raise SymmetryPreconditionError(f"{self.mode}: real-part residual {r:.3e} exceeds {tol:.1e}")
            rep = check_field_label(u0, X2_LABEL, tol)
            if not rep.passed:
                raise SymmetryPreconditionError(
                    f"{self.mode}: X2 label residual {rep.max_residual:.3e} exceeds {tol:.1e}"
                )
        rebuilt = self.unpack(self.pack(data))
        r = float(np.max(np.abs(rebuilt - data))) / scale
        if r > max(tol, 1e-10):
            raise SymmetryPreconditionError(
                f"{self.mode}: data is not reproduced by its reduced unknowns (residual {r:.3e})"
            )


@dataclass(frozen=True, eq=False)
class ReducedResult(PicardResult):
    mode: str = "X1"
    stored: tuple[np.ndarray, ...] = field(default=())
    real_unknowns_per_mode: int = 6
    plane_unknowns: int = 0


def reduced_iteration(
    u0: SpectralField,
    mode: str,
    cfg: SolverConfig,
    tol: float = 1e-12,
    callback: Callable[[int, TrajectoryRecord], None] | None = None,
) -> ReducedResult:
    """Picard iteration carrying only the independent unknowns of a symmetric solution.

    ``X1`` keeps the complex ``u1`` (``u2`` is its swap, ``u3`` follows from the
    divergence constraint except on ``xi3 = 0`` where it is stored separately).
    ``X2-imaginary`` keeps ``Im u1`` and ``Im u2``; ``X3-imaginary`` keeps ``Im u1``
    only.  The stopping rule is applied to the reconstructed trajectories.
    """
    if mode not in REDUCTION_MODES:
        raise ValueError(f"unknown reduction {mode!r}; choose from {REDUCTION_MODES}")
    red = _Reduction(mode, u0.grid)
    red.check(u0, tol)
    _check_smallness(u0, cfg)
    state: dict[str, tuple[np.ndarray, ...]] = {}

    def step(traj: TrajectoryRecord) -> TrajectoryRecord:
        full = red.unpack(state["stored"])
        stepped = duhamel_step(replace(traj, data=full), u0, cfg)
        state["stored"] = red.pack(stepped.data)
        rebuilt = red.unpack(state["stored"])
        return replace(stepped, data=rebuilt)

    start = heat_flow(u0, cfg)
    state["stored"] = red.pack(start.data)
    start = replace(start, data=red.unpack(state["stored"]))
    res = _iterate(u0, cfg, step, start, callback)
    return ReducedResult(
        res.trajectory,
        res.iterations,
        res.residual_history,
        res.converged,
        mode=mode,
        stored=state["stored"],
        real_unknowns_per_mode=red.real_unknowns_per_mode,
        plane_unknowns=red.plane_unknowns,
    )
