"""Uniform-analyticity functionals, the critical convolution inequality and the
three-region decomposition diagnostic.

The convolution inequality compares ``|| |xi|^{-1} (U * V) ||`` with
``||U|| ||V||`` in a Herz norm.  The diagnostic splits ``U * V`` on output shell
``j`` according to the shell of the inner variable ``eta``:

* region 1: shells ``<= j - 2`` and the origin (``|eta| <= 2^{j-1}``),
* region 3: shells ``j - 1 .. j + 1`` (``2^{j-1} < |eta| <= 2^{j+2}``),
* region 2: shells ``>= j + 2`` (``|eta| > 2^{j+2}``),

and weighs each piece with ``2^{q j (alpha - 1)}`` in place of ``|xi|^{-1}``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from herzlab.herz import HerzParams, herz_norm, herz_norms, random_herz_field, shell_decomposition
from herzlab.spectral import (
    FrequencyGrid,
    ScalarField,
    _check_same_grid,
    convolve,
    convolve_direct_arrays,
    cropped_ifft,
    padded_fft,
)
from herzlab.solver import TrajectoryRecord

REPORT_SCHEMA_VERSION = 1
CSV_COLUMNS = ("trial", "p", "q", "alpha", "lhs", "rhs", "ratio", "I1", "I2", "I3")


# -- uniform quantities --------------------------------------------------------


def uniform_quantities(traj: TrajectoryRecord) -> tuple[ScalarField, ScalarField]:
    """``U = sup_t |u|`` and ``U_e = sup_t e^{sqrt(t)|xi|} |u|``, maximized over components.

    The suprema run over the time nodes together with the per-mode peak time
    ``1/(4|xi|^2)``.
    """
    if traj is None or len(traj) == 0:
        raise ValueError("empty trajectory")
    return traj.sup_abs, traj.sup_exp


def gevrey_norm(traj: TrajectoryRecord, t: float, theta: float | None = None, p: float = 2.0) -> float:
    """``{ int e^{sqrt(t) p |xi|} |xi|^{theta p} |u(t, xi)|^p dxi }^{1/p}`` at a node ``t``.

    ``|u|`` is the largest component modulus and the origin is excluded.
    ``theta`` defaults to ``3/p' - 1``.
    """
    idx = np.flatnonzero(np.isclose(traj.times, t, rtol=1e-12, atol=0.0))
    if len(idx) == 0:
        raise ValueError(f"t={t} is not a time node of the trajectory")
    if theta is None:
        theta = 3.0 * (1.0 - 1.0 / p) - 1.0
    grid = traj.grid
    mag = np.max(np.abs(traj.data[idx[0]]), axis=0)
    nz = grid.nonzero
    r = grid.xi_norm[nz]
    if math.isinf(p):
        vals = np.exp(math.sqrt(t) * r) * r**theta * mag[nz]
        return float(np.max(vals)) if vals.size else 0.0
    with np.errstate(divide="ignore"):
        logs = math.sqrt(t) * p * r + theta * p * np.log(r) + p * np.log(mag[nz])
    total = grid.cell_volume * float(np.sum(np.exp(logs)))
    return total ** (1.0 / p)


def heat_flow_sup_check(u0, traj: TrajectoryRecord) -> tuple[float, float]:
    """Worst relative deviations of ``U`` from ``|u0|`` and of ``U_e`` from ``e^{1/4}|u0|``
    over nonzero modes with nonzero data."""
    grid = traj.grid
    mag = np.max(np.abs(u0.data), axis=0)
    ok = grid.nonzero & (mag > 0)
    if not np.any(ok):
        return 0.0, 0.0
    U, Ue = uniform_quantities(traj)
    dev_u = np.max(np.abs(U.values[ok] - mag[ok]) / mag[ok])
    dev_e = np.max(np.abs(Ue.values[ok] - math.exp(0.25) * mag[ok]) / (math.exp(0.25) * mag[ok]))
    return float(dev_u), float(dev_e)


# -- pointwise exponential estimate --------------------------------------------


@dataclass(frozen=True)
class ExponentialBoundReport:
    samples: int
    violations: int
    max_log_gap: float
    rel_slack: float

    @property
    def passed(self) -> bool:
        return self.violations == 0


def exponential_bound_check(
    n_samples: int = 100_000, seed: int = 0, t_max: float = 1e2, r_max: float = 1e2, rel_slack: float = 1e-12
) -> ExponentialBoundReport:
    """Sample ``e^{-(t-s)|xi|^2} e^{-sqrt(s)|xi-eta|} e^{-sqrt(s)|eta|} <= e^2 e^{-sqrt(t)|xi|} e^{-(t-s)|xi|^2/2}``.

    Both sides are compared in logarithmic form.  Half of the samples are uniform in
    the box ``0 <= s <= t <= t_max``, ``|xi|, |eta| <= r_max``; the other half put
    ``eta`` on the segment ``[0, xi]`` (equality in the triangle inequality) with
    ``(sqrt(t) + sqrt(s))|xi|`` near 2, where the gap is smallest.
    """
    rng = np.random.default_rng(seed)
    n_a = n_samples // 2
    n_b = n_samples - n_a

    def ball(n, rmax):
        d = rng.standard_normal((n, 3))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        return d * (rmax * rng.random(n) ** (1 / 3))[:, None]

    t_a = t_max * rng.random(n_a)
    s_a = t_a * rng.random(n_a)
    xi_a, eta_a = ball(n_a, r_max), ball(n_a, r_max)

    xi_dir = ball(n_b, 1.0)
    xi_dir /= np.linalg.norm(xi_dir, axis=1, keepdims=True)
    t_b = t_max * rng.random(n_b) ** 4
    s_b = t_b * rng.random(n_b)
    target = rng.uniform(0.5, 4.0, n_b)
    r_b = np.minimum(target / (np.sqrt(t_b) + np.sqrt(s_b) + 1e-300), r_max)
    xi_b = xi_dir * r_b[:, None]
    eta_b = xi_b * rng.random(n_b)[:, None]

    t = np.concatenate([t_a, t_b])
    s = np.concatenate([s_a, s_b])
    xi = np.concatenate([xi_a, xi_b])
    eta = np.concatenate([eta_a, eta_b])
    x = np.linalg.norm(xi, axis=1)
    a = np.linalg.norm(xi - eta, axis=1)
    b = np.linalg.norm(eta, axis=1)
    log_lhs = -(t - s) * x**2 - np.sqrt(s) * (a + b)
    log_rhs = 2.0 - np.sqrt(t) * x - 0.5 * (t - s) * x**2
    gap = log_lhs - log_rhs
    violations = int(np.sum(gap > math.log1p(rel_slack)))
    return ExponentialBoundReport(n_samples, violations, float(np.max(gap)), rel_slack)


# -- majorant bound -------------------------------------------------------------


@dataclass(frozen=True)
class MajorantReport:
    """``max_xi W_e(xi) / (|xi|^{-1} (U_e * U_e)(xi))`` over modes where the bound is positive."""

    ratio: float
    constant: float

    @property
    def passed(self) -> bool:
        return self.ratio <= self.constant

    @property
    def within_e2(self) -> bool:
        return self.ratio <= math.e**2


MAJORANT_CONSTANT = 6.0 * math.e**2


def majorant_check(previous: TrajectoryRecord, update: TrajectoryRecord, slack: float = 1e-8) -> MajorantReport:
    """Compare the exponentially weighted Duhamel term of ``update`` with
    ``|xi|^{-1}(U_e * U_e)`` built from the iterate ``previous`` that produced it.

    The kernel bound ``int_0^t e^{-(t-s)|xi|^2/2} ds <= 2/|xi|^2`` and the vector
    bookkeeping ``|A| <= 3 |xi| (U * U)`` give the constant ``6 e^2``;
    ``slack`` absorbs the time quadrature.
    """
    if update.bilinear_sup_exp is None:
        raise ValueError("update carries no Duhamel term")
    grid = _check_same_grid(previous.grid, update.grid)
    Ue = previous.sup_exp.values
    conv = convolve(ScalarField(grid, Ue), ScalarField(grid, Ue)).values.real
    bound = grid.inv_xi_norm * conv
    We = update.bilinear_sup.values
    scale = float(np.max(bound)) if bound.size else 0.0
    ok = bound > 1e-14 * scale
    if not np.any(ok):
        return MajorantReport(0.0, MAJORANT_CONSTANT * (1 + slack))
    ratio = float(np.max(We[ok] / bound[ok]))
    return MajorantReport(ratio, MAJORANT_CONSTANT * (1 + slack))


# -- convolution inequality -----------------------------------------------------


@dataclass(frozen=True)
class TrialResult:
    lhs: float
    rhs: float
    ratio: float

    def __iter__(self):
        return iter((self.lhs, self.rhs, self.ratio))


def _require_nonnegative_real(f: ScalarField, name: str) -> np.ndarray:
    v = f.values
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise ValueError(f"{name} must be real")
        v = v.real
    if np.any(v < 0):
        raise ValueError(f"{name} must be nonnegative")
    return v


def convolution_inequality_trial(U: ScalarField, V: ScalarField, params: HerzParams) -> TrialResult:
    """``lhs = || |xi|^{-1} (U * V) ||``, ``rhs = ||U|| ||V||`` and their ratio (0 if rhs = 0)."""
    grid = _check_same_grid(U.grid, V.grid)
    u = _require_nonnegative_real(U, "U")
    v = _require_nonnegative_real(V, "V")
    conv = convolve(ScalarField(grid, u), ScalarField(grid, v)).values
    lhs = float(herz_norms(grid.inv_xi_norm * conv, grid, params))
    rhs = herz_norm(ScalarField(grid, u), params) * herz_norm(ScalarField(grid, v), params)
    return TrialResult(lhs, rhs, lhs / rhs if rhs > 0 else 0.0)


@dataclass(frozen=True)
class ConvolutionTestConfig:
    """Norm, proof exponents and sampling for the inequality study.

    ``lam`` must lie in ``(alpha, 3/p')``, ``rho`` in ``(p/3, min(1, p - 1)]`` and
    ``0 < delta_prime < delta < 3 rho / p - 1``.  For ``p`` outside ``(3/2, 3)`` the
    windows for ``rho`` and ``delta`` are empty and these exponents must be
    ``None``; passing ``None`` inside the range selects interior defaults.
    """

    herz: HerzParams
    lam: float | None = None
    rho: float | None = None
    delta: float | None = None
    delta_prime: float | None = None
    trials: int = 100
    seed: int = 0
    decomposition: bool = True
    holder_bounds: bool = False

    def __post_init__(self):
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        lo, hi = self.lambda_window
        if self.lam is None and lo < hi:
            object.__setattr__(self, "lam", lo + 0.4 * (hi - lo))
        if self.lam is not None and not (lo < self.lam < hi):
            raise ValueError(f"lambda={self.lam} outside ({lo}, {hi})")
        rlo, rhi = self.rho_window
        if rlo >= rhi:
            if any(x is not None for x in (self.rho, self.delta, self.delta_prime)):
                raise ValueError(f"no admissible rho for p={self.herz.p}; leave rho/delta unset")
            return
        if self.rho is None:
            object.__setattr__(self, "rho", rlo + 0.7 * (rhi - rlo))
        if not (rlo < self.rho <= rhi):
            raise ValueError(f"rho={self.rho} outside ({rlo}, {rhi}]")
        dmax = 3.0 * self.rho / self.herz.p - 1.0
        if self.delta is None:
            object.__setattr__(self, "delta", dmax * 6.0 / 7.0)
        if self.delta_prime is None:
            object.__setattr__(self, "delta_prime", self.delta / 2.0)
        if not (0 < self.delta_prime < self.delta < dmax):
            raise ValueError(
                f"need 0 < delta'={self.delta_prime} < delta={self.delta} < 3 rho/p - 1 = {dmax}"
            )

    @property
    def lambda_window(self) -> tuple[float, float]:
        return self.herz.alpha, 3.0 / self.herz.p_conjugate

    @property
    def rho_window(self) -> tuple[float, float]:
        p = self.herz.p
        if math.isinf(p):
            return math.inf, 1.0
        return p / 3.0, min(1.0, p - 1.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["herz"] = asdict(self.herz)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ConvolutionTestConfig:
        d = dict(d)
        d["herz"] = HerzParams(**d["herz"])
        return cls(**d)


@dataclass(frozen=True)
class DecompositionResult:
    W: float
    I1: float
    I2: float
    I3: float
    constant: float
    I3_bound: float | None = None
    I2_bound: float | None = None

    @property
    def passed(self) -> bool:
        """``W <= C (I1 + I2 + I3)`` with a round-off allowance of ``1e-12`` relative."""
        return self.W <= self.constant * (self.I1 + self.I2 + self.I3) * (1 + 1e-12)


def split_constant(p: float, q: float) -> float:
    """``C`` with ``W <= C (I1 + I2 + I3)``.

    Convexity gives ``3^{p-1}`` inside each shell integral and the ``l^{q/p}``
    triangle inequality gives ``3^{max(0, q/p - 1)}`` across shells; for
    ``p = inf`` the shell maxima add up directly.
    """
    if math.isinf(p) and math.isinf(q):
        return 1.0
    if math.isinf(p):
        return 3.0 ** (q - 1.0)
    if math.isinf(q):
        return 3.0 ** ((p - 1.0) / p)
    return 3.0 ** (q * (p - 1.0) / p) * 3.0 ** max(0.0, q / p - 1.0)


def _weighted_functional(values_by_shell: dict[int, float], params: HerzParams) -> float:
    """``sum_j (2^{j (alpha - 1)} S_j^{1/p})^q`` for shell integrals ``S_j`` (a maximum for q = inf)."""
    p, q, a = params.p, params.q, params.alpha
    if not values_by_shell:
        return 0.0
    js = np.array(list(values_by_shell.keys()), dtype=float)
    S = np.array(list(values_by_shell.values()))
    local = S if math.isinf(p) else S ** (1.0 / p)
    terms = np.exp2(js * (a - 1.0)) * local
    if math.isinf(q):
        return float(np.max(terms))
    return float(np.sum(terms**q))


def _shell_integral(values: np.ndarray, mask: np.ndarray, grid: FrequencyGrid, p: float) -> float:
    a = np.abs(values[mask])
    if a.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(a))
    return grid.cell_volume * float(np.sum(a**p))


def _output_shells(params: HerzParams, grid: FrequencyGrid) -> list[int]:
    shells = shell_decomposition(grid)
    sel = shells.selected(params.j_min, params.j_max)
    return [j for j, keep in zip(shells.js, sel) if keep]


def _region_pieces(u: np.ndarray, v: np.ndarray, grid: FrequencyGrid) -> dict:
    """Partial convolutions ``U * (V 1_{shell s})`` for every grid shell ``s`` and, under
    the key ``None``, for the origin."""
    shells = shell_decomposition(grid)
    N = grid.half_extent
    fu = padded_fft(u, N, real=True)
    pieces = {}
    for s in shells.js:
        vs = np.where(shells.shell_index == s, v, 0.0)
        if not np.any(vs):
            continue
        pieces[s] = grid.cell_volume * cropped_ifft(fu * padded_fft(vs, N, real=True), N, real=True)
    o = grid.origin
    if v[o] == 0:
        pieces[None] = np.zeros(grid.shape)
    else:
        # a point mass at the origin just rescales U
        pieces[None] = grid.cell_volume * v[o] * u
    return pieces


def _region_sums(pieces: dict, j: int, shape) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    r1, r2, r3 = pieces[None].copy(), np.zeros(shape), np.zeros(shape)
    for s, piece in pieces.items():
        if s is None:
            continue
        if s <= j - 2:
            r1 += piece
        elif s <= j + 1:
            r3 += piece
        else:
            r2 += piece
    return r1, r2, r3


def decompose(
    U: ScalarField, V: ScalarField, params: HerzParams, lam: float | None = None, rho: float | None = None
) -> DecompositionResult:
    """``W`` and the three region functionals for one pair of fields.

    ``W = sum_j 2^{qj(alpha-1)} (int_shell_j |U*V|^p)^{q/p}`` and ``I_i`` is the same
    functional of the region-``i`` piece.  With ``lam`` (resp. ``rho``) the discrete
    Hoelder bounds for ``I3`` (resp. ``I2``) are evaluated as well.
    """
    grid = _check_same_grid(U.grid, V.grid)
    u = _require_nonnegative_real(U, "U")
    v = _require_nonnegative_real(V, "V")
    pieces = _region_pieces(u, v, grid)
    full = sum(pieces.values(), np.zeros(grid.shape))
    shell_index = shell_decomposition(grid).shell_index
    p = params.p
    W_parts, I_parts = {}, ({}, {}, {})
    for j in _output_shells(params, grid):
        mask = shell_index == j
        W_parts[j] = _shell_integral(full, mask, grid, p)
        for region, r in zip(I_parts, _region_sums(pieces, j, grid.shape)):
            region[j] = _shell_integral(r, mask, grid, p)
    W = _weighted_functional(W_parts, params)
    I1, I2, I3 = (_weighted_functional(d, params) for d in I_parts)
    finite = math.isfinite(p) and p > 1
    I3_bound = _I3_holder_bound(u, v, grid, params, lam) if lam is not None and finite else None
    I2_bound = _I2_holder_bound(u, v, grid, params, rho) if rho is not None and finite else None
    return DecompositionResult(W, I1, I2, I3, split_constant(p, params.q), I3_bound, I2_bound)


def decompose_direct(U: ScalarField, V: ScalarField, params: HerzParams) -> tuple[float, float, float, float]:
    """Reference ``(W, I1, I2, I3)`` from explicit pair sums with the regions written as
    inequalities on ``|eta|^2`` (no shell bookkeeping, no transforms)."""
    grid = _check_same_grid(U.grid, V.grid)
    u = _require_nonnegative_real(U, "U")
    v = _require_nonnegative_real(V, "V")
    r2 = grid.xi2
    out_j = _output_shells(params, grid)
    W_parts, I_parts = {}, ({}, {}, {})
    full = convolve_direct_arrays(u, v, grid)
    for j in out_j:
        mask = (r2 > 4.0**j) & (r2 <= 4.0 ** (j + 1))
        lo, hi = 4.0 ** (j - 1), 4.0 ** (j + 2)
        regions = (r2 <= lo, r2 > hi, (r2 > lo) & (r2 <= hi))
        W_parts[j] = _shell_integral(full, mask, grid, params.p)
        for store, reg in zip(I_parts, regions):
            piece = convolve_direct_arrays(u, np.where(reg, v, 0.0), grid)
            store[j] = _shell_integral(piece, mask, grid, params.p)
    W = _weighted_functional(W_parts, params)
    return (W, *(_weighted_functional(d, params) for d in I_parts))


def _I3_holder_bound(u: np.ndarray, v: np.ndarray, grid: FrequencyGrid, params: HerzParams, lam: float) -> float:
    """Discrete Hoelder bound for the region-3 functional (needs ``U(0) = 0``).

    On shell ``j``: ``int |R3|^p <= K_j^{p-1} M_j V_j`` with
    ``K_j = h^3 sum_{0<|z|<=3 2^{j+1}} |z|^{-lam p'}``,
    ``M_j = h^3 sum_{|z|<=2^{j+3}} |z|^{lam p} U(z)^p`` and
    ``V_j = h^3 sum_{2^{j-1}<|eta|<=2^{j+2}} V^p``.
    """
    p = params.p
    pc = p / (p - 1.0)
    r2 = grid.xi2
    nz = grid.nonzero
    vol = grid.cell_volume
    shells = shell_decomposition(grid)
    terms = {}
    for j in _output_shells(params, grid):
        near = nz & (r2 <= 9.0 * 4.0 ** (j + 1))
        K = vol * float(np.sum(grid.xi_norm[near] ** (-lam * pc)))
        ball = r2 <= 4.0 ** (j + 3)
        M = vol * float(np.sum(grid.xi_norm[ball] ** (lam * p) * u[ball] ** p))
        ring = (r2 > 4.0 ** (j - 1)) & (r2 <= 4.0 ** (j + 2))
        Vj = vol * float(np.sum(v[ring] ** p))
        if shells.count(j):
            terms[j] = K ** (p - 1.0) * M * Vj
    return _weighted_functional(terms, params)


def _I2_holder_bound(u: np.ndarray, v: np.ndarray, grid: FrequencyGrid, params: HerzParams, rho: float) -> float:
    """Discrete Hoelder bound for the region-2 functional from the split
    ``U V = (U^{1-rho} V) U^rho``:
    ``|R2(xi)|^p <= (U^{p(1-rho)} * V^p 1_2)(xi) (U^{p' rho} * 1_2)(xi)^{p-1}``."""
    p = params.p
    pc = p / (p - 1.0)
    shells = shell_decomposition(grid)
    N = grid.half_extent
    vol = grid.cell_volume
    fa = padded_fft(u ** (p * (1.0 - rho)), N, real=True)
    fb = padded_fft(u ** (pc * rho), N, real=True)
    terms = {}
    for j in _output_shells(params, grid):
        mask = shells.shell_index == j
        region = grid.xi2 > 4.0 ** (j + 2)
        c1 = vol * cropped_ifft(fa * padded_fft(np.where(region, v**p, 0.0), N, real=True), N, real=True)
        c2 = vol * cropped_ifft(fb * padded_fft(region.astype(float), N, real=True), N, real=True)
        prod = np.maximum(c1, 0.0) * np.maximum(c2, 0.0) ** (p - 1.0)
        terms[j] = vol * float(np.sum(prod[mask]))
    return _weighted_functional(terms, params)


# -- reports ---------------------------------------------------------------------


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    p: float
    q: float
    alpha: float
    lhs: float
    rhs: float
    ratio: float
    I1: float | None = None
    I2: float | None = None
    I3: float | None = None
    W: float | None = None
    decomposition_ok: bool | None = None
    I3_bound: float | None = None
    I2_bound: float | None = None

    def csv_row(self) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(float(x))

        return [str(self.trial), fmt(self.p), fmt(self.q), fmt(self.alpha), fmt(self.lhs), fmt(self.rhs),
                fmt(self.ratio), fmt(self.I1), fmt(self.I2), fmt(self.I3)]


@dataclass(frozen=True)
class InequalityReport:
    """Per-trial ``lhs``, ``rhs`` and ratio, with the region functionals when the
    decomposition is enabled.  ``I_i`` are reported normalized by ``(||U|| ||V||)^q``
    so that their maxima are the empirical constants of the three regions."""

    config: ConvolutionTestConfig | None
    trials: list[TrialRecord] = field(default_factory=list)

    @property
    def max_ratio(self) -> float:
        return max((t.ratio for t in self.trials), default=0.0)

    @property
    def mean_ratio(self) -> float:
        return float(np.mean([t.ratio for t in self.trials])) if self.trials else 0.0

    @property
    def region_constants(self) -> tuple[float, float, float] | None:
        if not self.trials or self.trials[0].I1 is None:
            return None
        return tuple(max(getattr(t, k) for t in self.trials) for k in ("I1", "I2", "I3"))

    @property
    def decomposition_ok(self) -> bool | None:
        flags = [t.decomposition_ok for t in self.trials if t.decomposition_ok is not None]
        return all(flags) if flags else None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for t in self.trials:
            w.writerow(t.csv_row())
        return buf.getvalue()

    def summary(self) -> dict:
        herz = self.config.herz if self.config is not None else None
        out = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "kind": "convolution-test",
            "p": None if herz is None else herz.p,
            "q": None if herz is None else herz.q,
            "alpha": None if herz is None else herz.alpha,
            "j_min": None if herz is None else herz.j_min,
            "j_max": None if herz is None else herz.j_max,
            "trials": len(self.trials),
            "max_ratio": self.max_ratio,
            "mean_ratio": self.mean_ratio,
            "region_constants": self.region_constants,
            "decomposition_ok": self.decomposition_ok,
        }
        if self.config is not None:
            out["lam"], out["rho"] = self.config.lam, self.config.rho
            out["delta"], out["delta_prime"] = self.config.delta, self.config.delta_prime
        return out

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def decomposition_diagnostic(
    U: ScalarField, V: ScalarField, cfg: ConvolutionTestConfig, trial: int = 0
) -> InequalityReport:
    """One-trial report with the inequality ratio, the region functionals (normalized by
    ``(||U|| ||V||)^q``) and the check ``W <= C (I1 + I2 + I3)``.  With
    ``cfg.holder_bounds`` the exponents ``lam`` and ``rho`` feed the Hoelder bounds
    for the region-3 and region-2 pieces."""
    norm_params = cfg.herz.full_range()
    lhs, rhs, ratio = convolution_inequality_trial(U, V, norm_params)
    if cfg.holder_bounds:
        d = decompose(U, V, norm_params, cfg.lam, cfg.rho)
    else:
        d = decompose(U, V, norm_params)
    q = cfg.herz.q
    scale = 1.0 if rhs == 0 else (rhs if math.isinf(q) else rhs**q)
    rec = TrialRecord(
        trial, cfg.herz.p, q, cfg.herz.alpha, lhs, rhs, ratio,
        d.I1 / scale, d.I2 / scale, d.I3 / scale, d.W / scale, d.passed,
        None if d.I3_bound is None else d.I3_bound / scale,
        None if d.I2_bound is None else d.I2_bound / scale,
    )
    return InequalityReport(cfg, [rec])


def trial_fields(grid: FrequencyGrid, cfg: ConvolutionTestConfig, trial: int) -> tuple[ScalarField, ScalarField]:
    """The deterministic pair of unit-norm random fields used by ``trial``."""
    seeds = np.random.SeedSequence([cfg.seed, trial]).generate_state(2)
    U = random_herz_field(grid, cfg.herz, 1.0, int(seeds[0]))
    V = random_herz_field(grid, cfg.herz, 1.0, int(seeds[1]))
    return U, V


def run_convolution_study(grid: FrequencyGrid, cfg: ConvolutionTestConfig) -> InequalityReport:
    """``cfg.trials`` random pairs supported on the shell range of ``cfg.herz`` and
    normalized in it; all norms in the inequality run over every grid shell."""
    norm_params = cfg.herz.full_range()
    records = []
    for trial in range(cfg.trials):
        U, V = trial_fields(grid, cfg, trial)
        if cfg.decomposition:
            records.extend(decomposition_diagnostic(U, V, cfg, trial).trials)
        else:
            lhs, rhs, ratio = convolution_inequality_trial(U, V, norm_params)
            records.append(TrialRecord(trial, cfg.herz.p, cfg.herz.q, cfg.herz.alpha, lhs, rhs, ratio))
    return InequalityReport(cfg, records)
