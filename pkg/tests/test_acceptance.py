"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Tolerances are fixed by the acceptance contract and are never loosened here.
"""

import math
import time

import numpy as np

from herzlab.analyticity import (
    ConvolutionTestConfig,
    exponential_bound_check,
    heat_flow_sup_check,
    run_convolution_study,
)
from herzlab.herz import HerzParams, herz_norm
from herzlab.initial_data import random_x1, random_x2, x1_subradial_tau, x2_gaussian, x2_imaginary, x3_imaginary
from herzlab.solver import (
    SolverConfig,
    assemble_A,
    duhamel_step,
    heat_flow,
    picard_solve,
    reduced_iteration,
    trajectory_distance,
)
from herzlab.spectral import FrequencyGrid, ScalarField, SpectralField, convolve, convolve_direct
from herzlab.symmetry import (
    NO_SYMMETRY,
    X2_LABEL,
    ParityLabel,
    VectorLabel,
    check_field_label,
    check_trajectory_label,
    closure_search,
    counterexample_labels,
    impose_label,
    label_convolve,
    label_residuals,
    x1_residual,
)

GRID8 = FrequencyGrid(8, 0.25)
GRID4 = FrequencyGrid(4, 0.5)


def test_criterion_1_closure_search(criterion):
    t0 = time.perf_counter()
    proper = closure_search()
    degenerate = closure_search(include_degenerate=True)
    elapsed = time.perf_counter() - t0
    c = counterexample_labels()
    excluded = all(c[k] not in proper and c[k] not in degenerate for k in ("real", "imaginary"))
    ok = elapsed < 10 and X2_LABEL in proper and excluded and c["real_generic_imaginary"] is NO_SYMMETRY
    detail = (
        f"{elapsed:.2f} s, {len(proper)} closed labels ({len(degenerate)} with vanishing parts), "
        f"X2 present={X2_LABEL in proper}, counterexample excluded under both readings={excluded}"
    )
    assert criterion(1, ok, "closure search", detail)


def test_criterion_2_symmetry_heredity(criterion):
    cfg = SolverConfig.for_grid(GRID8, n_times=32)
    worst_x1 = worst_x2 = 0.0
    unconverged = 0
    for seed in range(100):
        def cb1(it, traj):
            nonlocal worst_x1
            worst_x1 = max(worst_x1, max(x1_residual(f) for f in traj.data))

        def cb2(it, traj):
            nonlocal worst_x2
            worst_x2 = max(worst_x2, check_trajectory_label(traj.data, X2_LABEL))

        unconverged += not picard_solve(random_x1(GRID8, 1e-3, seed), cfg, cb1).converged
        unconverged += not picard_solve(random_x2(GRID8, 1e-3, seed), cfg, cb2).converged
    ok = worst_x1 <= 1e-10 and worst_x2 <= 1e-10 and unconverged == 0
    detail = f"200 runs, worst X1 residual {worst_x1:.2e}, worst X2 residual {worst_x2:.2e}, unconverged {unconverged}"
    assert criterion(2, ok, "X1/X2 heredity along Picard iterates", detail)


def test_criterion_3_A0_label(criterion):
    target = ParityLabel(0b111, 0b000)
    worst = 0.0
    cases = [x2_gaussian(GRID8, eps=1.0)] + [random_x2(GRID8, 1.0, seed) for seed in range(10)]
    for u in cases:
        s = assemble_A(u, u).real_imag_split()
        a0 = (s["A01"].values + s["A02"].values) + 1j * (s["A03"].values + s["A04"].values)
        scale = float(np.max(np.abs(a0)))
        worst = max(worst, float(np.max(label_residuals(a0, target, scale))))
    ok = worst <= 1e-10
    detail = f"{len(cases)} X2 fields, label {target}, worst residual {worst:.2e}"
    assert criterion(3, ok, "A0 parity label", detail)


def test_criterion_4_exponential_bound(criterion):
    rep = exponential_bound_check(100_000, seed=0, t_max=1e2, r_max=1e2, rel_slack=1e-12)
    detail = f"{rep.samples} samples, {rep.violations} violations, max log gap {rep.max_log_gap:.3f}"
    assert criterion(4, rep.passed and rep.samples == 100_000, "pointwise exponential estimate", detail)


def test_criterion_5_heat_flow_analyticity(criterion):
    worst_mode = worst_norm = 0.0
    fields = [
        x2_gaussian(GRID8),
        x3_imaginary(GRID8),
        x1_subradial_tau(GRID8),
        random_x1(GRID8, 1e-3, 0),
        random_x2(FrequencyGrid(6, 0.5), 1e-3, 1),
    ]
    params = [HerzParams(0.5, 2, 2), HerzParams.critical(2.5, 2), HerzParams.critical(2, 4)]
    for u0 in fields:
        traj = heat_flow(u0, SolverConfig.for_grid(u0.grid, n_times=16))
        worst_mode = max(worst_mode, heat_flow_sup_check(u0, traj)[1])
        mag = ScalarField(u0.grid, np.max(np.abs(u0.data), axis=0))
        for P in params:
            expect = math.exp(0.25) * herz_norm(mag, P)
            worst_norm = max(worst_norm, abs(herz_norm(traj.sup_exp, P) - expect) / expect)
    ok = worst_mode <= 1e-12 and worst_norm <= 1e-10
    detail = f"per-mode U_e deviation {worst_mode:.2e}, Herz norm deviation {worst_norm:.2e}"
    assert criterion(5, ok, "uniform analyticity of the heat flow", detail)


CONVOLUTION_CASES = [(2.0, 2.0), (2.0, 4.0), (2.5, 2.0)]


def test_criterion_6_convolution_inequality(criterion):
    grid = FrequencyGrid(19, 0.25)
    lines, ok = [], True
    for p, q in CONVOLUTION_CASES:
        C = {}
        for lo, hi in ((-2, 2), (-3, 3)):
            cfg = ConvolutionTestConfig(HerzParams.critical(p, q, lo, hi), trials=500, seed=0)
            rep = run_convolution_study(grid, cfg)
            C[hi] = rep.max_ratio
            ok &= bool(rep.decomposition_ok) and math.isfinite(rep.max_ratio) and len(rep.trials) == 500
        stability = C[3] / C[2]
        ok &= abs(stability - 1.0) <= 0.2
        lines.append(f"(p,q,alpha)=({p:g},{q:g},{2 - 3 / p:g}) C={C[2]:.3f}->{C[3]:.3f} ({stability:.3f})")
    assert criterion(6, ok, "convolution inequality", "; ".join(lines) + "; W<=C(I1+I2+I3) on all trials")


def test_criterion_7_picard_contraction(criterion):
    cfg = SolverConfig.for_grid(GRID8)
    eps = 1e-3
    runs = {e: picard_solve(x2_gaussian(GRID8, eps=e), cfg) for e in (eps, eps / 2)}
    scaling = runs[eps].contraction_ratios[0] / runs[eps / 2].contraction_ratios[0]
    sol = runs[eps]
    Ue = herz_norm(sol.trajectory.sup_exp, cfg.herz)
    again = duhamel_step(sol.trajectory, x2_gaussian(GRID8, eps=eps), cfg)
    change = trajectory_distance(again.data, sol.trajectory.data, GRID8, cfg.herz)
    ok = (
        all(r.converged for r in runs.values())
        and 1.8 <= scaling <= 2.2
        and math.isfinite(Ue)
        and change < cfg.contraction_tol
    )
    detail = (
        f"contraction ratios {runs[eps].contraction_ratios[0]:.3e}/{runs[eps / 2].contraction_ratios[0]:.3e}"
        f" -> scaling {scaling:.3f}, ||U_e|| {Ue:.3e}, re-application change {change:.2e}"
    )
    assert criterion(7, ok, "Picard contraction", detail)


def test_criterion_8_reductions(criterion):
    cfg = SolverConfig.for_grid(GRID8, n_times=32)
    cases = [
        ("X1", random_x1(GRID8, 1e-3, 7), 2),
        ("X2-imaginary", x2_imaginary(GRID8), 2),
        ("X3-imaginary", x3_imaginary(GRID8), 1),
    ]
    ok, parts = True, []
    for mode, u0, unknowns in cases:
        full = picard_solve(u0, cfg).trajectory.data
        red = reduced_iteration(u0, mode, cfg)
        err = float(np.max(np.abs(red.trajectory.data - full))) / float(np.max(np.abs(full)))
        ok &= err <= 1e-9 and red.real_unknowns_per_mode == unknowns and red.converged
        parts.append(f"{mode}: error {err:.1e}, {red.real_unknowns_per_mode} unknowns/mode")
    assert criterion(8, ok, "reduced iterations", "; ".join(parts))


PARTS = [None, *range(8)]
CANDIDATES = [ParityLabel(a, b) for a in PARTS for b in PARTS if (a, b) != (None, None)]
EMPTY = ParityLabel(None, None)


def scanned_label(f: ScalarField):
    """Label read off by running the field check against every candidate label.

    A vanishing part satisfies every parity, so it shows up as ``None``; a part
    with no matching parity makes the scan come back empty.
    """
    zero = np.zeros_like(f.values)
    u = SpectralField(f.grid, np.stack([f.values, zero, zero]))
    hits = [c for c in CANDIDATES if check_field_label(u, VectorLabel((c, EMPTY, EMPTY)), tol=1e-10).passed]
    if not hits:
        return NO_SYMMETRY
    parts = []
    for name in ("alpha", "beta"):
        values = {getattr(h, name) for h in hits}
        parts.append(None if None in values else values.pop() if len(values) == 1 else NO_SYMMETRY)
    return NO_SYMMETRY if NO_SYMMETRY in parts else ParityLabel(*parts)


def test_criterion_9_oracle_equivalence(criterion):
    rng = np.random.default_rng(20240901)
    fft_fail = label_fail = 0
    worst = 0.0
    for _ in range(1000):
        a = rng.standard_normal(GRID4.shape) + 1j * rng.standard_normal(GRID4.shape)
        b = rng.standard_normal(GRID4.shape) + 1j * rng.standard_normal(GRID4.shape)
        f, g = ScalarField(GRID4, a), ScalarField(GRID4, b)
        fast, slow = convolve(f, g).values, convolve_direct(f, g).values
        err = float(np.max(np.abs(fast - slow))) / float(np.max(np.abs(slow)))
        worst = max(worst, err)
        fft_fail += err > 1e-12
    for _ in range(1000):
        x, y = (CANDIDATES[i] for i in rng.integers(len(CANDIDATES), size=2))
        fx = impose_label(rng.standard_normal(GRID4.shape) + 1j * rng.standard_normal(GRID4.shape), x)
        fy = impose_label(rng.standard_normal(GRID4.shape) + 1j * rng.standard_normal(GRID4.shape), y)
        measured = scanned_label(convolve(ScalarField(GRID4, fx), ScalarField(GRID4, fy)))
        label_fail += measured != label_convolve(x, y)
    ok = fft_fail == 0 and label_fail == 0
    detail = (
        f"1000 FFT/direct cases: {fft_fail} failures (worst {worst:.1e} vs 1e-12); "
        f"1000 label cases over {len(CANDIDATES)} candidates: {label_fail} failures"
    )
    assert criterion(9, ok, "oracle equivalence", detail)
