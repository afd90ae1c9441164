"""Command-line experiment driver.

    herzlab simulate           [--config FILE] [--set key=value ...] [--out DIR]
    herzlab symmetry-search    ...
    herzlab convolution-test   ...
    herzlab analyticity-check  ...

A run is described by one JSON file (see :class:`ExperimentConfig`); individual
keys are overridden with ``--set section.key=value`` (``value`` parsed as JSON,
falling back to a bare string) or with the shortcut flags.  The JSON summary goes
to stdout and, with ``--out``, reports are written to ``DIR``.  Reports contain no
timestamps, so identical configurations give byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 numerical divergence,
4 failed check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from herzlab.analyticity import (
    ConvolutionTestConfig,
    InequalityReport,
    TrialRecord,
    convolution_inequality_trial,
    decompose,
    exponential_bound_check,
    gevrey_norm,
    heat_flow_sup_check,
    majorant_check,
    run_convolution_study,
    split_constant,
)
from herzlab.herz import HerzParams, herz_norm, shell_decomposition, vector_herz_norm
from herzlab.initial_data import FAMILIES, family
from herzlab.solver import (
    REDUCTION_MODES,
    NumericalDivergence,
    SolverConfig,
    SymmetryPreconditionError,
    heat_flow,
    picard_solve,
    reduced_iteration,
)
from herzlab.spectral import FrequencyGrid, ScalarField, divergence_residual, load_field
from herzlab.symmetry import (
    NO_SYMMETRY,
    X2_LABEL,
    check_trajectory_label,
    closure_table,
    counterexample_labels,
    is_divergence_compatible,
    update_label,
    x1_residual,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_CHECK = 0, 2, 3, 4
SUBCOMMANDS = ("simulate", "symmetry-search", "convolution-test", "analyticity-check")


class ConfigError(ValueError):
    """Malformed or out-of-range experiment configuration."""


class CheckFailed(AssertionError):
    """A verification performed by a subcommand did not hold."""


# -- configuration ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    N: int = 8
    h: float = 0.25


@dataclass(frozen=True)
class HerzSpec:
    alpha: float = 0.5
    p: float = 2.0
    q: float = 2.0
    j_min: int | None = None
    j_max: int | None = None

    def params(self) -> HerzParams:
        return HerzParams(self.alpha, self.p, self.q, self.j_min, self.j_max)


@dataclass(frozen=True)
class SimulateSpec:
    family: str = "x2_gaussian"
    eps: float = 1e-3
    family_params: dict = field(default_factory=dict)
    init_path: str | None = None
    reduction: str | None = None
    n_times: int = 64
    t_min_factor: float = 1e-4
    t_max_factor: float = 10.0
    max_iterations: int = 60
    contraction_tol: float = 1e-12
    smallness_threshold: float = 1e-2
    enforce_smallness: bool = True
    leray_each_step: bool = True
    herz: HerzSpec = field(default_factory=HerzSpec)


@dataclass(frozen=True)
class SymmetrySpec:
    include_degenerate: bool = False


@dataclass(frozen=True)
class ConvolutionSpec:
    mode: str = "random"
    herz: HerzSpec = field(default_factory=lambda: HerzSpec(0.5, 2.0, 2.0, -2, 1))
    lam: float | None = None
    rho: float | None = None
    delta: float | None = None
    delta_prime: float | None = None
    trials: int = 100
    decomposition: bool = True
    holder_bounds: bool = False
    indicator_shell: int = 0
    oracle_path: str | None = None


@dataclass(frozen=True)
class AnalyticitySpec:
    samples: int = 100_000
    family: str = "x2_gaussian"
    eps: float = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run needs; each subcommand reads its own section."""

    grid: GridSpec = field(default_factory=GridSpec)
    seed: int = 0
    simulate: SimulateSpec = field(default_factory=SimulateSpec)
    symmetry: SymmetrySpec = field(default_factory=SymmetrySpec)
    convolution: ConvolutionSpec = field(default_factory=ConvolutionSpec)
    analyticity: AnalyticitySpec = field(default_factory=AnalyticitySpec)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        cfg = _build(cls, d, "config")
        cfg.validate()
        return cfg

    def validate(self) -> None:
        """Construct every derived object once so that range errors surface at parse time."""
        try:
            grid = FrequencyGrid(self.grid.N, self.grid.h)
            sim = self.simulate
            if sim.family not in FAMILIES:
                raise ConfigError(f"simulate.family must be one of {FAMILIES}")
            if sim.reduction is not None and sim.reduction not in REDUCTION_MODES:
                raise ConfigError(f"simulate.reduction must be one of {REDUCTION_MODES} or null")
            if not sim.eps >= 0:
                raise ConfigError("simulate.eps must be nonnegative")
            self.solver_config(grid)
            conv = self.convolution
            if conv.mode not in ("random", "shell_indicator"):
                raise ConfigError("convolution.mode must be 'random' or 'shell_indicator'")
            ccfg = self.convolution_config()
            if conv.mode == "random":
                shells = shell_decomposition(grid)
                lo = shells.js[0] if ccfg.herz.j_min is None else ccfg.herz.j_min
                hi = shells.js[-1] if ccfg.herz.j_max is None else ccfg.herz.j_max
                missing = [j for j in range(lo, hi + 1) if shells.count(j) == 0]
                if missing:
                    raise ConfigError(
                        f"convolution.herz shells {missing} are empty on this grid (grid shells {shells.js})"
                    )
            if self.analyticity.samples < 1:
                raise ConfigError("analyticity.samples must be positive")
            if self.analyticity.family not in FAMILIES:
                raise ConfigError(f"analyticity.family must be one of {FAMILIES}")
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    def frequency_grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.grid.N, self.grid.h)

    def solver_config(self, grid: FrequencyGrid) -> SolverConfig:
        s = self.simulate
        return SolverConfig.for_grid(
            grid,
            n_times=s.n_times,
            t_min_factor=s.t_min_factor,
            t_max_factor=s.t_max_factor,
            max_iterations=s.max_iterations,
            contraction_tol=s.contraction_tol,
            herz=s.herz.params(),
            smallness_threshold=s.smallness_threshold,
            enforce_smallness=s.enforce_smallness,
            leray_each_step=s.leray_each_step,
        )

    def convolution_config(self) -> ConvolutionTestConfig:
        c = self.convolution
        return ConvolutionTestConfig(
            c.herz.params(), c.lam, c.rho, c.delta, c.delta_prime, c.trials, self.seed,
            c.decomposition, c.holder_bounds,
        )


def _build(cls, d, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(d) - set(known))
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {unknown}")
    kwargs = {}
    for name, value in d.items():
        sub = _NESTED.get((cls, name))
        kwargs[name] = _build(sub, value, f"{where}.{name}") if sub is not None else value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


_NESTED = {
    (ExperimentConfig, "grid"): GridSpec,
    (ExperimentConfig, "simulate"): SimulateSpec,
    (ExperimentConfig, "symmetry"): SymmetrySpec,
    (ExperimentConfig, "convolution"): ConvolutionSpec,
    (ExperimentConfig, "analyticity"): AnalyticitySpec,
    (SimulateSpec, "herz"): HerzSpec,
    (ConvolutionSpec, "herz"): HerzSpec,
}


def _set_path(d: dict, dotted: str, value) -> None:
    keys = dotted.split(".")
    node = d
    for k in keys[:-1]:
        if k not in node or not isinstance(node[k], dict):
            raise ConfigError(f"--set {dotted}: no section {k!r}")
        node = node[k]
    if keys[-1] not in node:
        raise ConfigError(f"--set {dotted}: unknown key {keys[-1]!r}")
    node[keys[-1]] = value


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    base = ExperimentConfig().to_dict()
    if args.config:
        try:
            user = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        base = _merge(base, user)
    shortcuts = {
        "N": "grid.N", "h": "grid.h", "seed": "seed", "eps": "simulate.eps", "family": "simulate.family",
        "reduction": "simulate.reduction", "trials": "convolution.trials", "mode": "convolution.mode",
        "oracle": "convolution.oracle_path", "samples": "analyticity.samples",
    }
    for attr, path in shortcuts.items():
        v = getattr(args, attr, None)
        if v is not None:
            _set_path(base, path, v)
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        _set_path(base, k.strip(), _parse_value(v))
    return ExperimentConfig.from_dict(base)


def _merge(base: dict, user: dict, where: str = "config") -> dict:
    if not isinstance(user, dict):
        raise ConfigError(f"{where} must be an object")
    out = dict(base)
    for k, v in user.items():
        if k not in base:
            raise ConfigError(f"unknown keys in {where}: [{k!r}]")
        if isinstance(base[k], dict) and isinstance(v, dict) and k not in ("family_params",):
            out[k] = _merge(base[k], v, f"{where}.{k}")
        else:
            out[k] = v
    return out


# -- output helpers --------------------------------------------------------------


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if x is None else (repr(float(x)) if isinstance(x, (float, np.floating)) else x) for x in r])
    return buf.getvalue()


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


class Outputs:
    def __init__(self, out_dir: str | None):
        self.dir = Path(out_dir) if out_dir else None
        if self.dir is not None:
            self.dir.mkdir(parents=True, exist_ok=True)

    def write(self, name: str, text: str) -> None:
        if self.dir is not None:
            (self.dir / name).write_text(text)


def _norm_rows(items, params: HerzParams):
    return [(name, params.alpha, params.p, params.q, params.j_min, params.j_max, value) for name, value in items]


NORM_COLUMNS = ("quantity", "alpha", "p", "q", "j_min", "j_max", "norm")


# -- subcommands -----------------------------------------------------------------


def _initial_data(cfg: ExperimentConfig, grid: FrequencyGrid, fam: str, eps: float, params: dict):
    if cfg.simulate.init_path:
        u0 = load_field(cfg.simulate.init_path)
        if u0.grid != grid:
            raise ConfigError("init_path field grid differs from grid section")
        return u0
    try:
        return family(fam, grid, eps=eps, **params)
    except TypeError as exc:
        raise ConfigError(f"bad family_params for {fam}: {exc}") from exc


def run_simulate(cfg: ExperimentConfig, out: Outputs) -> dict:
    grid = cfg.frequency_grid()
    sim = cfg.simulate
    scfg = cfg.solver_config(grid)
    u0 = _initial_data(cfg, grid, sim.family, sim.eps, sim.family_params)
    rows = []

    def record(it, traj):
        rows.append((it, x1_residual(traj.data), check_trajectory_label(traj.data, X2_LABEL),
                     divergence_residual(traj.data, grid)))

    if sim.reduction is None:
        result = picard_solve(u0, scfg, callback=record)
        stored = 6
    else:
        try:
            result = reduced_iteration(u0, sim.reduction, scfg, callback=record)
        except SymmetryPreconditionError as exc:
            raise CheckFailed(str(exc)) from exc
        stored = result.real_unknowns_per_mode
    traj = result.trajectory
    params = scfg.herz
    Ue_norm = herz_norm(traj.sup_exp, params)
    U_norm = herz_norm(traj.sup_abs, params)
    node_norms = [vector_herz_norm(f, params) for f in traj.fields]
    out.write("residuals.csv", _csv(("iteration", "residual"), enumerate(result.residual_history, 1)))
    out.write("times.csv", _csv(("t", "vector_herz_norm"), zip(traj.times, node_norms)))
    out.write("symmetry.csv", _csv(("iteration", "x1_residual", "x2_residual", "divergence_residual"), rows))
    out.write("norms.csv", _csv(NORM_COLUMNS, _norm_rows(
        [("u0", vector_herz_norm(u0, params)), ("U", U_norm), ("U_e", Ue_norm)], params)))
    summary = {
        "schema_version": SCHEMA_VERSION,
        "kind": "simulate",
        "family": None if sim.init_path else sim.family,
        "eps": sim.eps,
        "reduction": sim.reduction,
        "real_unknowns_per_mode": stored,
        "iterations": result.iterations,
        "converged": result.converged,
        "residual_history": result.residual_history,
        "contraction_ratios": result.contraction_ratios,
        "u0_herz_norm": vector_herz_norm(u0, params),
        "U_herz_norm": U_norm,
        "U_e_herz_norm": Ue_norm,
        "max_x1_residual": max((r[1] for r in rows), default=0.0),
        "max_x2_residual": max((r[2] for r in rows), default=0.0),
        "max_divergence_residual": max((r[3] for r in rows), default=0.0),
    }
    out.write("summary.json", _dump(summary))
    return summary


def run_symmetry_search(cfg: ExperimentConfig, out: Outputs) -> dict:
    table = closure_table(cfg.symmetry.include_degenerate)
    fixed = [row.label for row in table if row.fixed]
    rows = []
    for row in table:
        image = "NO_SYMMETRY" if row.image is NO_SYMMETRY else row.image.bits()
        image_text = "NO_SYMMETRY" if row.image is NO_SYMMETRY else str(row.image)
        rows.append((row.label.bits(), str(row.label), image, image_text, row.fixed))
    out.write("closure.csv", _csv(("label", "label_text", "image", "image_text", "fixed"), rows))
    readings = {}
    for name, lab in counterexample_labels().items():
        if lab is NO_SYMMETRY:
            readings[name] = {"compatible": False, "closed": False, "present": False}
            continue
        compatible = is_divergence_compatible(lab)
        closed = compatible and update_label(lab) == lab
        readings[name] = {"compatible": compatible, "closed": closed, "present": lab in fixed}
    summary = {
        "schema_version": SCHEMA_VERSION,
        "kind": "symmetry-search",
        "include_degenerate": cfg.symmetry.include_degenerate,
        "candidates": len(table),
        "fixed": [lab.bits() for lab in fixed],
        "fixed_text": [str(lab) for lab in fixed],
        "x2_present": X2_LABEL in fixed,
        "counterexample": readings,
    }
    out.write("summary.json", _dump(summary))
    if not summary["x2_present"]:
        raise CheckFailed("X2 label missing from the closed labels")
    if any(r["present"] or r["closed"] for r in readings.values()):
        raise CheckFailed("three-antisymmetry counterexample label found closed")
    return summary


def _shell_indicator_values(cfg: ExperimentConfig) -> dict:
    grid = cfg.frequency_grid()
    params = cfg.convolution.herz.params().full_range()
    j = cfg.convolution.indicator_shell
    ind = ScalarField(grid, (shell_decomposition(grid).shell_index == j).astype(float))
    lhs, rhs, ratio = convolution_inequality_trial(ind, ind, params)
    d = decompose(ind, ind, params)
    return {"lhs": lhs, "rhs": rhs, "ratio": ratio, "W": d.W, "I1": d.I1, "I2": d.I2, "I3": d.I3}


def run_convolution_test(cfg: ExperimentConfig, out: Outputs) -> dict:
    grid = cfg.frequency_grid()
    ccfg = cfg.convolution_config()
    if cfg.convolution.mode == "shell_indicator":
        values = _shell_indicator_values(cfg)
        p = ccfg.herz
        scale = values["rhs"] if math.isinf(p.q) else values["rhs"] ** p.q
        I1, I2, I3, W = (values[k] / scale for k in ("I1", "I2", "I3", "W"))
        ok = W <= split_constant(p.p, p.q) * (I1 + I2 + I3) * (1 + 1e-12)
        rec = TrialRecord(0, p.p, p.q, p.alpha, values["lhs"], values["rhs"], values["ratio"], I1, I2, I3, W, ok)
        report = InequalityReport(ccfg, [rec])
        summary = report.summary()
        summary["mode"] = "shell_indicator"
        summary["values"] = values
        if cfg.convolution.oracle_path:
            try:
                oracle = json.loads(Path(cfg.convolution.oracle_path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read oracle: {exc}") from exc
            errors = {k: abs(values[k] - oracle["values"][k]) / max(abs(oracle["values"][k]), 1e-300)
                      for k in values}
            summary["oracle_max_rel_error"] = max(errors.values())
        out.write("report.csv", report.to_csv())
        out.write("summary.json", _dump(summary))
        if summary.get("oracle_max_rel_error", 0.0) > 1e-10:
            raise CheckFailed(f"shell-indicator values differ from oracle by {summary['oracle_max_rel_error']:.3e}")
        return summary
    report = run_convolution_study(grid, ccfg)
    out.write("report.csv", report.to_csv())
    summary = report.summary()
    summary["mode"] = "random"
    out.write("summary.json", _dump(summary))
    return summary


def run_analyticity_check(cfg: ExperimentConfig, out: Outputs) -> dict:
    grid = cfg.frequency_grid()
    scfg = cfg.solver_config(grid)
    a = cfg.analyticity
    u0 = _initial_data(cfg, grid, a.family, a.eps, {})
    hf = heat_flow(u0, scfg)
    dev_u, dev_e = heat_flow_sup_check(u0, hf)
    params = scfg.herz
    norm_ratio_err = 0.0
    base = vector_herz_norm(u0, params)
    if base > 0:
        norm_ratio_err = abs(herz_norm(hf.sup_exp, params) - math.exp(0.25) * herz_norm(hf.sup_abs, params)) / (
            math.exp(0.25) * herz_norm(hf.sup_abs, params))
    eb = exponential_bound_check(a.samples, cfg.seed)
    prev = [hf]
    majorants = []

    def cb(it, traj):
        majorants.append(majorant_check(prev[-1], traj).ratio)
        prev.append(traj)

    result = picard_solve(u0, scfg, callback=cb)
    traj = result.trajectory
    gevrey = max(gevrey_norm(traj, t, p=params.p) for t in traj.times)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "kind": "analyticity-check",
        "heat_flow_U_rel_dev": dev_u,
        "heat_flow_U_e_rel_dev": dev_e,
        "heat_flow_norm_rel_dev": norm_ratio_err,
        "exponential_bound_samples": eb.samples,
        "exponential_bound_violations": eb.violations,
        "exponential_bound_max_log_gap": eb.max_log_gap,
        "majorant_ratios": majorants,
        "majorant_constant": 6 * math.e**2,
        "U_e_herz_norm": herz_norm(traj.sup_exp, params),
        "sup_gevrey_norm": gevrey,
        "iterations": result.iterations,
    }
    out.write("summary.json", _dump(summary))
    failures = []
    if dev_u > 1e-12 or dev_e > 1e-12:
        failures.append("heat-flow suprema")
    if norm_ratio_err > 1e-10:
        failures.append("heat-flow Herz norm")
    if not eb.passed:
        failures.append("exponential estimate")
    if any(m > 6 * math.e**2 * (1 + 1e-8) for m in majorants):
        failures.append("majorant bound")
    if not (math.isfinite(summary["U_e_herz_norm"]) and math.isfinite(gevrey)):
        failures.append("finite analyticity norms")
    if failures:
        raise CheckFailed("failed: " + ", ".join(failures))
    return summary


RUNNERS = {
    "simulate": run_simulate,
    "symmetry-search": run_symmetry_search,
    "convolution-test": run_convolution_test,
    "analyticity-check": run_analyticity_check,
}


# -- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="herzlab", description="Fourier-Herz Navier-Stokes laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON experiment configuration")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--out", help="directory for CSV/JSON reports")
        p.add_argument("--N", type=int)
        p.add_argument("--h", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
        if name == "simulate":
            p.add_argument("--eps", type=float)
            p.add_argument("--family", choices=FAMILIES)
            p.add_argument("--reduction", choices=REDUCTION_MODES)
        if name == "convolution-test":
            p.add_argument("--trials", type=int)
            p.add_argument("--mode", choices=("random", "shell_indicator"))
            p.add_argument("--oracle")
        if name == "analyticity-check":
            p.add_argument("--samples", type=int)
    return parser


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(_dump({"schema_version": SCHEMA_VERSION, "error": kind, "message": message}))
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = load_config(args)
        if args.dump_config:
            sys.stdout.write(cfg.to_json() + "\n")
            return EXIT_OK
        out = Outputs(args.out)
        summary = RUNNERS[args.command](cfg, out)
    except ConfigError as exc:
        return _error("config", str(exc), EXIT_CONFIG)
    except NumericalDivergence as exc:
        return _error("numerical-divergence", str(exc), EXIT_DIVERGENCE)
    except CheckFailed as exc:
        return _error("check-failed", str(exc), EXIT_CHECK)
    sys.stdout.write(_dump(summary))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
