"""Spectral laboratory for symmetric, uniformly analytic mild Navier-Stokes solutions
in Fourier-Herz spaces."""

from herzlab.spectral import (
    FrequencyGrid,
    GridMismatchError,
    ScalarField,
    SpectralField,
    convolve,
    convolve_direct,
    leray_project,
    load_field,
    save_field,
    solve_u3_from_divergence,
)
from herzlab.herz import (
    HerzParams,
    ShellDecomposition,
    dyadic_rescale,
    herz_norm,
    random_herz_field,
    shell_decomposition,
    vector_herz_norm,
)
from herzlab.symmetry import (
    NO_SYMMETRY,
    ParityLabel,
    VectorLabel,
    X2_LABEL,
    check_field_label,
    check_x1,
    closure_search,
    closure_table,
    label_convolve,
    label_multiply,
    nonlinearity_label_map,
)
from herzlab.solver import (
    NumericalDivergence,
    PicardResult,
    SmallnessViolated,
    SymmetryPreconditionError,
    SolverConfig,
    TrajectoryRecord,
    assemble_A,
    duhamel_step,
    heat_flow,
    heat_semigroup,
    picard_solve,
    reduced_iteration,
)
from herzlab.analyticity import (
    ConvolutionTestConfig,
    InequalityReport,
    convolution_inequality_trial,
    decomposition_diagnostic,
    exponential_bound_check,
    gevrey_norm,
    majorant_check,
    run_convolution_study,
    uniform_quantities,
)

__all__ = [
    "FrequencyGrid",
    "GridMismatchError",
    "ScalarField",
    "SpectralField",
    "convolve",
    "convolve_direct",
    "leray_project",
    "load_field",
    "save_field",
    "solve_u3_from_divergence",
    "HerzParams",
    "ShellDecomposition",
    "dyadic_rescale",
    "herz_norm",
    "random_herz_field",
    "shell_decomposition",
    "vector_herz_norm",
    "NO_SYMMETRY",
    "ParityLabel",
    "VectorLabel",
    "X2_LABEL",
    "check_field_label",
    "check_x1",
    "closure_search",
    "closure_table",
    "label_convolve",
    "label_multiply",
    "nonlinearity_label_map",
    "NumericalDivergence",
    "PicardResult",
    "SmallnessViolated",
    "SymmetryPreconditionError",
    "SolverConfig",
    "TrajectoryRecord",
    "assemble_A",
    "duhamel_step",
    "heat_flow",
    "heat_semigroup",
    "picard_solve",
    "reduced_iteration",
    "ConvolutionTestConfig",
    "InequalityReport",
    "convolution_inequality_trial",
    "decomposition_diagnostic",
    "exponential_bound_check",
    "gevrey_norm",
    "majorant_check",
    "run_convolution_study",
    "uniform_quantities",
]

__version__ = "0.1.0"
