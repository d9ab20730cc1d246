"""qrclab: quantum reservoir computing on disordered spin networks.

Dense exact simulation of small spin networks driven by classical input
sequences, with tools for spectral phase diagnostics, echo-state
convergence studies, linear readout training, and information processing
capacity decompositions.
"""

__version__ = "0.1.0"

from .errors import (
    NumericError,
    QRCLabError,
    ShapeError,
    SizeError,
    ValidationError,
)
from .learn import (
    DesignMatrix,
    RegressionSolution,
    SplitSpec,
    TrainEvalResult,
    capacity,
    fit_readout,
    predict,
    train_eval,
)
from .linalg import (
    EigenSystem,
    check_density_matrix,
    frobenius_distance,
    hermitian_eig,
    kron,
    partial_trace_first,
    propagator,
    random_density_matrix,
)
from .reservoir import (
    Reservoir,
    TrajectoryResult,
    convergence_run,
    encode_input,
    initial_state,
    run_trajectory,
)
from .spectral import (
    GAP_RATIO_GOE,
    GAP_RATIO_POISSON,
    GapRatioStats,
    PhaseCell,
    gap_ratio_stats,
    phase_scan,
)
from .spinmodel import (
    DisorderRealization,
    ModelParams,
    ObservableDescriptor,
    build_hamiltonian,
    build_sector_hamiltonian,
    default_observables,
    observable_operator,
    sample_realization,
)
from .tasks import (
    CapacityReport,
    PolynomialTarget,
    binary_inputs,
    delay_target,
    enumerate_ipc_targets,
    ipc_capacity,
    legendre_poly,
    narma_target,
    uniform_inputs,
)

__all__ = [
    "__version__",
    "QRCLabError", "ShapeError", "SizeError", "ValidationError", "NumericError",
    "EigenSystem", "kron", "partial_trace_first", "frobenius_distance",
    "hermitian_eig", "propagator", "random_density_matrix",
    "check_density_matrix",
    "ModelParams", "DisorderRealization", "sample_realization",
    "build_hamiltonian", "build_sector_hamiltonian", "ObservableDescriptor",
    "default_observables", "observable_operator",
    "GAP_RATIO_POISSON", "GAP_RATIO_GOE", "GapRatioStats", "gap_ratio_stats",
    "PhaseCell", "phase_scan",
    "Reservoir", "TrajectoryResult", "encode_input", "initial_state",
    "run_trajectory", "convergence_run",
    "DesignMatrix", "SplitSpec", "RegressionSolution", "TrainEvalResult",
    "fit_readout", "predict", "capacity", "train_eval",
    "uniform_inputs", "binary_inputs", "narma_target", "delay_target",
    "legendre_poly", "PolynomialTarget", "enumerate_ipc_targets",
    "ipc_capacity", "CapacityReport",
]
