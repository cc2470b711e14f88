"""Sparse-signal recovery under a normal-product prior, with baselines and
a seeded Monte Carlo benchmark harness."""

from .baselines import (
    BaselineConfig,
    bp_recover,
    default_config,
    irls_recover,
    sbl_recover,
)
from .errors import DimensionError, NumericalError, ParseError
from .harness import (
    AxisSpec,
    ExperimentGrid,
    METHOD_NAMES,
    ProblemInstance,
    TrialRecord,
    generate_instance,
    mse_db,
    relative_error,
    run_convergence_trace,
    run_method,
    run_phase_sweep,
)
from .prior import FactorScales, NpParams, bessel_k0, np_pdf, sample_np
from .solvers import (
    CONVERGED,
    MAX_ITERATIONS,
    NUMERICAL_FAILURE,
    PosteriorState,
    RecoveryResult,
    SolverConfig,
    TraceRow,
    run_np0,
    run_np1,
    update_a_finite_noise,
    update_a_noiseless,
    update_b_finite_noise,
    update_b_noiseless,
    update_gamma_inv2,
    update_kappa_inv2,
)

__version__ = "0.1.0"
