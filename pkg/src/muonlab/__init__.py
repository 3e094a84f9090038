"""muonlab: matrix-orthogonalized optimizers on controlled quadratics.

A small numpy/scipy laboratory for studying orthogonalized (polar-factor)
gradient updates against GD and Adam on strongly convex quadratics with
prescribed Hessian spectra, plus the 1-D noisy sign dynamics and exact
line-search policies that explain their discrete-time behavior.
"""

__version__ = "0.1.0"

from .linalg import (
    LinalgError,
    NonConvergenceError,
    NonFiniteError,
    ShapeMismatchError,
    SvdResult,
    condition_number,
    haar_orthogonal,
    matrix_norms,
    normal_matrix,
    polar_factor,
    svd,
)
from .line_search import (
    DegenerateDirectionError,
    LineSearchRun,
    counterexample_instance,
    exact_step_size,
    greedy_step,
    one_step_decrease,
    run_linesearch_comparison,
)
from .optimizers import (
    OptimizerSpec,
    OptimizerState,
    Schedule,
    TrajectoryRecord,
    adam_step,
    gd_step,
    muon_step,
    polar_express,
    run_trajectory,
    speedrun_lr,
    speedrun_momentum,
    stationarity_bound_check,
)
from .problems import (
    SPECTRUM_KINDS,
    MissingDiagnosticsError,
    QuadraticProblem,
    SpectrumSpec,
    UnknownKindError,
    build_problem,
    generate_spectrum,
    gradient,
    gradient_condition_trace,
    isotropic_problem,
    loss,
)
from .rng import RandomStream, derive_seed
from .sign_dynamics import (
    HittingTimeSummary,
    SignDynConfig,
    f1_config,
    half_width_from_loss,
    hitting_time,
    momentum_variant_1d,
    monte_carlo_summary,
    sigma_sweep,
    step_1d,
)
