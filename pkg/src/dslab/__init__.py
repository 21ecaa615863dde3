"""Delta-shock laboratory for the damped zero-pressure gas dynamics system."""

from .bumps import Bump, SpaceTimeBump
from .errors import (
    ConfigError,
    DslabError,
    InvalidProblem,
    MultipleRootsInBracket,
    NoRootInBracket,
    NonConvergence,
    SimulationError,
    UnsupportedConfiguration,
)
from .fv import FvConfig, FvRun, FvState, measure_concentration, simulate
from .limits import (
    DeviationReport,
    EpsilonRecord,
    SigmaEstimate,
    SweepReport,
    delta_weight_estimate,
    extrapolate_sigma,
    map_to_time_domain,
    pointwise_deviation,
    run_sweep,
    similarity_map,
)
from .profile import (
    GridSpec,
    ProfileConfig,
    ViscousProfile,
    apply_T,
    density_from_velocity,
    density_log_form,
    profile_ode_residual,
    solve_profile,
    xi_sigma_root,
)
from .riemann import (
    DeltaShockParams,
    Region,
    RiemannProblem,
    ShockState,
    SolutionSample,
    closed_form_k1,
    delta_shock_polynomial,
    effective_time,
    evaluate_solution,
    jump,
    rh_residual,
    shock_state,
    solve_delta_shock,
)
from .weak import (
    MeasureSolution,
    exact_measure_solution,
    pair_with_measure,
    phi_l1,
    weak_residual,
)

__version__ = "0.1.0"
