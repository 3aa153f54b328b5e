"""Point-defect Klein-Gordon laboratory: solver, solitary manifold, attraction diagnostics."""
from .model import FieldState, Grid, PotentialSpec, energy, eval_force, eval_potential, validate_wellposedness
from .solitary import (
    LinearMode,
    ManifoldBranch,
    SolitaryWave,
    amplitudes_for_omega,
    kappa_of_omega,
    linear_modes,
    manifold_table,
    sample_profile,
)
from .evolution import (
    BlowUpError,
    ConfigError,
    Gaussian,
    Samples,
    SimConfig,
    Solitary,
    Sponge,
    Superposition,
    TraceRecord,
    discrete_rhs,
    run,
    sponge_profile,
    step,
)
from .diagnostics import (
    ManifoldDistance,
    SeminormSpec,
    dist_to_manifold,
    full_norm,
    local_seminorm,
    optimal_phase,
)

__version__ = "0.1.0"
