"""Event-triggered linear and homogeneous extended state observers for stochastic integrator chains."""
from .errors import InfeasibleDesign, InvalidArgument, NumericOverflow
from .gains import (
    BelowRStarWarning,
    CompanionGains,
    LinearDesign,
    NonlinearDesign,
    build_companion,
    dwell_and_threshold,
    homogeneity_residual,
    homogeneity_weights,
    homogeneous_field,
    is_hurwitz,
    linear_r_star,
    lyapunov_residual,
    mu_interval,
    nu_interval,
    signed_power,
    solve_lyapunov,
)
from .noise import BoundedFamily, NoiseConfig, NoiseState, advance, bounded_eval, path_generator
from .plant import (
    DisturbanceKind,
    DisturbanceSpec,
    InputKind,
    PlantConfig,
    disturbance_eval,
    extended_state,
    plant_derivative,
    section_iv_noise,
    section_iv_plant,
)
from .observer import EtmState, eso_derivative, etm_poll
from .engine import (
    CompareReport,
    EnsembleStats,
    SimConfig,
    SweepResult,
    Trajectory,
    compare_observers,
    run_ensemble,
    scaled_errors,
    simulate_path,
    simulate_path_reference,
    sweep_r,
)

__version__ = "0.1.0"
