"""Numerical laboratory for smoothly-varying hysteretic oscillators.

The package groups four concerns: the differential hysteresis model and
its closed-form deviation metrics, time-domain response simulation for
single oscillators and shear chains, spectrum-compatible synthetic
ground motions, and constrained joint state/parameter identification.
"""
from .deviation import (
    AxisSpec,
    ContourGrid,
    CurveType,
    DeviationMetrics,
    GridSpec,
    ParamPerturbation,
    alternate_params,
    average_slope,
    delta_1_for_eps_1,
    delta_2_for_eps_2,
    epsilon_1,
    epsilon_2,
    eps_star_1_at_fixed_eps_1,
    eps_star_2_at_fixed_eps_2,
    equivalent_params,
    exact_deviation_1,
    exact_deviation_2,
    feasibility_violations,
    kappa,
    metrics,
    perturbation_from_absolute,
    rmax_residual,
    slope_area,
    stationary_point,
    sweep,
)
from .errors import ConfigError, DomainError, FeasibilityError, NumericalError, ParseError
from .estimation import (
    Campaign,
    ConstraintSet,
    EstimationRun,
    FilterConfig,
    forward_check,
    joint_estimate,
    monte_carlo,
    state_layout,
    theta_names,
)
from .groundmotion import (
    STANDARD_GRAVITY,
    GroundMotion,
    SpectrumParams,
    SynthesisConfig,
    evolutionary_psd,
    load_accelerogram,
    synthesize,
    synthesize_many,
    write_accelerogram,
)
from .hysteresis import (
    BRANCH_I,
    BRANCH_II,
    BoucWenParams,
    OscillatorParams,
    branch_of,
    hysteretic_energy,
    hysteretic_force,
    r_dot,
    r_max,
    r_prime_d,
)
from .simulate import (
    DAMAGE_STATES,
    ChainSystem,
    DamageConfig,
    NrmseSweep,
    ResponseHistory,
    benchmark_chain,
    cr_spectrum,
    damage_state,
    nrmse_percent,
    nrmse_sweep,
    park_ang_index,
    reference_sdof,
    simulate_chain,
    simulate_sdof,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
