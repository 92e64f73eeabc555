"""satsuma: direct scattering, long-time asymptotics, and a spectral PDE
cross-check for a coupled third-order integrable wave model."""

__version__ = "0.1.0"

from .errors import (
    AccuracyLossError,
    ConfigError,
    ContaminationError,
    DecayError,
    IntegrationError,
    PoleError,
    QuadratureError,
    RouteMismatchError,
    SatsumaError,
    SimulationError,
    SpectralSingularityError,
)
from .specfun import (
    AccuracyBudget,
    gamma_complex,
    pcf_d,
    pcf_d_prime,
    pcf_identities_residual,
    weber_residual,
)
from .scattering import (
    InitialProfile,
    ReflectionTable,
    ScatteringMatrix,
    build_jump,
    chi_of,
    default_k_grid,
    det_delta,
    load_profile_csv,
    load_reflection_csv,
    nu_of,
    reflection,
    reflection_table,
    save_profile_csv,
    save_reflection_csv,
    scattering_invariant_defects,
    scattering_matrices,
    scattering_matrix,
)
from .asymptotics import (
    DEFAULT_MAX_ZETA,
    AsymptoticContext,
    LeadingOrder,
    beta_factors,
    eta_factors,
    phase,
    save_asymptotic_csv,
    scaled_reflection_row,
    signature_sample,
    stationary_points,
    u_leading,
)
from .model_rhp import (
    ModelParameters,
    PsiEntries,
    beta21_of,
    jump_residual_ray,
    ode_residual,
    psi22_weber_residual,
    psi_entries,
)
from .pde import (
    ComparisonResult,
    FieldState,
    SimGrid,
    compare_asymptotic,
    eval_band_limited,
    mass,
    nonlinear_term,
    save_comparison_csv,
    save_snapshot_csv,
    simulate,
    step,
)
from .cli import RunConfig, main as cli_main

__all__ = [
    "__version__",
    # errors
    "SatsumaError",
    "AccuracyLossError",
    "PoleError",
    "DecayError",
    "SpectralSingularityError",
    "IntegrationError",
    "QuadratureError",
    "RouteMismatchError",
    "SimulationError",
    "ContaminationError",
    "ConfigError",
    # special functions
    "AccuracyBudget",
    "gamma_complex",
    "pcf_d",
    "pcf_d_prime",
    "pcf_identities_residual",
    "weber_residual",
    # scattering
    "InitialProfile",
    "ScatteringMatrix",
    "ReflectionTable",
    "scattering_matrix",
    "scattering_matrices",
    "scattering_invariant_defects",
    "reflection",
    "reflection_table",
    "default_k_grid",
    "nu_of",
    "chi_of",
    "det_delta",
    "build_jump",
    "save_profile_csv",
    "load_profile_csv",
    "save_reflection_csv",
    "load_reflection_csv",
    # asymptotics
    "DEFAULT_MAX_ZETA",
    "stationary_points",
    "phase",
    "signature_sample",
    "AsymptoticContext",
    "LeadingOrder",
    "scaled_reflection_row",
    "eta_factors",
    "beta_factors",
    "u_leading",
    "save_asymptotic_csv",
    # closed-form model solution
    "ModelParameters",
    "PsiEntries",
    "beta21_of",
    "psi_entries",
    "ode_residual",
    "psi22_weber_residual",
    "jump_residual_ray",
    # periodic solver and comparison
    "SimGrid",
    "FieldState",
    "mass",
    "nonlinear_term",
    "step",
    "simulate",
    "eval_band_limited",
    "ComparisonResult",
    "compare_asymptotic",
    "save_snapshot_csv",
    "save_comparison_csv",
    # command line
    "RunConfig",
    "cli_main",
]
