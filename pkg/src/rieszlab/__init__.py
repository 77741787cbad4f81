"""Numerical workbench for generalized Riesz potentials over Orlicz classes."""

from .domains import (
    DivergenceProfile,
    JohnSpec,
    MushroomGeometry,
    MushroomSpec,
    PlacementError,
    ball_domain,
    box_domain,
    counterexample_field,
    cube_domain,
    divergence_profile,
    mushroom_build,
    ramp_amplitude,
)
from .fields import (
    DomainGeometry,
    Grid,
    GridField,
    ball_average,
    discretize,
    domain_average,
    field_to_csv,
    gradient_magnitude,
    llogl_norm,
    lp_norm,
)
from .kernels import (
    DeltaMap,
    PhiKernel,
    admissible_p_max,
    annuli_series,
    closed_form_annuli_bound,
    compatibility_sup,
    fit_annuli_constant,
    phi_delta2_estimate,
    quasi_increasing_constant,
)
from .orlicz import (
    OrliczFunction,
    delta2_estimate,
    dyadic_summability,
    luxemburg_norm,
    luxemburg_norm_values,
    n_function_check,
)
from .potentials import (
    SINGULAR_CAP,
    SINGULAR_EXCLUDE,
    PotentialOptions,
    annulus_bound_check,
    dyadic_radii,
    maximal_function,
    maximal_function_field,
    riesz_potential,
    riesz_potential_field,
    tail_bound_check,
)
from .sweeps import log_grid

__version__ = "0.1.0"

__all__ = [
    "DeltaMap",
    "DivergenceProfile",
    "DomainGeometry",
    "Grid",
    "GridField",
    "JohnSpec",
    "MushroomGeometry",
    "MushroomSpec",
    "OrliczFunction",
    "PhiKernel",
    "PlacementError",
    "PotentialOptions",
    "SINGULAR_CAP",
    "SINGULAR_EXCLUDE",
    "admissible_p_max",
    "annuli_series",
    "annulus_bound_check",
    "ball_average",
    "ball_domain",
    "box_domain",
    "closed_form_annuli_bound",
    "compatibility_sup",
    "counterexample_field",
    "cube_domain",
    "delta2_estimate",
    "discretize",
    "divergence_profile",
    "domain_average",
    "dyadic_radii",
    "dyadic_summability",
    "field_to_csv",
    "fit_annuli_constant",
    "gradient_magnitude",
    "llogl_norm",
    "log_grid",
    "lp_norm",
    "luxemburg_norm",
    "luxemburg_norm_values",
    "maximal_function",
    "maximal_function_field",
    "mushroom_build",
    "n_function_check",
    "phi_delta2_estimate",
    "quasi_increasing_constant",
    "ramp_amplitude",
    "riesz_potential",
    "riesz_potential_field",
    "tail_bound_check",
]
