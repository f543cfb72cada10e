"""Exact and numerical checks for stability thresholds of Delta^2 u = u^p."""

from .exact import ExactRational, IntPolynomial, RootBracket, isolate_root, poly_eval, sturm_count
from .exponents import (
    E_value,
    discrepancy_report,
    exponent_report,
    feasibility_scan,
    h_value,
    p_of_gamma,
    p_star,
    theta_of,
)
from .identities import identity_catalog, verify_identity, verify_pointwise_bounds
from .radial import QuadratureSpec, integrate_radial, radial_calculus
from .stability import (
    hardy_rellich_constant,
    jl_threshold,
    rayleigh_quotient,
    rayleigh_scan,
    singular_solution,
    singular_stability,
)

__version__ = "0.1.0"
