"""Exact eigensystem of ``H = -d^2/dx^2 + g^2 exp(2|x|)``.

Imaginary-order modified Bessel functions, their zeros in the order, the
bound-state spectrum, orthogonality checks, the Crum tower of associated
Hamiltonians and an independent finite-difference oracle.
"""
from .bessel import (
    eval_I_plus,
    eval_I_plus_scaled,
    eval_K_ode,
    eval_K_quadrature,
    eval_K_scaled,
    higher_x_derivatives,
    k_scaled_array,
)
from .config import (
    DEFAULT_EVAL,
    DEFAULT_QUAD,
    EvalConfig,
    OracleConfig,
    PotentialParams,
    QuadratureSpec,
)
from .crum import (
    CrumTower,
    KFunction,
    crum_eigenfunction,
    crum_potential,
    isospectral_residual,
    reduction_identity_check,
    shape_invariance_residual,
    wronskian,
)
from .errors import (
    AccuracyError,
    BoxTooSmallError,
    BracketError,
    ConvergenceError,
    DomainError,
    ExpWellError,
    SingularWronskianError,
)
from .oracle import default_x_max, solve_fd
from .orthogonality import (
    cross_integral_closed_form,
    cross_integral_quadrature,
    crum_orthogonality_check,
    gram_matrix,
)
from .scaled import ScaledValue
from .spectrum import (
    MatchingCoefficients,
    SpectralLine,
    build_spectrum,
    eigenfunction,
    matching_coefficients,
    norm_constant,
    rho_map,
    spectrum,
)
from .zeros import ZeroEntry, ZeroKind, ZeroTable, find_zeros, wkb_predict

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
