"""Immutable configuration records.

Every numerical knob lives here so that the CLI ``--config`` file and the
estimator parameters can override the same fields by name.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .errors import DomainError


def _positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class PotentialParams:
    """Coupling ``g`` of the confining well ``V(x) = g**2 * exp(2|x|)``.

    ``g`` is also the matching point ``rho(0)`` of the Bessel variable.
    """

    g: float

    def __post_init__(self):
        _positive("g", float(self.g))

    def potential(self, x):
        return self.g**2 * math.exp(2.0 * abs(x))


@dataclass(frozen=True)
class EvalConfig:
    """Tolerances for the imaginary-order Bessel evaluators.

    Attributes
    ----------
    quad_tol : float
        Absolute tolerance of the integral representation (scaled units).
    ode_tol : float
        Per-step relative tolerance of the inward ODE march.
    x_start_factor : float
        The march starts at ``x_start_factor * max(x, nu)**2`` (floored at
        ``x + 10``).
    nu_quad_max : float
        Largest order for which the quadrature route is used.
    """

    quad_tol: float = 1e-14
    ode_tol: float = 1e-12
    x_start_factor: float = 1.0
    nu_quad_max: float = 15.0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            _positive(f.name, float(getattr(self, f.name)))


@dataclass(frozen=True)
class QuadratureSpec:
    """How the orthogonality and norm integrals are computed.

    ``rule`` is ``"tanh-sinh"`` (default) or ``"adaptive-gauss"``.  The tail
    of every semi-infinite integral is cut where the large-argument bound of
    the integrand drops below ``abs_tol / 10``.
    """

    rule: str = "tanh-sinh"
    rel_tol: float = 1e-12
    abs_tol: float = 1e-15
    rho_max_policy: str = "asymptotic-bound"

    def __post_init__(self):
        if self.rule not in ("tanh-sinh", "adaptive-gauss"):
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.rho_max_policy != "asymptotic-bound":
            raise DomainError(f"unknown tail policy {self.rho_max_policy!r}")
        _positive("rel_tol", float(self.rel_tol))
        _positive("abs_tol", float(self.abs_tol))


@dataclass(frozen=True)
class OracleConfig:
    """Finite-difference grid for the independent eigenvalue oracle.

    ``parity`` is ``"even"``, ``"odd"`` or ``"both"``; ``n_levels`` counts
    levels per parity.
    """

    x_max: float
    h: float = 1e-3
    parity: str = "both"
    n_levels: int = 5

    def __post_init__(self):
        _positive("x_max", float(self.x_max))
        _positive("h", float(self.h))
        if self.h > 1e-3:
            raise DomainError(f"grid step h must be <= 1e-3, got {self.h}")
        if self.parity not in ("even", "odd", "both"):
            raise DomainError(f"parity must be even, odd or both, got {self.parity!r}")
        if int(self.n_levels) < 1:
            raise DomainError("n_levels must be >= 1")


DEFAULT_EVAL = EvalConfig()
DEFAULT_QUAD = QuadratureSpec()
