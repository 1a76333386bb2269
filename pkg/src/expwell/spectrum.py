"""Bound states of ``H = -d^2/dx^2 + g^2 exp(2|x|)``.

With ``rho(x) = g exp(|x|)`` the even states are ``K_{i nu}(rho(x))`` and the
odd states ``sign(x) K_{i nu}(rho(x))``; the orders are the zeros collected
in a :class:`~expwell.zeros.ZeroTable`.  Eigenfunctions are returned in the
K-hat scaling (``exp(nu pi / 2)`` times the textbook function); multiply by
``exp(-nu pi / 2)`` for the raw value or by ``1 / sqrt(2 * norm_scaled)``
for unit norm on the whole line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._integrals import integrate, tail_cutoff
from .bessel import eval_I_plus_scaled, eval_K_scaled, k_scaled_array
from .config import DEFAULT_EVAL, DEFAULT_QUAD, EvalConfig, QuadratureSpec
from .errors import DomainError
from .zeros import ZeroTable, find_zeros

_HALF_PI = 0.5 * math.pi


def rho_map(x, g):
    """``g * exp(|x|)``; works element-wise on arrays."""
    if not g > 0:
        raise DomainError("g must be positive")
    ax = np.abs(np.asarray(x, dtype=float))
    if np.any(ax > 700.0):
        raise DomainError("|x| > 700 overflows rho(x)")
    out = g * np.exp(ax)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MatchingCoefficients:
    """Coefficients of the growing (I+) and decaying (K) pieces at the origin.

    Even: ``A I+ + B K`` with ``A = -K'(g)``, ``B = I+'(g)``.
    Odd:  ``C I+ + D K`` with ``C = -K(g)``,  ``D = I+(g)``.
    K is scaled by ``exp(nu pi/2)`` and I+ by ``exp(-nu pi/2)``, so all four
    are of order one.
    """

    A: float
    B: float
    C: float
    D: float

    @property
    def even_defect(self) -> float:
        return abs(self.A) / (abs(self.A) + abs(self.B))

    @property
    def odd_defect(self) -> float:
        return abs(self.C) / (abs(self.C) + abs(self.D))


def matching_coefficients(nu, g, cfg: EvalConfig = DEFAULT_EVAL) -> MatchingCoefficients:
    k, kp = eval_K_scaled(nu, g, cfg)
    ip, ipp = eval_I_plus_scaled(nu, g, cfg)
    return MatchingCoefficients(A=-kp, B=ipp, C=-k, D=ip)


@dataclass(frozen=True)
class SpectralLine:
    """One bound state: level ``n``, ``E_n = nu_n**2``, norm ``h_n``.

    ``norm`` is ``integral_0^inf K_{i nu}(g e^x)^2 dx`` in raw units;
    ``norm_scaled`` is the same integral of K-hat.
    """

    n: int
    parity: str
    nu: float
    energy: float
    norm: float
    norm_scaled: float

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise DomainError(f"parity must be even or odd, got {self.parity!r}")
        if self.parity != ("even" if self.n % 2 == 0 else "odd"):
            raise DomainError(f"level {self.n} cannot have parity {self.parity}")
        if not self.norm_scaled > 0:
            raise DomainError("norm must be positive")

    @property
    def sign_power(self) -> int:
        return self.n % 2


def norm_integral(nu, g, quad: QuadratureSpec = DEFAULT_QUAD, cfg: EvalConfig = DEFAULT_EVAL):
    """``(integral_g^inf K-hat(rho)^2 drho/rho, error estimate)``."""
    rho_max = tail_cutoff([nu, nu], g, quad.abs_tol)

    def f(rho):
        k, _ = k_scaled_array(nu, rho, cfg)
        return k * k / rho

    val, err = integrate(f, g, rho_max, quad)
    return float(val), float(err)


def norm_constant(line, g, quad: QuadratureSpec = DEFAULT_QUAD, cfg: EvalConfig = DEFAULT_EVAL):
    """``h_n = integral_0^inf K_{i nu_n}(g e^x)^2 dx`` (raw, unscaled units)."""
    val, _ = norm_integral(line.nu, g, quad, cfg)
    # rescale once, in log space
    return math.exp(math.log(val) - math.pi * line.nu)


def build_spectrum(
    table: ZeroTable,
    quad: QuadratureSpec = DEFAULT_QUAD,
    cfg: EvalConfig = DEFAULT_EVAL,
):
    """One :class:`SpectralLine` per zero of ``table``."""
    lines = []
    for n, e in enumerate(table.entries):
        scaled, _ = norm_integral(e.nu, table.g, quad, cfg)
        raw = math.exp(math.log(scaled) - math.pi * e.nu)
        lines.append(SpectralLine(n, e.kind.parity, e.nu, e.nu * e.nu, raw, scaled))
    return lines


def spectrum(g, count, quad=DEFAULT_QUAD, cfg=DEFAULT_EVAL):
    """Shortcut: :func:`find_zeros` followed by :func:`build_spectrum`."""
    return build_spectrum(find_zeros(g, count, cfg), quad, cfg)


def _phi(line, x, g, cfg):
    x = np.asarray(x, dtype=float)
    rho = rho_map(x, g)
    k, kp = k_scaled_array(line.nu, np.atleast_1d(rho), cfg)
    return x, np.atleast_1d(rho), k, kp


def eigenfunction(line: SpectralLine, x, g, cfg: EvalConfig = DEFAULT_EVAL):
    """``psi_n(x)`` in K-hat scaling (scalar in, scalar out)."""
    x_arr, rho, k, _ = _phi(line, x, g, cfg)
    s = np.sign(np.atleast_1d(x_arr)) if line.parity == "odd" else 1.0
    out = s * k
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def eigenfunction_derivatives(line: SpectralLine, x, g, cfg: EvalConfig = DEFAULT_EVAL):
    """``(psi, dpsi/dx, d2psi/dx2)`` for ``x != 0`` (one-sided limits at 0+).

    Chains ``d/dx = sign(x) rho d/drho`` through the Bessel equation.
    """
    x_arr, rho, k, kp = _phi(line, x, g, cfg)
    xa = np.atleast_1d(x_arr)
    s = np.where(xa < 0, -1.0, 1.0)
    kpp = -kp / rho + (1.0 - line.nu**2 / rho**2) * k
    d1 = s * rho * kp
    d2 = rho * kp + rho**2 * kpp
    if line.parity == "odd":
        psi, d1, d2 = s * k, s * d1, s * d2
    else:
        psi = k
    shape = np.shape(x)
    if np.ndim(x) == 0:
        return float(psi[0]), float(d1[0]), float(d2[0])
    return psi.reshape(shape), d1.reshape(shape), d2.reshape(shape)


def schrodinger_residual(line: SpectralLine, g, xs, cfg: EvalConfig = DEFAULT_EVAL):
    """Max over ``xs`` of ``|-psi'' + (V - E) psi|`` relative to the largest term."""
    psi, _, d2 = eigenfunction_derivatives(line, np.asarray(xs, dtype=float), g, cfg)
    v = g * g * np.exp(2.0 * np.abs(xs))
    terms = np.stack([np.abs(d2), np.abs(v * psi), np.abs(line.energy * psi)])
    res = np.abs(-d2 + (v - line.energy) * psi)
    return float(np.max(res / np.max(terms, axis=0)))


def far_point(line: SpectralLine, g):
    """``x`` with ``rho(x) = 2 nu + 20``; beyond it the state is negligible."""
    return math.log((2.0 * line.nu + 20.0) / g)


def count_nodes(line: SpectralLine, g, samples=4000, cfg: EvalConfig = DEFAULT_EVAL):
    """Sign changes of ``psi_n`` on ``(0, far_point]`` by dense sampling."""
    xs = np.linspace(1e-9, far_point(line, g), samples)
    psi = eigenfunction(line, xs, g, cfg)
    nz = psi[psi != 0.0]
    return int(np.count_nonzero(np.signbit(nz[1:]) != np.signbit(nz[:-1])))
