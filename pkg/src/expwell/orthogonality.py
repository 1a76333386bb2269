"""Orthogonality of imaginary-order K functions over ``[g, inf)``.

* Same-parity eigenfunctions are orthogonal in ``drho / rho``.
* In the level-``L`` associated system the relation holds with the
  Wronskian ratios and weight ``rho^(2L-1)``.

Both are checked by quadrature; the first one also by the closed-form
antiderivative

``integral K_a K_b drho/rho = rho (K_a' K_b - K_a K_b') / (nu_b^2 - nu_a^2)``

(orders ``i nu_a``, ``i nu_b``), which follows from Watson's indefinite
integral for cylinder functions after the order-shifted functions
``K_{i nu + 1}`` are eliminated with the recurrences
``K_{a+1} = -K_a' + (a / rho) K_a``.
"""
from __future__ import annotations

import math

import numpy as np

from ._integrals import integrate, tail_cutoff
from .bessel import eval_K_scaled, k_scaled_array
from .config import DEFAULT_EVAL, DEFAULT_QUAD, EvalConfig, QuadratureSpec
from .crum import CrumTower, crum_integrand_gram
from .errors import DomainError

_HALF_PI = 0.5 * math.pi


def cross_integral_scaled(nu1, nu2, g, quad: QuadratureSpec = DEFAULT_QUAD,
                          cfg: EvalConfig = DEFAULT_EVAL):
    """``integral_g^inf K-hat_1 K-hat_2 drho / rho`` by quadrature."""
    if not (nu1 > 0 and nu2 > 0 and g > 0):
        raise DomainError("orders and g must be positive")
    rho_max = tail_cutoff([nu1, nu2], g, quad.abs_tol)

    def f(rho):
        k1, _ = k_scaled_array(nu1, rho, cfg)
        k2 = k1 if nu2 == nu1 else k_scaled_array(nu2, rho, cfg)[0]
        return k1 * k2 / rho

    val, _ = integrate(f, g, rho_max, quad)
    return float(val)


def cross_integral_quadrature(nu1, nu2, g, quad: QuadratureSpec = DEFAULT_QUAD,
                              cfg: EvalConfig = DEFAULT_EVAL):
    """``integral_g^inf K_{i nu1}(rho) K_{i nu2}(rho) drho / rho`` (raw units)."""
    val = cross_integral_scaled(nu1, nu2, g, quad, cfg)
    if val == 0.0:
        return 0.0
    return math.copysign(math.exp(math.log(abs(val)) - _HALF_PI * (nu1 + nu2)), val)


def cross_integral_closed_form_scaled(nu1, nu2, g, cfg: EvalConfig = DEFAULT_EVAL):
    """Closed form of :func:`cross_integral_scaled` (K-hat units)."""
    if not (nu1 > 0 and nu2 > 0 and g > 0):
        raise DomainError("orders and g must be positive")
    if abs(nu1 - nu2) < 1e-8:
        raise DomainError("orders coincide; the closed form is singular, use quadrature")
    k1, kp1 = eval_K_scaled(nu1, g, cfg)
    k2, kp2 = eval_K_scaled(nu2, g, cfg)
    # the upper limit contributes nothing: both factors decay like exp(-rho)
    return g * (kp1 * k2 - k1 * kp2) / ((nu1 - nu2) * (nu1 + nu2))


def cross_integral_closed_form(nu1, nu2, g, cfg: EvalConfig = DEFAULT_EVAL):
    """Raw-units closed form matching :func:`cross_integral_quadrature`."""
    val = cross_integral_closed_form_scaled(nu1, nu2, g, cfg)
    if val == 0.0:
        return 0.0
    return math.copysign(math.exp(math.log(abs(val)) - _HALF_PI * (nu1 + nu2)), val)


def gram_matrix(nus, g, quad: QuadratureSpec = DEFAULT_QUAD, cfg: EvalConfig = DEFAULT_EVAL):
    """Gram matrix of K-hat functions in ``drho / rho`` (one quadrature run)."""
    nus = [float(v) for v in nus]
    rho_max = tail_cutoff([max(nus)] * 2, g, quad.abs_tol)

    def f(rho):
        ks = np.stack([k_scaled_array(nu, rho, cfg)[0] for nu in nus], axis=1)
        return ks[:, :, None] * ks[:, None, :] / rho[:, None, None]

    val, _ = integrate(f, g, rho_max, quad, normwise=True)
    return np.asarray(val)


def normalized_off_diagonal(gram):
    """``|G_nm| / sqrt(G_nn G_mm)`` with zeros on the diagonal."""
    d = np.sqrt(np.diag(gram))
    out = np.abs(gram) / np.outer(d, d)
    np.fill_diagonal(out, 0.0)
    return out


def parity_blocks(table, count=None):
    """Split the first ``count`` orders of a zero table into (even, odd) lists."""
    nus = table.nus if count is None else table.nus[:count]
    return nus[0::2], nus[1::2]


def crum_orthogonality_check(tower: CrumTower, n, m, quad: QuadratureSpec = DEFAULT_QUAD):
    """Normalised off-diagonal integral of the level-``L`` eigenfunctions.

    ``|I_nm| / sqrt(I_nn I_mm)`` with
    ``I_nm = integral_g^inf W_n W_m / W^2 rho^(2L-1) drho``.
    """
    if n == m:
        raise DomainError("n and m must differ")
    if n < tower.L or m < tower.L:
        raise DomainError("both levels must survive the deletion (>= L)")
    if (n - m) % 2:
        raise DomainError("levels of opposite parity are orthogonal by symmetry")
    gram = crum_integrand_gram(tower, [n, m], quad)
    return float(abs(gram[0, 1]) / math.sqrt(gram[0, 0] * gram[1, 1]))
