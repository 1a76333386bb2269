"""Semi-infinite integrals over ``rho in [g, inf)`` of products of K-hat."""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad_vec

from .config import DEFAULT_QUAD, QuadratureSpec
from .quadrature import tanh_sinh


def tail_cutoff(nus, g, abs_tol, power=-1.0):
    """Upper limit beyond which the integrand is below ``abs_tol / 10``.

    Uses ``|K_{i nu}(rho)| <= K_0(rho) <= sqrt(pi / (2 rho)) exp(-rho)`` for
    every factor; ``power`` is the extra ``rho**power`` weight.
    """
    nus = list(nus)
    p = len(nus)
    shift = 0.5 * math.pi * sum(nus)

    def log_bound(rho):
        return shift + p * (0.5 * math.log(math.pi / (2 * rho)) - rho) + power * math.log(rho)

    target = math.log(abs_tol / 10.0)
    lo = max(g, max(nus, default=0.0)) + 5.0
    rho = lo
    while log_bound(rho) > target:
        rho *= 1.25
    return rho


def integrate(f, a, b, quad: QuadratureSpec = DEFAULT_QUAD, normwise=False):
    """Integrate a vectorised ``f`` (leading axis = abscissae) over ``[a, b]``.

    Returns ``(value, error_estimate)``.  ``normwise`` measures the relative
    tolerance against the largest component (Gram matrices).
    """
    if quad.rule == "tanh-sinh":
        return tanh_sinh(f, a, b, rel_tol=quad.rel_tol, abs_tol=quad.abs_tol,
                         max_level=12, normwise=normwise)

    def g(r):
        return np.asarray(f(np.array([r])))[0]

    # quad_vec already applies a norm-wise criterion (max norm)
    val, err = quad_vec(g, a, b, epsabs=quad.abs_tol, epsrel=quad.rel_tol, norm="max",
                        limit=2000)
    return val, err
