"""Double-exponential (tanh-sinh) quadrature on a finite interval.

The integrand is called with a 1-d array of abscissae and may return an
array whose leading axis runs over those abscissae; any trailing axes are
integrated independently, which lets one call evaluate a whole Gram matrix
or a vector of Bessel arguments at once.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import ConvergenceError

_HALF_PI = 0.5 * math.pi
# |t| beyond this contributes weights below 1e-35 of the interval length
_T_MAX = 4.0


def _nodes(level: int):
    """Abscissae ``t`` added at ``level`` (level 0: all multiples of 1)."""
    h = 2.0**-level
    if level == 0:
        t = np.arange(-_T_MAX, _T_MAX + 0.5, 1.0)
    else:
        k = np.arange(1, int(2 * _T_MAX / h) + 1, 2)
        t = -_T_MAX + k * h
    return t, h


def _map(t, a, b):
    """Return abscissae and weights on [a, b]."""
    u = _HALF_PI * np.sinh(t)
    cu = np.cosh(u)
    half = 0.5 * (b - a)
    # 1 - tanh|u| = exp(-|u|)/cosh(u), formed without cancellation
    gap = half * np.exp(-np.abs(u)) / cu
    x = np.where(t < 0, a + gap, b - gap)
    w = half * _HALF_PI * np.cosh(t) / cu**2
    return x, w


def tanh_sinh(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-15,
    max_level: int = 12,
    min_level: int = 3,
    normwise: bool = False,
):
    """Integrate ``f`` over ``[a, b]``.

    Levels are refined by halving the step in the transformed variable and
    re-using every previous node.  Convergence is declared when two
    successive estimates differ by less than ``max(abs_tol, rel_tol*|I|)``
    for every trailing component.  With ``normwise=True`` the relative
    bound uses the largest component instead, which is the right test for
    matrices whose off-diagonal entries should vanish.

    Returns
    -------
    value : float or ndarray
    error : float or ndarray
        Difference between the last two level estimates.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("tanh_sinh needs a finite interval")
    if a == b:
        out = np.asarray(f(np.array([a])))[0] * 0.0
        return out, out
    total = None
    prev = None
    for level in range(max_level + 1):
        t, h = _nodes(level)
        x, w = _map(t, a, b)
        fx = np.asarray(f(x), dtype=float)
        part = np.tensordot(w, fx, axes=(0, 0))
        total = part * h if total is None else 0.5 * total + part * h
        estimate = total
        if prev is not None and level >= min_level:
            err = np.abs(estimate - prev)
            ref = np.max(np.abs(estimate)) if normwise else np.abs(estimate)
            if np.all(err <= np.maximum(abs_tol, rel_tol * ref)):
                return estimate, err
        prev = estimate
    raise ConvergenceError(
        f"tanh-sinh did not converge on [{a}, {b}] after {max_level} levels"
    )
