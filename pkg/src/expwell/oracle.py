"""Finite-difference eigenvalue oracle for ``-d^2/dx^2 + V(x)``.

Shares no code with the Bessel pipeline.  The half-line ``[0, x_max]`` is
discretised with the three-point Laplacian; parity enters through the
boundary row at the origin (ghost-point reflection for even states,
Dirichlet for odd ones) and the box edge is Dirichlet.  Eigenvalues of the
resulting tridiagonal matrix are isolated by Sturm-sequence bisection and
Richardson-extrapolated over ``h`` and ``h/2``.
"""
from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np
from numba import njit

from .config import OracleConfig
from .errors import BoxTooSmallError, DomainError


@njit(cache=True)
def _sturm_count(diag, off2, lam):
    """Number of eigenvalues strictly below ``lam``.

    ``off2[i]`` is the product of the two off-diagonal entries coupling rows
    ``i`` and ``i + 1``; only that product enters the Sturm recurrence.
    """
    count = 0
    q = diag[0] - lam
    if q < 0.0:
        count += 1
    for i in range(1, diag.shape[0]):
        if q == 0.0:
            q = 1e-300
        q = diag[i] - lam - off2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True)
def _bisect_lowest(diag, off2, k, lo, hi):
    """The ``k`` smallest eigenvalues by bisection on the Sturm count."""
    out = np.empty(k)
    for j in range(k):
        a, b = lo, hi
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if _sturm_count(diag, off2, mid) > j:
                b = mid
            else:
                a = mid
        out[j] = 0.5 * (a + b)
        lo = a
    return out


def _matrix(potential, x_max, h, parity):
    n = int(round(x_max / h))
    h = x_max / n
    inv = 1.0 / (h * h)
    if parity == "even":
        x = h * np.arange(0, n)  # x_n = x_max is the Dirichlet wall
        diag = 2.0 * inv + potential(x)
        off2 = np.full(n - 1, inv * inv)
        # ghost point psi_{-1} = psi_1 doubles the coupling of row 0
        off2[0] = 2.0 * inv * inv
    else:
        x = h * np.arange(1, n)
        diag = 2.0 * inv + potential(x)
        off2 = np.full(n - 2, inv * inv)
    return x, np.ascontiguousarray(diag), np.ascontiguousarray(off2)


def fd_eigenvalues(potential, x_max, h, parity, n_levels):
    """Lowest ``n_levels`` eigenvalues of one parity sector on one grid."""
    _, diag, off2 = _matrix(potential, x_max, h, parity)
    # Gershgorin bounds: every off-diagonal entry is at most sqrt(2)/h^2
    lo = float(np.min(diag) - 4.0 / h**2)
    hi = float(np.max(diag) + 4.0 / h**2)
    return _bisect_lowest(diag, off2, n_levels, lo, hi)


def tunnelling_exponent(potential, energy, x_max, n=4000):
    """``integral sqrt(V - E) dx`` from the outer turning point to ``x_max``."""
    x = np.linspace(0.0, x_max, n)
    k2 = potential(x) - energy
    if k2[-1] <= 0:
        return 0.0
    allowed = np.nonzero(k2 <= 0)[0]
    start = allowed[-1] if allowed.size else 0
    return float(np.trapezoid(np.sqrt(np.maximum(k2[start:], 0.0)), x[start:]))


def default_x_max(g, nu_max):
    """``log(nu_max / g) + 6``: the wall then sits deep in the forbidden zone."""
    return math.log(max(nu_max, g) / g) + 6.0


def solve_fd(
    g: float,
    cfg: OracleConfig,
    potential: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    extrapolate: bool = True,
):
    """Bound-state energies of ``-d^2/dx^2 + V`` by finite differences.

    Parameters
    ----------
    g : float
        Coupling of ``V(x) = g^2 exp(2|x|)``; ignored when ``potential`` is
        supplied (any even potential on ``x >= 0`` may be injected).
    cfg : OracleConfig
    extrapolate : bool
        Combine the ``h`` and ``h/2`` runs as ``(4 E_{h/2} - E_h) / 3``.

    Returns
    -------
    list of (parity, energy), sorted by energy.

    Raises
    ------
    BoxTooSmallError
        The WKB amplitude of the highest returned level at the wall exceeds
        ``1e-10`` of its value inside the well.
    """
    if not (math.isfinite(g) and g > 0):
        raise DomainError("g must be positive")
    if potential is None:
        def potential(x, g=g):
            return g * g * np.exp(2.0 * np.abs(x))

    parities = ("even", "odd") if cfg.parity == "both" else (cfg.parity,)
    out = []
    for parity in parities:
        coarse = fd_eigenvalues(potential, cfg.x_max, cfg.h, parity, cfg.n_levels)
        if extrapolate:
            fine = fd_eigenvalues(potential, cfg.x_max, 0.5 * cfg.h, parity, cfg.n_levels)
            levels = (4.0 * fine - coarse) / 3.0
        else:
            levels = coarse
        decay = tunnelling_exponent(potential, float(levels[-1]), cfg.x_max)
        if decay < math.log(1e10):
            raise BoxTooSmallError(
                f"x_max={cfg.x_max} too small for E={levels[-1]:.6g} "
                f"(wall amplitude ~ exp(-{decay:.2f}))"
            )
        out += [(parity, float(e)) for e in levels]
    out.sort(key=lambda t: t[1])
    return out


def convergence_ratio(g, cfg: OracleConfig, potential=None):
    """``(E_h - E_{h/2}) / (E_{h/2} - E_{h/4})`` per level; about 4 at second order."""
    runs = []
    for div in (1, 2, 4):
        c = OracleConfig(cfg.x_max, cfg.h / div, cfg.parity, cfg.n_levels)
        runs.append([e for _, e in solve_fd(g, c, potential, extrapolate=False)])
    return [(a - b) / (b - c) for a, b, c in zip(*runs)]
