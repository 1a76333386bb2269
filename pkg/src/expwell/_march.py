"""Compiled inward march of the modified Bessel equation at imaginary order.

Two phases, both integrated with the Dormand-Prince 5(4) pair:

* monotone region ``x > x_sw``: the logarithmic derivative ``y = K'/K`` and
  ``S = log K`` (Riccati form, bounded and slowly varying);
* oscillatory region ``x < x_sw``: the linear equation in ``t = log x``,
  ``psi_tt = (exp(2t) - nu**2) psi``, on a mantissa pair that is rescaled
  by powers of two whenever it leaves ``[2**-32, 2**32)``.

Marching towards smaller ``x`` is stable for ``K``: the competing solution
of ``I`` type decays in that direction.
"""
import math

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0,
)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0,
)
C2, C3, C4, C5 = 0.2, 0.3, 0.8, 8.0 / 9.0

_LN2 = math.log(2.0)
_LO = 2.0**-32
_HI = 2.0**32
MAX_STEPS = 5_000_000


@njit(cache=True)
def _rhs(phase, nu2, s, u, v):
    if phase == 0:
        # Riccati: u = K'/K, v = log K, independent variable x
        return -u * u - u / s + 1.0 - nu2 / (s * s), u
    # linear: u = psi, v = dpsi/dt, independent variable t = log x
    return v, (math.exp(2.0 * s) - nu2) * u


@njit(cache=True)
def _step(phase, nu2, s, u, v, h):
    k1u, k1v = _rhs(phase, nu2, s, u, v)
    k2u, k2v = _rhs(phase, nu2, s + C2 * h, u + h * A21 * k1u, v + h * A21 * k1v)
    k3u, k3v = _rhs(phase, nu2, s + C3 * h,
                    u + h * (A31 * k1u + A32 * k2u), v + h * (A31 * k1v + A32 * k2v))
    k4u, k4v = _rhs(phase, nu2, s + C4 * h,
                    u + h * (A41 * k1u + A42 * k2u + A43 * k3u),
                    v + h * (A41 * k1v + A42 * k2v + A43 * k3v))
    k5u, k5v = _rhs(phase, nu2, s + C5 * h,
                    u + h * (A51 * k1u + A52 * k2u + A53 * k3u + A54 * k4u),
                    v + h * (A51 * k1v + A52 * k2v + A53 * k3v + A54 * k4v))
    k6u, k6v = _rhs(phase, nu2, s + h,
                    u + h * (A61 * k1u + A62 * k2u + A63 * k3u + A64 * k4u + A65 * k5u),
                    v + h * (A61 * k1v + A62 * k2v + A63 * k3v + A64 * k4v + A65 * k5v))
    du = h * (B1 * k1u + B3 * k3u + B4 * k4u + B5 * k5u + B6 * k6u)
    dv = h * (B1 * k1v + B3 * k3v + B4 * k4v + B5 * k5v + B6 * k6v)
    k7u, k7v = _rhs(phase, nu2, s + h, u + du, v + dv)
    eu = h * (E1 * k1u + E3 * k3u + E4 * k4u + E5 * k5u + E6 * k6u + E7 * k7u)
    ev = h * (E1 * k1v + E3 * k3v + E4 * k4v + E5 * k5v + E6 * k6v + E7 * k7v)
    return du, dv, eu, ev


@njit(cache=True)
def _err_norm(phase, u, v, eu, ev, tol):
    if phase == 0:
        return max(abs(eu) / (tol * (1.0 + abs(u))), abs(ev) / tol)
    scale = max(abs(u), abs(v))
    return max(abs(eu), abs(ev)) / (tol * scale)


@njit(cache=True)
def _next_h(h, err):
    if err == 0.0:
        return h * 5.0
    fac = 0.9 * err ** -0.2
    return h * min(5.0, max(0.2, fac))


@njit(cache=True)
def _riccati_to(goal, nu2, x, y, s_acc, s_comp, h, tol, steps):
    while x > goal:
        if x + h < goal:
            h = goal - x
        dy, ds, ey, es = _step(0, nu2, x, y, 0.0, h)
        err = _err_norm(0, y, 0.0, ey, es, tol)
        if err <= 1.0:
            x = goal if x + h <= goal else x + h
            y += dy
            # compensated accumulation of log K increments
            tt = ds - s_comp
            tmp = s_acc + tt
            s_comp = (tmp - s_acc) - tt
            s_acc = tmp
            steps += 1
            if steps > MAX_STEPS:
                raise RuntimeError("ODE march exceeded step budget")
        h = _next_h(h, err)
        if h > -1e-14 * x:
            h = -1e-14 * x
    return x, y, s_acc, s_comp, h, steps


@njit(cache=True)
def _linear_to(tgoal, nu2, t, p, q, e2, h, tol, steps):
    while t > tgoal:
        if t + h < tgoal:
            h = tgoal - t
        dp, dq, ep, eq = _step(1, nu2, t, p, q, h)
        err = _err_norm(1, p, q, ep, eq, tol)
        if err <= 1.0:
            t = tgoal if t + h <= tgoal else t + h
            p += dp
            q += dq
            big = max(abs(p), abs(q))
            if big >= _HI or big < _LO:
                ee = math.frexp(big)[1]
                p = math.ldexp(p, -ee)
                q = math.ldexp(q, -ee)
                e2 += ee
            steps += 1
            if steps > MAX_STEPS:
                raise RuntimeError("ODE march exceeded step budget")
        h = _next_h(h, err)
        if h > -1e-15:
            h = -1e-15
    return t, p, q, e2, h, steps


@njit(cache=True)
def march(nu, targets, x_start, y_start, s_start, x_sw, tol):
    """March from ``x_start`` to every point of ``targets`` (sorted descending).

    ``y_start`` and ``s_start`` are ``K'/K`` and ``log K`` at ``x_start``;
    below ``x_sw`` the linear phase takes over.  Returns mantissas ``f``,
    ``fp`` of ``K`` and ``dK/dx``, integer exponents ``e2`` (true value
    ``f * 2**e2``) and the number of accepted steps.
    """
    n = targets.shape[0]
    out_f = np.empty(n)
    out_fp = np.empty(n)
    out_e = np.empty(n, dtype=np.int64)
    nu2 = nu * nu
    steps = 0

    x = x_start
    y = y_start
    s_acc = 0.0
    s_comp = 0.0
    h = -min(0.5, 0.05 * x_start)
    i = 0
    while i < n and targets[i] >= x_sw:
        x, y, s_acc, s_comp, h, steps = _riccati_to(
            targets[i], nu2, x, y, s_acc, s_comp, h, tol, steps)
        logk = s_start + s_acc
        e2 = math.floor(logk / _LN2)
        m = math.exp(logk - e2 * _LN2)
        out_f[i] = m
        out_fp[i] = y * m
        out_e[i] = e2
        i += 1
    if i == n:
        return out_f, out_fp, out_e, steps

    x, y, s_acc, s_comp, h, steps = _riccati_to(
        x_sw, nu2, x, y, s_acc, s_comp, h, tol, steps)
    logk = s_start + s_acc
    e2 = math.floor(logk / _LN2)
    p = math.exp(logk - e2 * _LN2)
    q = x * y * p
    t = math.log(x)
    h = -0.01
    while i < n:
        t, p, q, e2, h, steps = _linear_to(
            math.log(targets[i]), nu2, t, p, q, e2, h, tol, steps)
        out_f[i] = p
        out_fp[i] = q / targets[i]
        out_e[i] = e2
        i += 1
    return out_f, out_fp, out_e, steps
