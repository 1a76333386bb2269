r"""Modified Bessel functions of pure imaginary order ``i*nu``.

Two independent routes compute :math:`K_{i\nu}(x)` for real ``nu >= 0`` and
``x > 0``:

* :func:`eval_K_quadrature` integrates
  :math:`K_{i\nu}(x) = \int_0^\infty e^{-x\cosh t}\cos(\nu t)\,dt` along a
  horizontal contour shifted to ``Im t = beta``.  The shift pulls the factor
  :math:`e^{-\nu\beta}` out of the integral, so the integrand no longer
  cancels down to :math:`e^{-\pi\nu/2}`.
* :func:`eval_K_ode` seeds the large-``x`` asymptotic series and marches the
  Bessel equation inward (see :mod:`expwell._march`), carrying an exponent
  offset so nothing underflows.

Everything downstream works with the scaled function
:math:`\hat K = e^{\nu\pi/2} K_{i\nu}`, which stays of order one in the
oscillatory region ``x < nu``.
"""
from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import loggamma

from . import _march
from .config import DEFAULT_EVAL, EvalConfig
from .errors import AccuracyError, ConvergenceError, DomainError
from .quadrature import tanh_sinh
from .scaled import ScaledValue

_HALF_PI = 0.5 * math.pi
# integrand factor exp(-a (cosh s - 1)) is dropped below exp(-_TAIL)
_TAIL = 40.0
# order * (pi/2 - beta) never exceeds this: bounds the cancellation loss
_SHIFT_BUDGET = 3.0


def _check_order(nu):
    nu = float(nu)
    if not math.isfinite(nu):
        raise DomainError(f"order must be finite, got {nu!r}")
    if nu < 0:
        raise DomainError(
            f"order must be non-negative (K is even in the order), got {nu!r}"
        )
    return nu


def _check_arg(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("argument must be finite")
    if np.any(arr <= 0):
        raise DomainError("argument x must be positive")
    return arr


# ---------------------------------------------------------------- quadrature


def _contour_height(nu, x):
    """Height of the shifted contour; follows the saddle point when x > nu."""
    delta = _HALF_PI if nu == 0 else min(_HALF_PI, _SHIFT_BUDGET / nu)
    cap = _HALF_PI - delta
    saddle = np.arcsin(np.minimum(nu / x, 1.0))
    return np.minimum(saddle, cap)


def _quad_scaled(nu, xs, quad_tol):
    """Scaled pair (K-hat, dK-hat/dx) at every entry of ``xs`` (1-d)."""
    beta = _contour_height(nu, xs)
    cb, sb = np.cos(beta), np.sin(beta)
    a = xs * cb
    # log of the prefactor pulled out of the integral
    log_pref = nu * (_HALF_PI - beta) - a
    T = np.arccosh(1.0 + _TAIL / a)

    def integrand(u):
        s = u[:, None] * T[None, :]
        ch, sh = np.cosh(s), np.sinh(s)
        env = T * np.exp(-a * (ch - 1.0))
        phase = nu * s - xs * sb * sh
        c, si = np.cos(phase), np.sin(phase)
        val = env * c
        der = env * (-cb * ch * c + sb * sh * si)
        return np.stack([val, der], axis=1)

    est, _ = tanh_sinh(integrand, 0.0, 1.0, rel_tol=quad_tol, abs_tol=quad_tol,
                       max_level=14)
    scale = np.exp(log_pref)
    return est[0] * scale, est[1] * scale


def eval_K_quadrature(nu, x, cfg: EvalConfig = DEFAULT_EVAL) -> float:
    """:math:`K_{i\\nu}(x)` from its integral representation.

    Raises
    ------
    DomainError
        ``x <= 0`` or ``nu < 0``.
    AccuracyError
        ``nu > cfg.nu_quad_max``; use :func:`eval_K_ode` instead.
    """
    nu = _check_order(nu)
    x = float(_check_arg(x))
    if nu > cfg.nu_quad_max:
        raise AccuracyError(
            f"order {nu} exceeds nu_quad_max={cfg.nu_quad_max}; use eval_K_ode"
        )
    k, _ = _quad_scaled(nu, np.array([x]), cfg.quad_tol)
    return float(k[0]) * math.exp(-_HALF_PI * nu)


# ----------------------------------------------------------------------- ODE


def _asymptotic_seed(nu, x):
    """log K, K'/K and the smallest retained term of the large-x series."""
    nu2 = nu * nu
    term = 1.0
    total = 1.0
    dtotal = 0.0  # d/dx of the series
    smallest = 1.0
    n = 0
    while True:
        n += 1
        nxt = -term * ((n - 0.5) ** 2 + nu2) / (2.0 * x * n)
        if abs(nxt) >= abs(term):
            break
        term = nxt
        total += term
        dtotal += -n * term / x
        smallest = abs(term)
        if smallest < 1e-17 * abs(total):
            break
    logk = 0.5 * math.log(math.pi / (2.0 * x)) - x + math.log(total)
    ratio = -0.5 / x - 1.0 + dtotal / total
    return logk, ratio, smallest


def _start_point(nu, x_min, cfg):
    x_start = max(cfg.x_start_factor * max(x_min, nu) ** 2, x_min + 10.0)
    for _ in range(60):
        logk, ratio, smallest = _asymptotic_seed(nu, x_start)
        if smallest < cfg.ode_tol:
            return x_start, logk, ratio
        # the series at the prescribed start is too coarse: move outward
        x_start *= 1.5
    raise ConvergenceError(
        f"asymptotic seed for nu={nu} never reached ode_tol; raise x_start_factor"
    )


def _ode_many(nu, xs, cfg):
    """March once through all of ``xs``; returns (f, fp, e2) in input order."""
    xs = np.asarray(xs, dtype=float)
    order = np.argsort(-xs, kind="stable")
    targets = np.ascontiguousarray(xs[order])
    x_start, logk, ratio = _start_point(nu, float(targets[0]), cfg)
    x_sw = nu + 2.0
    try:
        f, fp, e2, _ = _march.march(nu, targets, x_start, ratio, logk, x_sw, cfg.ode_tol)
    except RuntimeError as exc:  # step budget
        raise ConvergenceError(str(exc)) from exc
    inv = np.empty_like(order)
    inv[order] = np.arange(order.size)
    return f[inv], fp[inv], e2[inv]


def eval_K_ode(nu, x, cfg: EvalConfig = DEFAULT_EVAL) -> ScaledValue:
    """:math:`K_{i\\nu}(x)` and its x-derivative in extended range.

    Accurate for any order; the cost grows with ``nu`` because the march
    starts near ``nu**2``.
    """
    nu = _check_order(nu)
    x = float(_check_arg(x))
    f, fp, e2 = _ode_many(nu, np.array([x]), cfg)
    return ScaledValue(float(f[0]), float(fp[0]), int(e2[0])).normalized()


# ------------------------------------------------------------ scaled access


@functools.lru_cache(maxsize=8192)
def _scaled_pair(nu, x, cfg):
    if nu <= cfg.nu_quad_max:
        k, kp = _quad_scaled(nu, np.array([x]), cfg.quad_tol)
        return float(k[0]), float(kp[0])
    return eval_K_ode(nu, x, cfg).shifted(_HALF_PI * nu)


def eval_K_scaled(nu, x, cfg: EvalConfig = DEFAULT_EVAL) -> tuple[float, float]:
    """``(K-hat, dK-hat/dx)`` with ``K-hat = exp(nu*pi/2) * K_{i nu}(x)``.

    Dispatches to quadrature for ``nu <= cfg.nu_quad_max`` and to the ODE
    march otherwise.
    """
    nu = _check_order(nu)
    x = float(_check_arg(x))
    return _scaled_pair(nu, x, cfg)


def k_scaled_array(nu, xs, cfg: EvalConfig = DEFAULT_EVAL):
    """Vectorised :func:`eval_K_scaled` over an array of arguments."""
    nu = _check_order(nu)
    xs = _check_arg(xs)
    shape = xs.shape
    flat = xs.ravel()
    if flat.size == 0:
        return np.empty(shape), np.empty(shape)
    if nu <= cfg.nu_quad_max:
        k, kp = _quad_scaled(nu, flat, cfg.quad_tol)
    else:
        f, fp, e2 = _ode_many(nu, flat, cfg)
        s = np.exp(e2 * math.log(2.0) + _HALF_PI * nu)
        k, kp = f * s, fp * s
    return k.reshape(shape), kp.reshape(shape)


# ------------------------------------------------------------ first kind


def _i_plus_scaled(nu, x, tol):
    """exp(-nu pi/2) times (I+, dI+/dx), from the power series."""
    if x > 700.0:
        raise DomainError(f"I+ overflows double range for x={x} > 700")
    alpha = 1j * nu
    # common factor (x/2)^{i nu} / Gamma(1 + i nu), scaled by exp(-nu pi/2)
    lead = np.exp(alpha * math.log(0.5 * x) - loggamma(1.0 + alpha) - _HALF_PI * nu)
    q = 0.25 * x * x
    term = 1.0 + 0.0j
    total = term
    dtotal = alpha * term
    k = 0
    while True:
        k += 1
        term = term * q / (k * (alpha + k))
        total += term
        dtotal += (alpha + 2 * k) * term
        if abs(term) <= tol * abs(total) and k > q ** 0.5:
            break
        if k > 100_000:
            raise ConvergenceError("I+ series did not terminate")
    return (lead * total).real, (lead * dtotal).real / x


def eval_I_plus(nu, x, cfg: EvalConfig = DEFAULT_EVAL) -> float:
    """Symmetric first-kind combination ``(I_{i nu} + I_{-i nu}) / 2``.

    Equal to ``Re I_{i nu}(x)``; grows like ``exp(x) / sqrt(2 pi x)``.
    """
    nu = _check_order(nu)
    x = float(_check_arg(x))
    val, _ = _i_plus_scaled(nu, x, cfg.quad_tol)
    return val * math.exp(_HALF_PI * nu)


def eval_I_plus_scaled(nu, x, cfg: EvalConfig = DEFAULT_EVAL) -> tuple[float, float]:
    """``exp(-nu pi/2)`` times ``(I+, dI+/dx)``; the partner of K-hat."""
    nu = _check_order(nu)
    x = float(_check_arg(x))
    return _i_plus_scaled(nu, x, cfg.quad_tol)


# ----------------------------------------------------- higher derivatives


def higher_x_derivatives(nu, x, k, base):
    """``[K, K', ..., K^(k)]`` at ``x`` from the Bessel equation.

    ``base`` is either a :class:`ScaledValue` or a ``(K, K')`` pair (floats
    or arrays broadcasting against ``x``).  Differentiating
    ``x^2 K'' + x K' + (nu^2 - x^2) K = 0`` ``m`` times gives

    ``x^2 K^(m+2) = -(2m+1) x K^(m+1) - (m^2 + nu^2 - x^2) K^(m)
    + 2 m x K^(m-1) + m (m-1) K^(m-2)``

    so the whole list shares the exponent of ``base``.
    """
    if k < 0 or k > 12:
        raise DomainError("derivative order k must be in [0, 12]")
    if isinstance(base, ScaledValue):
        f0, f1 = base.f, base.fp
    else:
        f0, f1 = base
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    nu2 = float(nu) ** 2
    out = [f0, f1]
    for m in range(0, k - 1):
        km2 = out[m - 2] if m >= 2 else 0.0
        km1 = out[m - 1] if m >= 1 else 0.0
        nxt = -(
            (2 * m + 1) * x * out[m + 1]
            + (m * m + nu2 - x * x) * out[m]
            - 2 * m * x * km1
            - m * (m - 1) * km2
        ) / (x * x)
        out.append(nxt)
    return out[: k + 1]
