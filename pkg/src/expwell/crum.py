"""Associated Hamiltonians obtained by deleting the lowest ``L`` levels.

``V^[L] = V - 2 d^2/dx^2 log|W[psi_0..psi_{L-1}]|`` and
``psi_n^[L] = W[psi_0..psi_{L-1}, psi_n] / W[psi_0..psi_{L-1}]``.

Wronskians in ``x`` are reduced to Wronskians in ``rho = g exp(|x|)`` of the
K-hat functions,

``W_x[psi_{k_1}..psi_{k_m}](x) = sign(x)^p rho^(m(m-1)/2) W_rho[K_{k_1}..K_{k_m}](rho)``

with ``p`` the number of odd states plus ``m(m-1)/2``.  Every derivative
row comes from the Bessel-equation recurrence; nothing is differenced
numerically inside a determinant.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor

from ._integrals import integrate, tail_cutoff
from .bessel import eval_K_scaled, higher_x_derivatives, k_scaled_array
from .config import DEFAULT_EVAL, DEFAULT_QUAD, EvalConfig, QuadratureSpec
from .errors import DomainError, SingularWronskianError
from .spectrum import SpectralLine, rho_map
from .zeros import ZeroTable

MAX_LEVEL = 10
GROWTH_WARNING = 1e8


class ConditioningWarning(UserWarning):
    """LU pivot growth of a Wronskian matrix exceeded the warning threshold."""


# ----------------------------------------------------------------- Wronskians


class KFunction:
    """K-hat of one order with derivative access in ``rho``."""

    def __init__(self, nu, cfg: EvalConfig = DEFAULT_EVAL):
        self.nu = float(nu)
        self.cfg = cfg

    def derivatives(self, rho, k):
        """``[f, f', ..., f^(k)]`` at ``rho`` (scalar or array)."""
        if np.ndim(rho) == 0:
            base = eval_K_scaled(self.nu, float(rho), self.cfg)
        else:
            base = k_scaled_array(self.nu, rho, self.cfg)
        return higher_x_derivatives(self.nu, rho, k, base)

    def __repr__(self):
        return f"KFunction(nu={self.nu!r})"


@dataclass(frozen=True)
class WronskianResult:
    mantissa: float
    exp2: int
    pivot_growth: float

    @property
    def value(self) -> float:
        return math.ldexp(self.mantissa, self.exp2)

    @property
    def ill_conditioned(self) -> bool:
        return self.pivot_growth > GROWTH_WARNING


def wronskian_matrix(fs, rho):
    """``M[j, k] = d^j f_k / drho^j`` for scalar ``rho``."""
    n = len(fs)
    cols = [np.asarray(f.derivatives(rho, n - 1), dtype=float) for f in fs]
    return np.stack(cols, axis=1)


def wronskian_detail(fs, rho) -> WronskianResult:
    """Determinant by LU with partial pivoting on column-scaled entries.

    Each column is divided by a power of two near its largest entry and the
    exponents are summed, so the mantissa stays representable.
    """
    if not 1 <= len(fs) <= 12:
        raise DomainError("between 1 and 12 functions are supported")
    m = wronskian_matrix(fs, rho)
    exps = []
    for k in range(m.shape[1]):
        big = np.max(np.abs(m[:, k]))
        e = math.frexp(big)[1] if big > 0 else 0
        m[:, k] = np.ldexp(m[:, k], -e)
        exps.append(e)
    amax = np.max(np.abs(m))
    if amax == 0:
        return WronskianResult(0.0, 0, 1.0)
    with warnings.catch_warnings():
        # an exactly singular matrix is a legitimate input; its determinant is 0
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(m, check_finite=True)
    diag = np.diag(lu)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    det = (-1.0) ** swaps * float(np.prod(diag))
    growth = float(np.max(np.abs(np.triu(lu))) / amax)
    if growth > GROWTH_WARNING:
        warnings.warn(f"Wronskian pivot growth {growth:.2e}", ConditioningWarning)
    mant, e = math.frexp(det) if det != 0.0 else (0.0, 0)
    return WronskianResult(mant, e + sum(exps), growth)


def wronskian(fs, rho) -> float:
    """``W[f_1, ..., f_n](rho) = det(d^{j-1} f_k / drho^{j-1})``."""
    return wronskian_detail(fs, rho).value


def _derivative_stack(nus, rho, order, cfg):
    """Array ``D[k, j, i]``: j-th rho-derivative of K-hat_{nu_k} at rho[i]."""
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    out = np.empty((len(nus), order + 1, rho.size))
    for k, nu in enumerate(nus):
        base = k_scaled_array(nu, rho, cfg)
        out[k] = np.asarray(higher_x_derivatives(nu, rho, order, base))
    return out


def _slogdet_rows(D, funcs, rows):
    """Sign and log|det| of the matrix with the given derivative rows."""
    sub = D[np.ix_(funcs, rows)]  # (m funcs, m rows, points)
    mats = np.transpose(sub, (2, 1, 0))  # (points, rows, funcs)
    return np.linalg.slogdet(mats)


def _ratio(num, den):
    return num[0] * den[0] * np.exp(num[1] - den[1])


def wronskian_sign_exponent(levels):
    """Power of ``sign(x)`` relating the x- and rho-Wronskians of ``levels``."""
    m = len(levels)
    return sum(n % 2 for n in levels) + m * (m - 1) // 2


# --------------------------------------------------------------- the tower


@dataclass(frozen=True)
class CrumTower:
    """Level-``L`` associated Hamiltonian built on the lowest ``L`` states."""

    L: int
    g: float
    nus: tuple  # nu_0, nu_1, ... (at least the L seeds)
    cfg: EvalConfig = field(default=DEFAULT_EVAL)

    def __post_init__(self):
        if not 0 <= self.L <= MAX_LEVEL:
            raise DomainError(f"level L must be in [0, {MAX_LEVEL}]")
        if len(self.nus) < self.L:
            raise DomainError("need at least L orders to seed the tower")
        if any(b <= a for a, b in zip(self.nus, self.nus[1:])):
            raise DomainError("orders must be strictly increasing (lowest states first)")

    @classmethod
    def from_table(cls, table: ZeroTable, L: int, cfg: EvalConfig = DEFAULT_EVAL):
        return cls(int(L), table.g, tuple(table.nus), cfg)

    @classmethod
    def from_lines(cls, lines, g, L, cfg: EvalConfig = DEFAULT_EVAL):
        return cls(int(L), float(g), tuple(line.nu for line in lines), cfg)

    @property
    def seeds(self):
        return self.nus[: self.L]

    def order_of(self, n):
        if not 0 <= n < len(self.nus):
            raise DomainError(f"level {n} not available (have {len(self.nus)})")
        return self.nus[n]

    def lower(self, L):
        return CrumTower(L, self.g, self.nus, self.cfg)

    # -- rho-space pieces -------------------------------------------------

    def _check_nodeless(self, sign):
        if np.any(sign == 0) or np.any(sign != sign.flat[0]):
            raise SingularWronskianError(
                f"seed Wronskian of level {self.L} vanishes on the sampled range"
            )

    def ratio_rho(self, n, rho):
        """``W_rho[K_0..K_{L-1}, K_n] / W_rho[K_0..K_{L-1}]`` on an array."""
        if n < self.L:
            raise DomainError(f"level {n} is deleted in the level-{self.L} tower")
        L = self.L
        nus = list(self.seeds) + [self.order_of(n)]
        D = _derivative_stack(nus, rho, L, self.cfg)
        num = _slogdet_rows(D, list(range(L + 1)), list(range(L + 1)))
        if L == 0:
            return num[0] * np.exp(num[1])
        den = _slogdet_rows(D, list(range(L)), list(range(L)))
        self._check_nodeless(den[0])
        return _ratio(num, den)

    def log_derivatives_rho(self, rho):
        """``(W'/W, W''/W)`` of the seed rho-Wronskian on an array."""
        L = self.L
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        if L == 0:
            z = np.zeros_like(rho)
            return z, z
        D = _derivative_stack(list(self.seeds), rho, L + 1, self.cfg)
        funcs = list(range(L))
        base = list(range(L))
        w0 = _slogdet_rows(D, funcs, base)
        self._check_nodeless(w0[0])
        w1 = _slogdet_rows(D, funcs, base[:-1] + [L])
        r1 = _ratio(w1, w0)
        r2 = _ratio(_slogdet_rows(D, funcs, base[:-1] + [L + 1]), w0)
        if L >= 2:
            r2 = r2 + _ratio(_slogdet_rows(D, funcs, base[:-2] + [L - 1, L]), w0)
        return r1, r2

    # -- x-space quantities -------------------------------------------------

    def potential(self, x):
        """``V^[L](x)``; at ``x = 0`` the one-sided limit from ``x > 0``."""
        xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        rho = np.atleast_1d(rho_map(xa, self.g))
        r1, r2 = self.log_derivatives_rho(rho)
        # d^2/dx^2 log|W| = rho (log W)' + rho^2 (log W)''; log rho is linear in |x|
        d2log = rho * r1 + rho**2 * (r2 - r1 * r1)
        v = rho**2 - 2.0 * d2log
        return float(v[0]) if np.ndim(x) == 0 else v.reshape(np.shape(x))

    def eigenfunction(self, n, x):
        """``psi_n^[L](x)`` in K-hat scaling, ``n >= L``."""
        xa = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        rho = np.atleast_1d(rho_map(xa, self.g))
        ratio = self.ratio_rho(n, rho)
        levels = list(range(self.L)) + [n]
        p = wronskian_sign_exponent(levels) - wronskian_sign_exponent(levels[:-1])
        s = np.where(xa < 0, -1.0, 1.0) ** p
        out = s * rho**self.L * ratio
        return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))

    def energy(self, n):
        if n < self.L:
            raise DomainError(f"level {n} is deleted in the level-{self.L} tower")
        return self.order_of(n) ** 2


# ------------------------------------------------------ function-style aliases


def crum_potential(tower: CrumTower, x):
    return tower.potential(x)


def crum_eigenfunction(tower: CrumTower, n, x):
    return tower.eigenfunction(n, x)


def _stirling2(j):
    """Row ``j`` of Stirling numbers of the second kind, ``S(j, 0..j)``."""
    row = [1]
    for i in range(1, j + 1):
        new = [0] * (i + 1)
        for k in range(1, i + 1):
            new[k] = k * (row[k] if k < len(row) else 0) + row[k - 1]
        row = new
    return row


def x_wronskian(levels, nus, g, x, cfg: EvalConfig = DEFAULT_EVAL) -> float:
    """Wronskian of ``psi_levels`` built directly from x-derivatives.

    ``d^j/dx^j phi(rho(x)) = sign(x)^j sum_k S(j, k) rho^k phi^(k)(rho)``.
    """
    m = len(levels)
    rho = rho_map(x, g)
    s = -1.0 if x < 0 else 1.0
    mat = np.empty((m, m))
    for c, n in enumerate(levels):
        d = KFunction(nus[n], cfg).derivatives(rho, m - 1)
        par = s if n % 2 else 1.0
        for j in range(m):
            st = _stirling2(j)
            mat[j, c] = par * s**j * sum(st[k] * rho**k * d[k] for k in range(j + 1))
    return float(np.linalg.det(mat))


def reduced_wronskian(levels, nus, g, x, cfg: EvalConfig = DEFAULT_EVAL) -> float:
    """``sign(x)^p rho^(m(m-1)/2) W_rho[K...]`` for the same ``levels``."""
    m = len(levels)
    rho = rho_map(x, g)
    s = -1.0 if x < 0 else 1.0
    w = wronskian([KFunction(nus[n], cfg) for n in levels], rho)
    return s ** wronskian_sign_exponent(levels) * rho ** (m * (m - 1) // 2) * w


def reduction_identity_check(tower: CrumTower, n, x) -> float:
    """Relative gap between the direct and the reduced x-Wronskian."""
    if x == 0:
        raise DomainError("the reduction is checked away from the kink at x = 0")
    levels = list(range(tower.L)) + [n]
    direct = x_wronskian(levels, tower.nus, tower.g, x, tower.cfg)
    reduced = reduced_wronskian(levels, tower.nus, tower.g, x, tower.cfg)
    return abs(direct - reduced) / max(abs(direct), abs(reduced))


def isospectral_residual(tower: CrumTower, n, xs, h=1e-3) -> float:
    """Max relative residual of ``(-d^2/dx^2 + V^[L] - E_n) psi_n^[L]``.

    The second derivative is the 5-point central difference with step ``h``;
    each residual is divided by the largest of the three terms.
    """
    xs = np.asarray(xs, dtype=float)
    offs = np.array([-2, -1, 0, 1, 2]) * h
    pts = xs[:, None] + offs[None, :]
    if np.any(np.sign(pts) != np.sign(xs)[:, None]):
        raise DomainError("finite-difference stencil straddles x = 0")
    psi = tower.eigenfunction(n, pts)
    d2 = (-psi[:, 0] + 16 * psi[:, 1] - 30 * psi[:, 2] + 16 * psi[:, 3] - psi[:, 4]) / (12 * h * h)
    v = tower.potential(xs)
    e = tower.energy(n)
    p0 = psi[:, 2]
    res = np.abs(-d2 + (v - e) * p0)
    scale = np.max(np.stack([np.abs(d2), np.abs(v * p0), np.abs(e * p0)]), axis=0)
    return float(np.max(res / scale))


def seed_wronskian_signs(tower: CrumTower, xs):
    """Sign of the x-Wronskian of the seeds at each ``x`` (must be constant)."""
    out = []
    levels = list(range(tower.L))
    for x in np.asarray(xs, dtype=float):
        w = reduced_wronskian(levels, tower.nus, tower.g, x if x != 0 else 1e-12, tower.cfg)
        out.append(np.sign(w))
    return np.array(out)


def shape_invariance_residual(tower: CrumTower, xs):
    """Relative least-squares residual of ``V^[L](x) ~ a e^{2x} + c`` on ``xs``.

    Returns ``(residual, a, c)``; a shape-invariant tower would give ~0.
    """
    xs = np.asarray(xs, dtype=float)
    v = tower.potential(xs)
    basis = np.stack([np.exp(2.0 * np.abs(xs)), np.ones_like(xs)], axis=1)
    coef, *_ = np.linalg.lstsq(basis, v, rcond=None)
    res = v - basis @ coef
    return float(np.linalg.norm(res) / np.linalg.norm(v)), float(coef[0]), float(coef[1])


# ----------------------------------------------------------- integrals


def crum_integrand_gram(tower: CrumTower, levels, quad: QuadratureSpec = DEFAULT_QUAD):
    """Matrix of ``integral_g^inf R_n R_m rho^(2L-1) drho`` for ``levels``.

    ``R_n`` is :meth:`CrumTower.ratio_rho`; K-hat scaling throughout.
    """
    L = tower.L
    nus = [tower.order_of(n) for n in levels]
    rho_max = tail_cutoff([max(nus)] * 2, tower.g, quad.abs_tol, power=4 * L)

    def f(rho):
        rs = np.stack([tower.ratio_rho(n, rho) for n in levels], axis=1)
        w = rho ** (2 * L - 1)
        return rs[:, :, None] * rs[:, None, :] * w[:, None, None]

    val, _ = integrate(f, tower.g, rho_max, quad, normwise=True)
    return np.asarray(val)
