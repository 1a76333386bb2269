"""Zeros of K_{i nu}(g) and dK_{i nu}/dx(g) as functions of the order ``nu``.

For fixed ``g > 0`` both functions have infinitely many simple zeros above
``g``.  Derivative zeros (``lambda_j``) and function zeros (``mu_j``)
interlace, ``g < lambda_0 < mu_0 < lambda_1 < mu_1 < ...``, and the combined
sequence ``nu_0, nu_1, ...`` is the square root of the bound-state spectrum
of ``-d^2/dx^2 + g^2 exp(2|x|)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .bessel import eval_K_scaled
from .config import DEFAULT_EVAL, EvalConfig
from .errors import AccuracyError, BracketError, DomainError

DEFAULT_ZERO_TOL = 1e-10
DEFAULT_NU_TOL = 1e-11


class ZeroKind(str, enum.Enum):
    DERIVATIVE = "even"  # lambda_j: K'(g) = 0, even eigenfunction
    FUNCTION = "odd"  # mu_j: K(g) = 0, odd eigenfunction

    @property
    def parity(self) -> str:
        return self.value


@dataclass(frozen=True)
class ZeroEntry:
    kind: ZeroKind
    j: int
    nu: float
    residual: float

    @property
    def energy(self) -> float:
        return self.nu * self.nu


@dataclass(frozen=True)
class ZeroTable:
    """Interlaced imaginary-order zeros for one coupling ``g``.

    ``entries[n]`` is the combined zero ``nu_n``: even ``n`` is
    ``lambda_{n/2}``, odd ``n`` is ``mu_{(n-1)/2}``.
    """

    g: float
    entries: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, n):
        return self.entries[n]

    @property
    def nus(self):
        return [e.nu for e in self.entries]

    @property
    def energies(self):
        return [e.energy for e in self.entries]

    @property
    def lambdas(self):
        return [e.nu for e in self.entries if e.kind is ZeroKind.DERIVATIVE]

    @property
    def mus(self):
        return [e.nu for e in self.entries if e.kind is ZeroKind.FUNCTION]

    def check_interlacing(self):
        """Raise :class:`BracketError` unless ``g < nu_0 < nu_1 < ...`` alternates."""
        prev = self.g
        for n, e in enumerate(self.entries):
            want = ZeroKind.DERIVATIVE if n % 2 == 0 else ZeroKind.FUNCTION
            if e.kind is not want or e.j != n // 2:
                raise BracketError(f"entry {n} is {e.kind.name}[{e.j}], expected {want.name}[{n // 2}]")
            if not e.nu > prev:
                raise BracketError(f"nu_{n}={e.nu} does not exceed the previous {prev}")
            prev = e.nu

    def to_records(self):
        return [
            {"n": n, "kind": e.kind.value, "j": e.j, "nu": e.nu,
             "energy": e.energy, "residual": e.residual}
            for n, e in enumerate(self.entries)
        ]

    @classmethod
    def from_records(cls, g, records):
        entries = tuple(
            ZeroEntry(ZeroKind(r["kind"]), int(r["j"]), float(r["nu"]), float(r["residual"]))
            for r in sorted(records, key=lambda r: int(r["n"]))
        )
        return cls(float(g), entries)


def index_to_kind(n: int):
    """Combined index ``n`` -> (kind, j)."""
    if n < 0:
        raise DomainError("level index must be non-negative")
    return (ZeroKind.DERIVATIVE, n // 2) if n % 2 == 0 else (ZeroKind.FUNCTION, (n - 1) // 2)


# ------------------------------------------------------------------ WKB


def _wkb_lhs(nu, x):
    return nu * math.acosh(nu / x) - math.sqrt((nu - x) * (nu + x))


def wkb_predict(n, x, mode: str = "combined") -> float:
    """Order predicted by the Bohr-Sommerfeld rule.

    Solves ``nu*arccosh(nu/x) - sqrt(nu^2 - x^2) = (m + 1/2) pi / 2`` where
    ``m = n`` for the combined sequence, ``m = 2n`` for derivative zeros
    ``lambda_n`` and ``m = 2n + 1`` for function zeros ``mu_n``.
    """
    if not x > 0:
        raise DomainError("x must be positive")
    if mode == "combined":
        m = n
    elif mode == "derivative_only":
        m = 2 * n
    elif mode == "function_only":
        m = 2 * n + 1
    else:
        raise DomainError(f"unknown WKB mode {mode!r}")
    rhs = (m + 0.5) * math.pi / 2.0
    if rhs <= 0:
        raise DomainError("WKB index must satisfy n > -1/2")
    # w*cosh(w) - sinh(w) >= w^3/3, so this guess lies right of the root
    w = (3.0 * rhs / x) ** (1.0 / 3.0)
    nu = x * math.cosh(w)
    # the left side is increasing and convex, so Newton from the right
    # decreases monotonically onto the root
    for _ in range(200):
        f = _wkb_lhs(nu, x) - rhs
        step = f / math.acosh(nu / x)
        nu_new = nu - step
        if nu_new <= x:
            nu_new = 0.5 * (nu + x)
        if abs(nu_new - nu) <= 1e-15 * nu:
            nu = nu_new
            break
        nu = nu_new
    return nu


def wkb_residual(nu, x, n, mode="combined"):
    m = {"combined": n, "derivative_only": 2 * n, "function_only": 2 * n + 1}[mode]
    return _wkb_lhs(nu, x) - (m + 0.5) * math.pi / 2.0


# ------------------------------------------------------------ zero finding


def _scan_step(nu, g):
    return min(0.25, math.pi / (4.0 * math.acosh(max(nu, g + 1.0) / g)))


def _refine(func, a, fa, b, fb, nu_tol):
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    return brentq(func, a, b, xtol=nu_tol, rtol=4 * 2.0**-52, maxiter=200)


def _scan(g, lo, hi, cfg, step_scale, nu_tol):
    """Brackets in [lo, hi] for both functions; returns (lams, mus) roots."""
    def kval(nu):
        return eval_K_scaled(nu, g, cfg)[0]

    def kder(nu):
        return eval_K_scaled(nu, g, cfg)[1]

    lams, mus = [], []
    a = lo
    ka, kpa = eval_K_scaled(a, g, cfg)
    while a < hi:
        b = min(hi, a + step_scale * _scan_step(a, g))
        kb, kpb = eval_K_scaled(b, g, cfg)
        if (kpa < 0) != (kpb < 0) or kpb == 0.0:
            lams.append(_refine(kder, a, kpa, b, kpb, nu_tol))
        if (ka < 0) != (kb < 0) or kb == 0.0:
            mus.append(_refine(kval, a, ka, b, kb, nu_tol))
        a, ka, kpa = b, kb, kpb
    return lams, mus


def _merge(g, lams, mus):
    roots = [(nu, ZeroKind.DERIVATIVE) for nu in lams] + [(nu, ZeroKind.FUNCTION) for nu in mus]
    roots.sort()
    return roots


def _interlaced_prefix(roots):
    """Length of the leading part of ``roots`` that alternates correctly."""
    for n, (_, kind) in enumerate(roots):
        want = ZeroKind.DERIVATIVE if n % 2 == 0 else ZeroKind.FUNCTION
        if kind is not want:
            return n
    return len(roots)


def find_zeros(
    g,
    count,
    cfg: EvalConfig = DEFAULT_EVAL,
    zero_tol: float = DEFAULT_ZERO_TOL,
    nu_tol: float = DEFAULT_NU_TOL,
) -> ZeroTable:
    """First ``count`` members of the interlaced sequence for coupling ``g``.

    The order axis is scanned from ``g + 1e-6`` with steps of half the local
    WKB spacing; every sign change of K-hat or dK-hat/dx at ``x = g`` is a
    bracket refined by Brent's method.  An interlacing violation triggers a
    rescan of the offending region with an 8x finer step.

    Raises
    ------
    DomainError
        ``g <= 0`` or ``count < 1``.
    BracketError
        Interlacing still fails after the fine rescan.
    AccuracyError
        A refined root misses ``zero_tol`` in residual.
    """
    g = float(g)
    if not (math.isfinite(g) and g > 0):
        raise DomainError("g must be positive")
    count = int(count)
    if count < 1:
        raise DomainError("count must be >= 1")

    lo = g + 1e-6
    # scan to a little beyond the WKB estimate of the last wanted zero
    hi = wkb_predict(count, g) + 1.0
    lams, mus = [], []
    a = lo
    while True:
        more_l, more_m = _scan(g, a, hi, cfg, 1.0, nu_tol)
        lams += more_l
        mus += more_m
        roots = _merge(g, lams, mus)
        good = _interlaced_prefix(roots)
        if good < min(count, len(roots)):
            # a root was skipped between roots[good-1] and roots[good]
            left = roots[good - 1][0] if good > 0 else lo
            fine_l, fine_m = _scan(g, left + nu_tol, hi, cfg, 0.125, nu_tol)
            lams = [r for r in lams if r <= left] + fine_l
            mus = [r for r in mus if r <= left] + fine_m
            roots = _merge(g, lams, mus)
            good = _interlaced_prefix(roots)
            if good < min(count, len(roots)):
                raise BracketError(
                    f"interlacing violated near nu={roots[good][0]:.6g} even after 8x rescan"
                )
        if len(roots) >= count:
            break
        a, hi = hi, hi + 2.0 + 0.25 * (hi - g)

    entries = []
    for n, (nu, kind) in enumerate(roots[:count]):
        k, kp = eval_K_scaled(nu, g, cfg)
        res = abs(kp) if kind is ZeroKind.DERIVATIVE else abs(k)
        if res >= zero_tol:
            raise AccuracyError(f"residual {res:.3e} at nu_{n}={nu} exceeds zero_tol={zero_tol}")
        entries.append(ZeroEntry(kind, n // 2, nu, res))
    table = ZeroTable(g, tuple(entries))
    table.check_interlacing()
    return table
