"""Extended-range (mantissa, exponent) pairs for a function and its derivative."""
from __future__ import annotations

import math
from dataclasses import dataclass

_LO = 2.0**-32
_HI = 2.0**32


@dataclass(frozen=True)
class ScaledValue:
    """``f * 2**exp2`` and ``fp * 2**exp2`` sharing one exponent.

    After :meth:`normalized`, ``max(|f|, |fp|)`` lies in ``[2**-32, 2**32)``
    unless both mantissas are zero.
    """

    f: float
    fp: float
    exp2: int = 0

    def normalized(self) -> "ScaledValue":
        big = max(abs(self.f), abs(self.fp))
        if big == 0.0 or _LO <= big < _HI:
            return self
        _, e = math.frexp(big)
        return ScaledValue(math.ldexp(self.f, -e), math.ldexp(self.fp, -e), self.exp2 + e)

    @property
    def log2_scale(self) -> int:
        return self.exp2

    def value(self) -> float:
        """True function value (may underflow to 0)."""
        return math.ldexp(self.f, self.exp2)

    def derivative(self) -> float:
        return math.ldexp(self.fp, self.exp2)

    def shifted(self, log_factor: float) -> tuple[float, float]:
        """Multiply both entries by ``exp(log_factor)`` and return plain floats.

        The exponent offset is folded into ``log_factor`` before the single
        exponentiation, so intermediate underflow never happens.
        """
        s = math.exp(self.exp2 * math.log(2.0) + log_factor)
        return self.f * s, self.fp * s
