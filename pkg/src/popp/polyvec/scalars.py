"""Exact scalars for polynomial coefficients.

Coefficients are :class:`fractions.Fraction` by default.  :class:`Surd`
extends them to a single real quadratic field Q(sqrt(d)), which is what
orthonormal structure matrices with entries like 1/sqrt(2) need.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction


def _squarefree_part(d: int) -> tuple[int, int]:
    """Return (s, r) with d = s**2 * r and r squarefree."""
    s, r = 1, d
    f = 2
    while f * f <= r:
        while r % (f * f) == 0:
            r //= f * f
            s *= f
        f += 1
    return s, r


class Surd:
    """Element ``a + b*sqrt(d)`` of Q(sqrt(d)), d > 1 squarefree.

    Arithmetic never silently mixes two different radicands.  Results with a
    zero irrational part collapse back to a plain ``Fraction``.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        if d < 2:
            raise ValueError("radicand must be >= 2")
        s, r = _squarefree_part(d)
        if r == 1:
            raise ValueError(f"sqrt({d}) is rational")
        self.a = Fraction(a)
        self.b = Fraction(b) * s
        self.d = r

    @classmethod
    def sqrt(cls, d: int):
        """Exact square root of a non-negative integer."""
        if d < 0:
            raise ValueError("negative radicand")
        r = math.isqrt(d)
        if r * r == d:
            return Fraction(r)
        return cls(0, 1, d)

    @staticmethod
    def _make(a, b, d):
        if b == 0:
            return Fraction(a)
        return Surd(a, b, d)

    def _coerce(self, other):
        if isinstance(other, Surd):
            if other.d != self.d:
                raise ValueError(
                    f"cannot mix sqrt({self.d}) and sqrt({other.d}) coefficients")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self._make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.d)

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self._make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return self._make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return self._make(self.a * a + self.d * self.b * b,
                          self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def _inverse(self):
        norm = self.a * self.a - self.d * self.b * self.b
        return Surd(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return self * other._inverse()
        if isinstance(other, (int, Fraction)):
            return self._make(self.a / other, self.b / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._inverse() * other
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Surd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"Surd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        root = f"sqrt({self.d})"
        irr = root if self.b == 1 else f"{_frac_str(self.b)}*{root}"
        if self.a == 0:
            return irr
        sign = "-" if self.b < 0 else "+"
        if self.b < 0:
            irr = root if self.b == -1 else f"{_frac_str(-self.b)}*{root}"
        return f"({_frac_str(self.a)} {sign} {irr})"


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_exact(value):
    """Coerce a number into an exact coefficient (Fraction or Surd)."""
    if isinstance(value, (Fraction, Surd)):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, (float, numbers.Real)):
        f = float(value)
        if not math.isfinite(f):
            raise ValueError(f"non-finite coefficient {value!r}")
        return Fraction(f)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"unsupported coefficient type {type(value).__name__}")


def coeff_str(c) -> str:
    if isinstance(c, Surd):
        return str(c)
    return _frac_str(c)
