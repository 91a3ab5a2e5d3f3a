"""Closed intervals with exact rational endpoints.

Endpoints are :class:`fractions.Fraction`, so interval arithmetic here is exact;
rounding only happens when :meth:`Interval.round_out` is called, and then always
outward onto a dyadic grid.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @classmethod
    def from_iv(cls, x) -> "Interval":
        """Exact conversion of an ``mpmath.iv`` interval (endpoints are dyadic)."""
        a, b = x._mpi_
        return cls(_raw_to_fraction(a), _raw_to_fraction(b))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def contains(self, x) -> bool:
        return x in self

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersection(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __add__(self, other):
        other = _coerce(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        other = _coerce(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if other.lo == other.hi and self.lo == self.hi:
            return Interval.point(self.lo * other.lo)
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval division by an interval containing 0")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def sign(self):
        """+1 / -1 if the interval excludes 0, else None (0 for the point interval [0,0])."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def round_out(self, bits: int) -> "Interval":
        """Enlarge to endpoints on the grid 2**-bits."""
        scale = 1 << bits
        lo = Fraction(math.floor(self.lo * scale), scale)
        hi = Fraction(math.ceil(self.hi * scale), scale)
        return Interval(lo, hi)

    def decimal_strings(self, digits: int = 30) -> tuple[str, str]:
        """Outward-rounded decimal strings with ``digits`` digits after the point."""
        return _decimal(self.lo, digits, math.floor), _decimal(self.hi, digits, math.ceil)

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        lo, hi = self.decimal_strings(17)
        return f"Interval([{lo}, {hi}])"


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(Fraction(x))


def _raw_to_fraction(t) -> Fraction:
    # raw mpf tuple (sign, man, exp, bc); going through mpmath.mpf() would round to mp.prec
    sign, man, exp, _ = t
    if not man and exp:
        raise ValueError("interval endpoint is not finite")
    man = -int(man) if sign else int(man)
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2 ** (-exp))


def _decimal(q: Fraction, digits: int, rounding) -> str:
    scaled = rounding(q * 10**digits)
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}" if digits else f"{sign}{s}"


def inv_sqrt(d: int, bits: int = 128) -> Interval:
    """Enclosure of 1/sqrt(d) for a positive integer d, using integer square roots."""
    scale = 1 << (2 * bits)
    r = math.isqrt(d * scale)  # r <= sqrt(d) * 2**bits < r + 1
    sqrt_lo = Fraction(r, 1 << bits)
    sqrt_hi = Fraction(r if r * r == d * scale else r + 1, 1 << bits)
    return Interval(1 / sqrt_hi, 1 / sqrt_lo)


@contextlib.contextmanager
def iv_precision(bits: int):
    """Temporarily set the working precision of mpmath's interval context."""
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield mpmath.iv
    finally:
        mpmath.iv.prec = old


def pi_power(k: int, bits: int = 128) -> Interval:
    """Enclosure of pi**k via mpmath interval arithmetic."""
    with iv_precision(bits + 16):
        return Interval.from_iv(mpmath.iv.pi**k)
