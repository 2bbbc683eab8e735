"""Closed intervals over the extended rationals.

Endpoints are :class:`~fractions.Fraction` or ``±math.inf``.  The arithmetic
is outward-safe: every operation returns an interval containing all possible
results, which is what the tail certificates in :mod:`bdchain.classify` need.

Products of long exact rationals grow without bound, so :meth:`Interval.tidy`
replaces oversized endpoints by nearby dyadic rationals, rounding outward.
Small endpoints are left untouched, so exact data stays exact.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Endpoint = Union[Fraction, float]

INF = math.inf

#: significant bits kept when an endpoint has to be rounded
PRECISION = 256


def is_finite(x: Endpoint) -> bool:
    """Finiteness without converting (possibly huge) rationals to float."""
    return not isinstance(x, float) or math.isfinite(x)


def _size(x: Fraction) -> int:
    return x.numerator.bit_length() + x.denominator.bit_length()


def round_dyadic(x: Fraction, bits: int, up: bool) -> Fraction:
    """``x`` rounded to ``bits`` significant bits, towards +inf if ``up`` else -inf."""
    n, d = x.numerator, x.denominator
    if n == 0:
        return x
    s = bits - (abs(n).bit_length() - d.bit_length())
    if s >= 0:
        q, r = divmod(n << s, d)
    else:
        q, r = divmod(n, d << -s)
    if up and r:
        q += 1
    return Fraction(q, 1 << s) if s >= 0 else Fraction(q << -s)


def _mul(x: Endpoint, y: Endpoint) -> Endpoint:
    # 0 * inf is taken as 0: endpoints are limits of products of finite values.
    if x == 0 or y == 0:
        return Fraction(0)
    return x * y


@dataclass(frozen=True)
class Interval:
    lo: Endpoint
    hi: Endpoint

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x) -> Interval:
        x = Fraction(x)
        return cls(x, x)

    @classmethod
    def hull(cls, *values) -> Interval:
        lo = min(values)
        hi = max(values)
        return cls(_frac(lo), _frac(hi))

    @classmethod
    def everything(cls) -> Interval:
        return cls(-INF, INF)

    @classmethod
    def from_ratio(cls, num: int, den: int, bits: int = PRECISION) -> Interval:
        """Enclosure of ``num/den`` (``den > 0``) found by truncating both integers.

        Only shifts are used, so this is cheap for integers with millions of
        bits, where reducing the fraction would not be.
        """
        if den <= 0:
            raise ValueError("denominator must be positive")
        keep = bits + 8
        if num.bit_length() <= keep and den.bit_length() <= keep:
            return cls.point(Fraction(num, den))
        mag = abs(num)
        tn = max(0, mag.bit_length() - keep)
        td = max(0, den.bit_length() - keep)
        n_lo = mag >> tn
        n_hi = n_lo + (1 if n_lo << tn != mag else 0)
        d_lo = den >> td
        d_hi = d_lo + (1 if d_lo << td != den else 0)
        if d_lo == 0:
            raise ZeroDivisionError("denominator truncated to zero")
        scale = Fraction(2) ** (tn - td)
        lo = round_dyadic(Fraction(n_lo, d_hi) * scale, bits, up=False)
        hi = round_dyadic(Fraction(n_hi, d_lo) * scale, bits, up=True)
        return cls(lo, hi) if num >= 0 else cls(-hi, -lo)

    def tidy(self, bits: int = PRECISION) -> Interval:
        """Round endpoints longer than ``4 * bits`` bits outward to ``bits`` significant bits."""
        lo, hi = self.lo, self.hi
        if isinstance(lo, Fraction) and _size(lo) > 4 * bits:
            lo = round_dyadic(lo, bits, up=False)
        if isinstance(hi, Fraction) and _size(hi) > 4 * bits:
            hi = round_dyadic(hi, bits, up=True)
        if lo is self.lo and hi is self.hi:
            return self
        return Interval(lo, hi)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def midpoint(self) -> Endpoint:
        if not self.bounded:
            raise ValueError("unbounded interval has no midpoint")
        return (self.lo + self.hi) / 2

    def union(self, other: Interval) -> Interval:
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    @property
    def bounded(self) -> bool:
        return is_finite(self.lo) and is_finite(self.hi)

    def __add__(self, other) -> Interval:
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi).tidy()

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> Interval:
        return self + (-_as_interval(other))

    def __rsub__(self, other) -> Interval:
        return _as_interval(other) - self

    def __mul__(self, other) -> Interval:
        other = _as_interval(other)
        products = [_mul(a, b) for a in (self.lo, self.hi) for b in (other.lo, other.hi)]
        return Interval(min(products), max(products)).tidy()

    __rmul__ = __mul__

    def reciprocal(self) -> Interval:
        """Reciprocal of an interval that lies strictly on one side of zero.

        An endpoint equal to zero is allowed when it is a limit (for example
        the infimum of a geometric sequence); it maps to infinity.
        """
        if self.lo > 0 or self.hi < 0:
            return Interval(_inv(self.hi), _inv(self.lo)).tidy()
        if self.lo == 0 and self.hi > 0:
            return Interval(_inv(self.hi), INF)
        if self.hi == 0 and self.lo < 0:
            return Interval(-INF, _inv(self.lo))
        raise ZeroDivisionError("interval contains zero")

    def __truediv__(self, other) -> Interval:
        return self * _as_interval(other).reciprocal()

    def square(self) -> Interval:
        if self.lo >= 0:
            return Interval(_mul(self.lo, self.lo), _mul(self.hi, self.hi)).tidy()
        if self.hi <= 0:
            return Interval(_mul(self.hi, self.hi), _mul(self.lo, self.lo)).tidy()
        return Interval(Fraction(0), max(_mul(self.lo, self.lo), _mul(self.hi, self.hi))).tidy()

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __repr__(self) -> str:
        return f"Interval({_show(self.lo)}, {_show(self.hi)})"

    def __str__(self) -> str:
        return f"[{_short(self.lo)}, {_short(self.hi)}]"


def _frac(x) -> Endpoint:
    if isinstance(x, float) and math.isinf(x):
        return x
    return Fraction(x)


def _inv(x: Endpoint) -> Endpoint:
    if not is_finite(x):
        return Fraction(0)
    if x == 0:
        return INF
    return 1 / x


def _as_interval(x) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(x)


def _show(x: Endpoint) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def format_sig(x, digits: int = 12) -> str:
    """``x`` (rational, enclosure midpoint or float) to ``digits`` significant digits.

    Goes through :mod:`decimal`, so magnitudes far outside the float range
    still print; long integers are shortened first since few digits are kept.
    """
    if isinstance(x, Interval):
        x = x.midpoint
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    excess = min(abs(num).bit_length(), den.bit_length()) - 128
    if excess > 0:
        num, den = num >> excess, den >> excess
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        ctx.Emax, ctx.Emin = decimal.MAX_EMAX, decimal.MIN_EMIN
        return format(decimal.Decimal(num) / decimal.Decimal(den), f".{digits}g")


def _short(x: Endpoint) -> str:
    # exact while readable, 12 digits once the rational gets long
    if isinstance(x, Fraction) and _size(x) <= 64:
        return str(x)
    return format_sig(x)
