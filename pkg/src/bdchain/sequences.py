"""Finite descriptions of infinite rational sequences indexed by k = 0, 1, 2, ...

Four families are available, mirroring the chain file grammar:

``Const(c)``            c
``Geom(a, q)``          a * q**k
``Poly((c0, ..., cd))`` c0 + c1*k + ... + cd*k**d
``Table(xs, tail)``     xs[k] for k < len(xs), then tail at k - len(xs)

Besides exact evaluation each family can bound itself over a tail
``{k >= k0}``: :meth:`SequenceSpec.value_env` encloses the values and
:meth:`SequenceSpec.ratio_env` encloses consecutive ratios ``s(k+1)/s(k)``.
Those enclosures are rigorous (exact rational reasoning, no sampling) and are
what lets the series classifier promote a verdict from heuristic to proved.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

from .errors import DomainError
from .intervals import INF, Interval

Scalar = Fraction
ScalarLike = Union[int, Fraction, str]

# Upper limit on exact point evaluations a single tail analysis may perform.
SCAN_CAP = 20000

_RATIONAL = re.compile(r"^[+-]?(\d+(/\d+)?|\d*\.\d+|\d+\.\d*)$")


def to_scalar(x: ScalarLike) -> Scalar:
    """Convert ``x`` to an exact rational.

    Strings may be integers, ``p/q`` or plain decimals; decimals are read
    exactly (``"0.1"`` is ``1/10``).  Floats are rejected since their binary
    value is rarely what the caller meant.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        if not _RATIONAL.match(text):
            raise DomainError(f"not a rational literal: {x!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise DomainError(f"zero denominator in {x!r}") from None
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def format_scalar(x: Fraction) -> str:
    """Canonical text form: ``p`` for integers, ``p/q`` otherwise."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# polynomial helpers (coefficient tuples, lowest degree first)


def _trim(coeffs: Sequence[Fraction]) -> tuple:
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs) if coeffs else (Fraction(0),)


def poly_eval(coeffs: Sequence[Fraction], x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def taylor_shift(coeffs: Sequence[Fraction], s) -> tuple:
    """Coefficients of ``t -> p(s + t)``."""
    out = list(coeffs)
    n = len(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += s * out[j + 1]
    return tuple(out)


def poly_sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> tuple:
    n = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (n - len(p))
    q = list(q) + [Fraction(0)] * (n - len(q))
    return _trim([a - b for a, b in zip(p, q)])


def positive_from(coeffs: Sequence[Fraction], start: int, cap: int = SCAN_CAP) -> Optional[bool]:
    """Decide whether ``p(k) > 0`` for every integer ``k >= start``.

    Returns True/False when decided and None when the decision would need
    more than ``cap`` exact evaluations.  The far tail is handled by finding
    an anchor ``K`` where every coefficient of ``p(K + t)`` is nonnegative
    with a positive constant term; the integers in ``[start, K)`` are then
    checked one by one.
    """
    coeffs = _trim(coeffs)
    if coeffs[-1] < 0:
        return False
    if len(coeffs) == 1:
        return coeffs[0] > 0
    anchor = max(start, 0)
    step = 1
    while True:
        shifted = taylor_shift(coeffs, anchor)
        if shifted[0] > 0 and all(c >= 0 for c in shifted):
            break
        if anchor > 2 ** 62:
            return None
        anchor += step
        step *= 2
    if anchor - start > cap:
        return None
    return all(poly_eval(coeffs, k) > 0 for k in range(start, anchor))


def monotone_threshold(coeffs: Sequence[Fraction], start: int, cap: int = SCAN_CAP) -> Optional[int]:
    """Smallest ``T >= start`` with ``p(k+1) >= p(k)`` for all ``k >= T`` (leading coefficient > 0).

    For a polynomial with negative leading coefficient the roles are mirrored
    (nonincreasing from ``T`` on).  None if undecidable within ``cap``.
    """
    coeffs = _trim(coeffs)
    if len(coeffs) == 1:
        return start
    diff = poly_sub(taylor_shift(coeffs, 1), coeffs)
    if coeffs[-1] < 0:
        diff = tuple(-c for c in diff)
    anchor = max(start, 0)
    step = 1
    while True:
        shifted = taylor_shift(diff, anchor)
        if all(c >= 0 for c in shifted):
            break
        if anchor > 2 ** 62:
            return None
        anchor += step
        step *= 2
    if anchor - start > cap:
        return None
    threshold = anchor
    for k in range(anchor - 1, start - 1, -1):
        if poly_eval(diff, k) >= 0:
            threshold = k
        else:
            break
    return threshold


# ---------------------------------------------------------------------------
# families


class SequenceSpec:
    """Base class of the sequence families.  Instances are immutable."""

    def at(self, k: int) -> Fraction:
        if k < 0:
            raise DomainError(f"negative index {k}")
        return self._at(k)

    __call__ = at

    def _at(self, k: int) -> Fraction:
        raise NotImplementedError

    def values(self, n: int) -> list:
        """Values at indices ``0..n-1``."""
        return [self.at(k) for k in range(n)]

    def value_env(self, k0: int) -> Interval:
        """Interval containing ``s(k)`` for every ``k >= k0``."""
        return Interval.everything()

    def ratio_env(self, k0: int) -> Optional[Interval]:
        """Interval containing ``s(k+1)/s(k)`` for every ``k >= k0``.

        Only defined for sequences that are strictly positive on the tail;
        None when no rigorous enclosure is available.
        """
        return None

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class Const(SequenceSpec):
    c: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", to_scalar(self.c))

    def _at(self, k):
        return self.c

    def value_env(self, k0):
        return Interval.point(self.c)

    def ratio_env(self, k0):
        if self.c > 0:
            return Interval.point(1)
        return None

    def to_text(self):
        return f"const {format_scalar(self.c)}"


@dataclass(frozen=True)
class Geom(SequenceSpec):
    a: Fraction
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", to_scalar(self.a))
        object.__setattr__(self, "q", to_scalar(self.q))

    def _at(self, k):
        # q**0 == 1 even for q == 0
        return self.a * self.q ** k

    def value_env(self, k0):
        a, q = self.a, self.q
        first = self.at(k0)
        if a == 0 or q == 1:
            return Interval.point(first)
        if q == 0:
            return Interval.hull(first, 0)
        mag = abs(q)
        if mag < 1:
            if q > 0:
                return Interval.hull(first, 0)
            second = self.at(k0 + 1)
            return Interval.hull(first, second, 0)
        if q > 0:
            return Interval(first, INF) if a > 0 else Interval(-INF, first)
        if mag == 1:
            return Interval.hull(a, -a)
        return Interval.everything()

    def ratio_env(self, k0):
        if self.a > 0 and self.q > 0:
            return Interval.point(self.q)
        return None

    def to_text(self):
        return f"geom {format_scalar(self.a)} {format_scalar(self.q)}"


@dataclass(frozen=True)
class Poly(SequenceSpec):
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(to_scalar(c) for c in self.coeffs)
        if not coeffs:
            raise DomainError("poly needs at least one coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    def _at(self, k):
        return poly_eval(self.coeffs, k)

    @property
    def _reduced(self):
        return _trim(self.coeffs)

    def value_env(self, k0):
        coeffs = self._reduced
        if len(coeffs) == 1:
            return Interval.point(coeffs[0])
        t = monotone_threshold(coeffs, k0)
        if t is None:
            return Interval.everything()
        extreme = [poly_eval(coeffs, k) for k in range(k0, t + 1)]
        if coeffs[-1] > 0:
            return Interval(min(extreme), INF)
        return Interval(-INF, max(extreme))

    def ratio_env(self, k0):
        coeffs = self._reduced
        if len(coeffs) == 1:
            return Interval.point(1) if coeffs[0] > 0 else None
        if not positive_from(coeffs, k0):
            return None
        t = monotone_threshold(coeffs, k0)
        if t is None:
            return None
        head = [poly_eval(coeffs, k + 1) / poly_eval(coeffs, k) for k in range(k0, t)]
        lo = min(head + [Fraction(1)])
        hi = _poly_ratio_sup(coeffs, t)
        if hi is None:
            return Interval(lo, INF)
        return Interval(lo, max(head + [hi]))

    def to_text(self):
        return "poly " + " ".join(format_scalar(c) for c in self.coeffs)


def _poly_ratio_sup(coeffs, start: int, probe: int = 64) -> Optional[Fraction]:
    """Rational ``eta`` with ``p(k+1) <= eta * p(k)`` for all ``k >= start``.

    Candidates are derived from the exact ratios on a probe window and then
    certified with :func:`positive_from` on ``eta*p(k) - p(k+1)``.
    """
    ratios = [poly_eval(coeffs, k + 1) / poly_eval(coeffs, k) for k in range(start, start + probe)]
    best = max(ratios)
    eta = best + (best - 1)
    next_p = taylor_shift(coeffs, 1)
    for _ in range(8):
        gap = poly_sub(tuple(eta * c for c in coeffs), next_p)
        verdict = positive_from(gap, start)
        if verdict:
            return eta
        eta = 1 + 2 * (eta - 1)
    return None


@dataclass(frozen=True)
class Table(SequenceSpec):
    xs: tuple
    tail: SequenceSpec

    def __post_init__(self):
        xs = tuple(to_scalar(x) for x in self.xs)
        if not xs:
            raise DomainError("table needs at least one entry")
        object.__setattr__(self, "xs", xs)

    def _at(self, k):
        n = len(self.xs)
        if k < n:
            return self.xs[k]
        return self.tail.at(k - n)

    def value_env(self, k0):
        n = len(self.xs)
        if k0 >= n:
            return self.tail.value_env(k0 - n)
        env = self.tail.value_env(0)
        return env.union(Interval.hull(*self.xs[k0:]))

    def ratio_env(self, k0):
        n = len(self.xs)
        if k0 >= n:
            return self.tail.ratio_env(k0 - n)
        tail_env = self.tail.ratio_env(0)
        if tail_env is None:
            return None
        vals = [self.at(k) for k in range(k0, n + 1)]
        if any(v <= 0 for v in vals):
            return None
        head = Interval.hull(*(vals[i + 1] / vals[i] for i in range(len(vals) - 1)))
        return head.union(tail_env)

    def to_text(self):
        xs = " ".join(format_scalar(x) for x in self.xs)
        return f"table {xs} tail {self.tail.to_text()}"


@dataclass(frozen=True)
class Shifted(SequenceSpec):
    """``base(k) + offset``; used to fold the spectral shift into a potential.

    Not part of the file grammar: it only arises programmatically.
    """

    base: SequenceSpec
    offset: Fraction

    def __post_init__(self):
        object.__setattr__(self, "offset", to_scalar(self.offset))

    def _at(self, k):
        return self.base.at(k) + self.offset

    def value_env(self, k0):
        return self.base.value_env(k0) + self.offset

    def to_text(self):
        raise DomainError("a shifted sequence has no file representation")


def shift_sequence(spec: SequenceSpec, offset) -> SequenceSpec:
    """``spec + offset``, staying inside the file grammar when possible."""
    offset = to_scalar(offset)
    if offset == 0:
        return spec
    if isinstance(spec, Const):
        return Const(spec.c + offset)
    if isinstance(spec, Poly):
        return Poly((spec.coeffs[0] + offset,) + spec.coeffs[1:])
    if isinstance(spec, Table):
        return Table(tuple(x + offset for x in spec.xs), shift_sequence(spec.tail, offset))
    if isinstance(spec, Shifted):
        return shift_sequence(spec.base, spec.offset + offset)
    return Shifted(spec, offset)


# ---------------------------------------------------------------------------
# parsing of the family grammar


def parse_family(tokens: Iterable[str]) -> SequenceSpec:
    """Parse ``const c | geom a q | poly c0 .. cd | table x0 .. xn tail <family>``."""
    tokens = list(tokens)
    spec, rest = _parse_family(tokens)
    if rest:
        raise DomainError(f"trailing tokens after family: {' '.join(rest)}")
    return spec


def _parse_family(tokens):
    if not tokens:
        raise DomainError("missing sequence family")
    head, rest = tokens[0], tokens[1:]
    if head == "const":
        if not rest:
            raise DomainError("const needs one value")
        return Const(to_scalar(rest[0])), rest[1:]
    if head == "geom":
        if len(rest) < 2:
            raise DomainError("geom needs two values")
        return Geom(to_scalar(rest[0]), to_scalar(rest[1])), rest[2:]
    if head == "poly":
        coeffs = []
        while rest and rest[0] not in _FAMILY_WORDS:
            coeffs.append(to_scalar(rest[0]))
            rest = rest[1:]
        if not coeffs:
            raise DomainError("poly needs at least one coefficient")
        return Poly(tuple(coeffs)), rest
    if head == "table":
        xs = []
        while rest and rest[0] != "tail":
            xs.append(to_scalar(rest[0]))
            rest = rest[1:]
        if not rest:
            raise DomainError("table needs 'tail <family>'")
        if not xs:
            raise DomainError("table needs at least one entry")
        tail, rest = _parse_family(rest[1:])
        return Table(tuple(xs), tail), rest
    raise DomainError(f"unknown sequence family {head!r}")


_FAMILY_WORDS = {"const", "geom", "poly", "table", "tail"}


@lru_cache(maxsize=None)
def _cached_at(spec: SequenceSpec, k: int) -> Fraction:
    return spec.at(k)


def cached_value(spec: SequenceSpec, k: int) -> Fraction:
    """Memoised evaluation; specs are immutable and hashable."""
    return _cached_at(spec, k)


def log10_abs(x: Fraction) -> float:
    """``log10 |x|`` for arbitrarily large rationals (x nonzero)."""
    return math.log10(abs(x.numerator)) - math.log10(x.denominator)
