"""Tail certificates for the series that decide essential self-adjointness.

Every certificate returned here is a function ``k0 -> TailBound | None``
whose interval encloses ``term(k+1)/term(k)`` for *all* ``k >= k0``, derived
from the value and ratio enclosures of the chain's sequence families.

Solution ratios ``rho_r = v_{r+1}/v_r`` obey the Riccati-type map

    rho_r = 1 + a_r + c_r (1 - 1/rho_{r-1}),   a_r = (W_r - lam) m_r / b_r,
                                                c_r = b_{r-1} / b_r,

which is increasing in ``rho_{r-1}``, in ``a_r`` and (for ``rho >= 1``) in
``c_r``.  When ``a_r >= 0`` on the tail and one ratio is at least 1, an
invariant interval ``[L, R]`` is obtained from the fixed points of the map
with the coefficients frozen at their envelope extremes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

from .chain import BirthDeathChain
from .classify import TailBound
from .intervals import INF, Interval, is_finite

_MARGIN = Fraction(1, 2 ** 40)


def a_env(chain: BirthDeathChain, lam: Fraction, r0: int) -> Interval:
    """Enclosure of ``(W_r - lam) m_r / b_r`` for ``r >= r0``."""
    shift = chain.W.value_env(r0) - lam
    return shift * chain.m.value_env(r0) * chain.b.value_env(r0).reciprocal()


def c_env(chain: BirthDeathChain, r0: int) -> Optional[Interval]:
    """Enclosure of ``b_{r-1} / b_r`` for ``r >= r0 >= 1``."""
    ratio = chain.b.ratio_env(r0 - 1)
    if ratio is None or ratio.lo <= 0:
        return None
    return ratio.reciprocal()


def _larger_root(s, c) -> float:
    """Larger root of ``x^2 - s x + c`` in floating point (discriminant >= 0 here)."""
    s, c = float(s), float(c)
    disc = max(s * s - 4 * c, 0.0)
    return 0.5 * (s + math.sqrt(disc))


def _upper_invariant(s: Fraction, c: Fraction) -> Fraction:
    """Rational ``R >= 1`` with ``R^2 - s R + c >= 0`` close to the larger root."""
    root = Fraction(_larger_root(s, c))
    margin = _MARGIN
    while True:
        R = max(Fraction(1), root * (1 + margin) + margin)
        if R * R - s * R + c >= 0:
            return R
        margin *= 16


def _lower_invariant(s: Fraction, c: Fraction) -> Fraction:
    """Rational ``L >= 1`` with ``L^2 - s L + c <= 0``; 1 always qualifies when a >= 0."""
    root = Fraction(_larger_root(s, c))
    L = root * (1 - _MARGIN)
    if L > 1 and L * L - s * L + c <= 0:
        return L
    return Fraction(1)


def _enclosure(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.point(x)


def solution_ratio_env(chain: BirthDeathChain, lam: Fraction, values: Sequence, j: int) -> Optional[Interval]:
    """Enclosure of ``v_{r+1}/v_r`` for every ``r >= j``, or None.

    ``values`` are solution values (exact or enclosed) known at least
    through ``j+1``.
    """
    if len(values) < j + 2:
        return None
    here = _enclosure(values[j])
    if here.lo <= 0:
        return None
    rho = _enclosure(values[j + 1]) / here
    if rho.lo < 1:
        return None
    a = a_env(chain, lam, j + 1)
    c = c_env(chain, j + 1)
    if c is None or a.lo < 0:
        return None
    L = min(rho.lo, _lower_invariant(Fraction(1 + a.lo + c.lo), Fraction(c.lo)))
    if not (is_finite(a.hi) and is_finite(c.hi)):
        return Interval(L, INF)
    R = max(rho.hi, _upper_invariant(Fraction(1 + a.hi + c.hi), Fraction(c.hi)))
    return Interval(L, R)


def partial_sum_ratio_env(x_ratio: Interval, x_next, s_at) -> Interval:
    """Enclosure of ``S_{r+1}/S_r`` for ``r >= k0`` where ``S`` sums positive ``x``.

    ``x_ratio`` encloses ``x_{j+1}/x_j`` for ``j >= k0``; ``x_next`` is
    ``x_{k0+1}`` and ``s_at`` is ``S_{k0}`` (either may be an enclosure).  Two bounds on the increment
    ``x_{r+1}/S_r`` are combined: it is at most ``x_{r+1}/x_r``, and when the
    ``x`` are nonincreasing it is at most ``x_{k0+1}/S_{k0}``.
    """
    inc = x_ratio.hi
    if x_ratio.hi <= 1:
        s_lo = _enclosure(s_at).lo
        if s_lo > 0:
            inc = min(inc, _enclosure(x_next).hi / s_lo)
    return Interval(Fraction(1), 1 + inc)


def hamburger_certificate(chain: BirthDeathChain, sums: Sequence):
    """Certificate for ``term_k = S_k^2 m_{k+1}``, ``S_k = sum_{r<=k} 1/b_r``."""

    def certificate(k0: int) -> Optional[TailBound]:
        if k0 + 1 >= len(sums):
            return None
        b_ratio = chain.b.ratio_env(k0)
        m_ratio = chain.m.ratio_env(k0 + 1)
        if b_ratio is None or m_ratio is None or b_ratio.lo <= 0:
            return None
        x_ratio = b_ratio.reciprocal()
        s_ratio = partial_sum_ratio_env(x_ratio, 1 / chain.edge(k0 + 1), sums[k0])
        env = s_ratio.square() * m_ratio
        return TailBound(k0, env, f"inner sums nondecreasing; measure ratio in {m_ratio}; sum ratio in {s_ratio}")

    return certificate


def characterization_certificate(chain: BirthDeathChain, lam: Fraction, values: Sequence):
    """Certificate for ``term_k = v_{k+1}^2 m_{k+1}`` with ``v`` the normalised solution."""

    def certificate(k0: int) -> Optional[TailBound]:
        rho = solution_ratio_env(chain, lam, values, k0 + 1)
        m_ratio = chain.m.ratio_env(k0 + 1)
        if rho is None or m_ratio is None:
            return None
        env = rho.square() * m_ratio
        return TailBound(k0, env, f"solution ratio invariant {rho}; measure ratio in {m_ratio}")

    return certificate


def positive_certificate(chain: BirthDeathChain, lam: Fraction, values: Sequence, sums: Sequence):
    """Certificate for ``term_r = S_r^2 v_{r+1}^2 m_{r+1}``, ``S_r = sum_{k<=r} 1/(b_k v_k v_{k+1})``."""

    def certificate(k0: int) -> Optional[TailBound]:
        if k0 + 2 >= len(values) or k0 >= len(sums):
            return None
        rho = solution_ratio_env(chain, lam, values, k0)
        m_ratio = chain.m.ratio_env(k0 + 1)
        c = c_env(chain, k0 + 1)
        if rho is None or m_ratio is None or c is None:
            return None
        x_ratio = c * (rho * rho).reciprocal()
        x_next = (chain.edge(k0 + 1) * _enclosure(values[k0 + 1]) * _enclosure(values[k0 + 2])).reciprocal()
        s_ratio = partial_sum_ratio_env(x_ratio, x_next, sums[k0])
        env = s_ratio.square() * rho.square() * m_ratio
        return TailBound(k0, env, f"solution ratio invariant {rho}; measure ratio in {m_ratio}; sum ratio in {s_ratio}")

    return certificate


def failure_certificate(chain: BirthDeathChain, lam: Fraction):
    """Certificate for ``term_k = prod_{i<=k} F_i * m_{k+2}``.

    ``F_i = (1 + a + c)^2 + c^2 + 1`` with ``a = a_{i+1}``, ``c = c_{i+1}``.
    """

    def certificate(k0: int) -> Optional[TailBound]:
        a = a_env(chain, lam, k0 + 2)
        c = c_env(chain, k0 + 2)
        m_ratio = chain.m.ratio_env(k0 + 2)
        if c is None or m_ratio is None:
            return None
        factor = (1 + a + c).square() + c.square() + 1
        env = factor * m_ratio
        return TailBound(k0, env, f"step factor in {factor}; measure ratio in {m_ratio}")

    return certificate
