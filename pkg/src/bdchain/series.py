"""Generating functions of solutions as exact truncated power series.

Everything in this module works with the effective potential: callers fold
the spectral shift into ``W`` first (see :meth:`BirthDeathChain.folded`),
so the equation is ``(Delta + W) v = 0``.  For a solution ``v`` the
generating function is ``A(z) = sum_{r>=1} v_r z^r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chain import BirthDeathChain, Solution, full_history_solve
from .errors import DeconvolutionError, DomainError
from .sequences import ScalarLike, to_scalar


class TruncatedSeries:
    """Power series known exactly through ``z^order``.

    Arithmetic keeps track of how far the result is reliable: sums and
    products are good to the smaller order, a derivative loses one order and
    multiplying by ``z^k`` gains ``k``.  Asking for a coefficient above the
    order raises instead of returning a silently wrong value.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Sequence, order: int | None = None):
        coeffs = [to_scalar(c) for c in coeffs]
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise DomainError("a truncated series needs order >= 0")
        coeffs = coeffs[: order + 1]
        coeffs += [Fraction(0)] * (order + 1 - len(coeffs))
        self._coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls([], order)

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coefficients(self) -> tuple:
        return self._coeffs

    def __getitem__(self, r: int) -> Fraction:
        if r < 0:
            raise DomainError(f"negative coefficient index {r}")
        if r > self.order:
            raise DomainError(f"coefficient z^{r} lies beyond the truncation order {self.order}")
        return self._coeffs[r]

    def __len__(self) -> int:
        return len(self._coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self._coeffs)
        return f"TruncatedSeries([{shown}], order={self.order})"

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise DomainError(f"cannot extend order {self.order} to {order}")
        return TruncatedSeries(self._coeffs, order)

    def __add__(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        n = min(self.order, other.order)
        return TruncatedSeries([self._coeffs[r] + other._coeffs[r] for r in range(n + 1)], n)

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries([-c for c in self._coeffs], self.order)

    def __sub__(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            n = min(self.order, other.order)
            a, b = self._coeffs, other._coeffs
            out = [sum((a[i] * b[r - i] for i in range(r + 1)), Fraction(0)) for r in range(n + 1)]
            return TruncatedSeries(out, n)
        scalar = to_scalar(other)
        return TruncatedSeries([scalar * c for c in self._coeffs], self.order)

    def __rmul__(self, other) -> TruncatedSeries:
        return self * other

    def derivative(self) -> TruncatedSeries:
        if self.order == 0:
            raise DomainError("derivative of an order-0 series has no reliable coefficients")
        return TruncatedSeries([r * self._coeffs[r] for r in range(1, self.order + 1)], self.order - 1)

    def shift(self, k: int) -> TruncatedSeries:
        """Multiply by ``z^k``."""
        if k < 0:
            raise DomainError("only nonnegative shifts keep a power series")
        return TruncatedSeries([Fraction(0)] * k + list(self._coeffs), self.order + k)

    def max_abs_diff(self, other: TruncatedSeries) -> Fraction:
        n = min(self.order, other.order)
        return max(abs(self._coeffs[r] - other._coeffs[r]) for r in range(n + 1))


@dataclass(frozen=True)
class IdentityCheck:
    """Largest coefficient mismatch of an identity and the order through which it was compared."""

    residual: Fraction
    order: int

    @property
    def holds(self) -> bool:
        return self.residual == 0


def _poly_mul(p: Sequence, q: Sequence) -> list:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _poly_add(p: Sequence, q: Sequence) -> list:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def expand_rational(numer: Sequence, denom: Sequence, N: int) -> TruncatedSeries:
    """Coefficients of ``P(z)/Q(z)`` through ``z^N``; requires ``Q(0) != 0``."""
    if N < 0:
        raise DomainError("need N >= 0")
    p = [to_scalar(c) for c in numer]
    q = [to_scalar(c) for c in denom]
    if not q or q[0] == 0:
        raise DomainError("denominator must have a nonzero constant term")
    out = []
    for r in range(N + 1):
        acc = p[r] if r < len(p) else Fraction(0)
        for j in range(1, min(r, len(q) - 1) + 1):
            acc -= q[j] * out[r - j]
        out.append(acc / q[0])
    return TruncatedSeries(out, N)


def genfun_constant_case(alpha: ScalarLike, v0: ScalarLike, v1: ScalarLike, N: int) -> TruncatedSeries:
    """``A(z)`` for constant ``b`` and ``W m = c``, ``alpha = c/b``, expanded through ``z^N``.

    ``A(z) = (1-z)^2 / ((1-z)^2 - alpha z) * ((v1-v0) z/(1-z)^2 + v0 z/(1-z))``
    is put over one denominator literally, without cancelling ``(1-z)^2``.
    """
    if N < 1:
        raise DomainError("need N >= 1")
    alpha, v0, v1 = to_scalar(alpha), to_scalar(v0), to_scalar(v1)
    one_minus_z_sq = [Fraction(1), Fraction(-2), Fraction(1)]
    # (v1-v0) z/(1-z)^2 + v0 z/(1-z) = [(v1-v0) z + v0 z (1-z)] / (1-z)^2
    inner = _poly_add([0, v1 - v0], [0, v0, -v0])
    numer = _poly_mul(one_minus_z_sq, inner)
    denom = _poly_mul(_poly_add(one_minus_z_sq, [0, -alpha]), one_minus_z_sq)
    return expand_rational(numer, denom, N)


def power_formula(alpha: float, v0: float, v1: float, r: int) -> float:
    """Explicit ``v_r`` for the constant case, in floating point.

    With ``beta = sqrt(4 alpha + alpha^2)`` and ``xi = 2 + alpha``,

        v_r = 2^{-r}/beta * (2((xi-beta)^{r-1} - (xi+beta)^{r-1}) v0 + ((xi+beta)^r - (xi-beta)^r) v1).

    It is evaluated in the grouped form ``(mu_+^{r-1}(mu_+ v1 - v0) -
    mu_-^{r-1}(mu_- v1 - v0)) / beta`` with ``mu_pm = (xi pm beta)/2``, which
    is algebraically the same but avoids cancelling two huge powers when the
    solution itself is small.
    """
    if r < 3:
        raise DomainError("the explicit power formula is stated for r >= 3")
    alpha, v0, v1 = float(alpha), float(v0), float(v1)
    if alpha <= 0:
        raise DomainError("alpha must be positive (the complex branch is not supported)")
    beta = math.sqrt(4 * alpha + alpha * alpha)
    xi = 2 + alpha
    mu_plus, mu_minus = (xi + beta) / 2, (xi - beta) / 2
    return (mu_plus ** (r - 1) * (mu_plus * v1 - v0) - mu_minus ** (r - 1) * (mu_minus * v1 - v0)) / beta


def falling_factorial(r: int, k: int) -> int:
    """``(r)_k = r (r-1) ... (r-k+1)``; ``(r)_0 = 1``."""
    if r < 0 or k < 0:
        raise DomainError("falling factorial needs r, k >= 0")
    out = 1
    for i in range(k):
        out *= r - i
    return out


def stirling2(gamma: int, k: int) -> int:
    """Stirling number of the second kind from the alternating sum.

    ``sum_{i=0}^k (-1)^{k-i} i^gamma / ((k-i)! i!)`` with ``0^0 = 1``.
    """
    if gamma < 0 or k < 0:
        raise DomainError("stirling2 needs gamma, k >= 0")
    total = sum(
        (Fraction((-1) ** (k - i) * i ** gamma, math.factorial(k - i) * math.factorial(i)) for i in range(k + 1)),
        Fraction(0),
    )
    if total.denominator != 1:
        raise ArithmeticError(f"non-integral Stirling sum for ({gamma}, {k}): {total}")
    return int(total)


def stirling_row(gamma: int) -> list:
    return [stirling2(gamma, k) for k in range(gamma + 1)]


def stirling_table(max_gamma: int) -> list:
    """Rows ``[S(gamma, 0), ..., S(gamma, gamma)]`` for ``gamma = 0..max_gamma``."""
    return [stirling_row(g) for g in range(max_gamma + 1)]


def _series_from_values(values: Sequence, N: int) -> TruncatedSeries:
    # A(z) has no constant term
    return TruncatedSeries([Fraction(0)] + [to_scalar(v) for v in values[1 : N + 1]], N)


def ode_identity_residual(b: ScalarLike, gamma: int, v0: ScalarLike, v1: ScalarLike, N: int) -> IdentityCheck:
    """Check the differential identity for constant ``b`` and ``W_r m_r = r^gamma``.

    ``v`` comes from ``v_{r+1} = v_r (2 + r^gamma/b) - v_{r-1}``; both sides of

        A = v0 z/(1-z) + (v1-v0) z/(1-z)^2 + (z/b)/(z-1)^2 sum_k S(gamma,k) z^k A^{(k)}

    are built as truncated series and compared through the order the
    right-hand side is still reliable.
    """
    b, v0, v1 = to_scalar(b), to_scalar(v0), to_scalar(v1)
    if gamma < 0:
        raise DomainError("gamma must be nonnegative")
    if N < gamma + 2:
        raise DomainError(f"need N >= gamma + 2 = {gamma + 2}, got {N}")
    if b <= 0:
        raise DomainError("edge weight b must be positive")
    values = [v0, v1]
    for r in range(1, N):
        values.append(values[r] * (2 + Fraction(r ** gamma) / b) - values[r - 1])
    A = _series_from_values(values, N)

    geometric = expand_rational([0, v0], [1, -1], N)
    ramp = expand_rational([0, v1 - v0], [1, -2, 1], N)
    kernel = expand_rational([0, 1 / b], [1, -2, 1], N)
    weighted = None
    deriv = A
    for k in range(gamma + 1):
        if k:
            deriv = deriv.derivative()
        term = deriv.shift(k) * stirling2(gamma, k)
        weighted = term if weighted is None else weighted + term
    rhs = geometric + ramp + kernel * weighted
    return IdentityCheck(A.max_abs_diff(rhs), min(A.order, rhs.order))


def _window_sums(chain: BirthDeathChain, r: int, n: int) -> Fraction:
    return sum((1 / chain.edge(l) for l in range(r, r + n)), Fraction(0))


def beta_deconvolve(chain: BirthDeathChain, v, n: int, N: int) -> list:
    """``[beta_{0,n}, ..., beta_{N,n}]`` from the convolution relation

        W_r m_r v_r sum_{l=r}^{r+n-1} 1/b_l = sum_{g=1}^r beta_{r-g,n} v_g,   r >= 1,

    solved as a lower-triangular system with pivot ``v_1``.  ``W`` is the
    effective potential and ``v`` a :class:`Solution` or value list known
    through ``N + 1``.
    """
    values = v.values if isinstance(v, Solution) else tuple(to_scalar(x) for x in v)
    if n < 1 or N < 0:
        raise DomainError("need n >= 1 and N >= 0")
    if len(values) < N + 2:
        raise DomainError(f"solution known through {len(values) - 1}, need {N + 1}")
    if values[1] == 0:
        raise DeconvolutionError("deconvolution undefined: v_1 = 0 is the pivot of the triangular system")
    betas = []
    for r in range(1, N + 2):
        lhs = chain.potential(r) * chain.measure(r) * values[r] * _window_sums(chain, r, n)
        acc = lhs - sum((betas[r - g] * values[g] for g in range(2, r + 1)), Fraction(0))
        betas.append(acc / values[1])
    return betas


def reconvolve(betas: Sequence, values: Sequence, r: int) -> Fraction:
    """``sum_{g=1}^r beta_{r-g} v_g``, the right side of the relation defining beta."""
    return sum((betas[r - g] * values[g] for g in range(1, r + 1)), Fraction(0))


def genfun_identity_check(chain: BirthDeathChain, v0: ScalarLike, v1: ScalarLike, N: int) -> IdentityCheck:
    """Check ``A(z)(1 - sum_n z^n B_n(z)) = C sum_r (sum_{k=1}^{r-1} 1/b_k) z^r + v_1 z/(1-z)``.

    ``B_n(z) = sum_{r>=0} beta_{r,n} z^r`` starts at ``r = 0``; ``v`` comes
    from :func:`full_history_solve` with the chain's (effective) potential.
    """
    if N < 2:
        raise DomainError("need N >= 2")
    sol = full_history_solve(chain, chain.W, v0, v1, N + 1)
    A = _series_from_values(sol.values, N)

    correction = TruncatedSeries.zero(N)
    for n in range(1, N):
        B = TruncatedSeries(beta_deconvolve(chain, sol, n, N - n), N - n)
        correction = correction + (A.truncate(N - n) * B).shift(n)
    lhs = A - correction

    harmonic = [Fraction(0)] * (N + 1)
    acc = Fraction(0)
    for r in range(2, N + 1):
        acc += 1 / chain.edge(r - 1)
        harmonic[r] = acc
    rhs = TruncatedSeries(harmonic, N) * sol.C + expand_rational([0, sol.v1], [1, -1], N)
    return IdentityCheck(lhs.max_abs_diff(rhs), min(lhs.order, rhs.order))
