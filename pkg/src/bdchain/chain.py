"""Birth-death chains and direct solvers of the eigen-recurrence.

A chain on the vertices 0, 1, 2, ... is the triple ``(b, m, W)``: edge weights
``b_k = b(k, k+1) > 0``, vertex measure ``m_k > 0`` and a potential ``W_k`` of
any sign.  The Schrodinger operator acts by

    ((Delta + W) v)(r) = (b_r (v_r - v_{r+1}) + b_{r-1} (v_r - v_{r-1})) / m_r + W_r v_r

where the ``b_{r-1}`` term is absent at ``r = 0``.  All arithmetic here is
exact over :class:`~fractions.Fraction`; only :func:`estimate_lower_bound`
works in floating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import DomainError, InvalidChainError
from .intervals import Interval
from .sequences import (
    Const,
    ScalarLike,
    SequenceSpec,
    cached_value,
    shift_sequence,
    to_scalar,
)


@dataclass(frozen=True)
class BirthDeathChain:
    b: SequenceSpec
    m: SequenceSpec
    W: SequenceSpec

    def edge(self, k: int) -> Fraction:
        """``b(k, k+1)``; raises if not strictly positive."""
        value = cached_value(self.b, k)
        if value <= 0:
            raise InvalidChainError(f"edge weight b({k},{k + 1}) = {value} is not positive")
        return value

    def measure(self, k: int) -> Fraction:
        value = cached_value(self.m, k)
        if value <= 0:
            raise InvalidChainError(f"measure m({k}) = {value} is not positive")
        return value

    def potential(self, k: int) -> Fraction:
        return cached_value(self.W, k)

    def validate(self, n: int) -> None:
        """Check positivity of ``b`` and ``m`` on indices ``0..n``."""
        for k in range(n + 1):
            self.edge(k)
            self.measure(k)

    def with_potential(self, W: SequenceSpec) -> BirthDeathChain:
        return BirthDeathChain(self.b, self.m, W)

    def folded(self, lam: ScalarLike) -> BirthDeathChain:
        """The same chain with ``W`` replaced by the effective potential ``W - lam``."""
        return self.with_potential(shift_sequence(self.W, -to_scalar(lam)))

    def summary_lines(self) -> list:
        return [f"b: {self.b.to_text()}", f"m: {self.m.to_text()}", f"W: {self.W.to_text()}"]


def constant_chain(b=1, m=1, W=0) -> BirthDeathChain:
    return BirthDeathChain(Const(b), Const(m), Const(W))


@dataclass(frozen=True)
class SpectralParams:
    lam: Fraction
    K: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "lam", to_scalar(self.lam))
        if self.K is not None:
            object.__setattr__(self, "K", to_scalar(self.K))
            if not self.lam < self.K:
                raise DomainError(f"spectral shift lambda = {self.lam} must lie below K = {self.K}")

    @property
    def semibounded_verified(self) -> bool:
        return self.K is not None


@dataclass(frozen=True)
class Solution:
    values: tuple
    lam: Fraction
    v0: Fraction
    v1: Fraction
    C: Fraction
    imposed_at_zero: bool

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]


def laplacian(chain: BirthDeathChain, f: Sequence, r: int) -> Fraction:
    """``(Delta f)(r)``; needs ``f`` at ``r-1`` (if r > 0), ``r`` and ``r+1``."""
    if r < 0:
        raise DomainError(f"negative index {r}")
    if len(f) < r + 2:
        raise DomainError(f"sequence of length {len(f)} too short for index {r}")
    flow = chain.edge(r) * (f[r] - f[r + 1])
    if r >= 1:
        flow += chain.edge(r - 1) * (f[r] - f[r - 1])
    return flow / chain.measure(r)


def apply_schrodinger(chain: BirthDeathChain, v: Sequence, r: int, lam: ScalarLike) -> Fraction:
    """``((Delta + W - lam) v)(r)`` exactly."""
    lam = to_scalar(lam)
    return laplacian(chain, v, r) + (chain.potential(r) - lam) * v[r]


def theta(chain: BirthDeathChain, lam: ScalarLike) -> Fraction:
    """Boundary constant: the ratio ``v_1 / v_0`` forced by the equation at vertex 0."""
    lam = to_scalar(lam)
    return 1 + (chain.potential(0) - lam) * chain.measure(0) / chain.edge(0)


def _step_coefficients(chain: BirthDeathChain, lam: Fraction, r: int):
    """``(P, c)`` with ``v_{r+1} = P v_r - c v_{r-1}``."""
    c = chain.edge(r - 1) / chain.edge(r)
    a = (chain.potential(r) - lam) * chain.measure(r) / chain.edge(r)
    return 1 + a + c, c


def _forward_integers(chain: BirthDeathChain, lam: Fraction, v0: Fraction, v1: Fraction, n: int) -> list:
    """Unreduced ``(numerator, denominator)`` pairs of ``v_0 .. v_n``.

    Consecutive values share a denominator that is only ever multiplied, so
    no step needs a gcd of the (fast-growing) integers.
    """
    den = math.lcm(v0.denominator, v1.denominator)
    prev, here = v0.numerator * (den // v0.denominator), v1.numerator * (den // v1.denominator)
    out = [(prev, den), (here, den)]
    for r in range(1, n):
        P, c = _step_coefficients(chain, lam, r)
        scale = math.lcm(P.denominator, c.denominator)
        nxt = P.numerator * (scale // P.denominator) * here - c.numerator * (scale // c.denominator) * prev
        prev, here, den = here * scale, nxt, den * scale
        out.append((here, den))
    return out


def solve_forward(
    chain: BirthDeathChain,
    lam: ScalarLike,
    v0: ScalarLike,
    v1: Optional[ScalarLike] = None,
    n: int = 1,
) -> Solution:
    """Solve ``(Delta + W - lam) v = 0`` by forward substitution up to ``v_n``.

    Without ``v1`` the equation is also imposed at ``r = 0``, which fixes
    ``v1 = theta * v0``.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    lam, v0 = to_scalar(lam), to_scalar(v0)
    imposed = v1 is None
    v1 = theta(chain, lam) * v0 if imposed else to_scalar(v1)
    values = tuple(Fraction(num, den) for num, den in _forward_integers(chain, lam, v0, v1, n))
    chain.edge(n)
    chain.measure(n)
    C = chain.edge(0) * (v1 - v0)
    return Solution(values, lam, v0, v1, C, imposed)


def forward_enclosures(
    chain: BirthDeathChain,
    lam: ScalarLike,
    v0: ScalarLike,
    v1: Optional[ScalarLike] = None,
    n: int = 1,
) -> list:
    """Tight interval enclosures of the values :func:`solve_forward` would return.

    The recurrence is still run exactly; only the final division of each
    value is replaced by an outward-rounded enclosure.  This is what the
    series criteria use on long windows, where reducing every exact value
    costs far more than the rest of the classification.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    lam, v0 = to_scalar(lam), to_scalar(v0)
    v1 = theta(chain, lam) * v0 if v1 is None else to_scalar(v1)
    out = [Interval.from_ratio(num, den) for num, den in _forward_integers(chain, lam, v0, v1, n)]
    chain.edge(n)
    chain.measure(n)
    return out


def full_history_solve(
    chain: BirthDeathChain,
    weff: SequenceSpec,
    v0: ScalarLike,
    v1: ScalarLike,
    n: int,
) -> Solution:
    """Solve through the full-history form of the recurrence.

    ``v(r+1) = v(1) + C sum_{k=1}^r 1/b_k + sum_{k=1}^r (1/b_k) sum_{n=1}^k v(n) weff(n) m(n)``
    with ``C = b_0 (v(1) - v(0))``; ``weff`` already contains the spectral
    shift.  The outer sum is re-evaluated literally for every ``r``; the inner
    sums are kept as they are completed, since each needs only values
    already known.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    v0, v1 = to_scalar(v0), to_scalar(v1)
    C = chain.edge(0) * (v1 - v0)
    values = [v0, v1]
    inner = [Fraction(0)]  # inner[k] = sum_{j=1}^k v_j weff_j m_j
    for r in range(1, n):
        inner.append(inner[-1] + values[r] * cached_value(weff, r) * chain.measure(r))
        outer_c = sum((1 / chain.edge(k) for k in range(1, r + 1)), Fraction(0))
        outer_w = sum((inner[k] / chain.edge(k) for k in range(1, r + 1)), Fraction(0))
        values.append(v1 + C * outer_c + outer_w)
    chain.edge(n)
    chain.measure(n)
    lam = Fraction(0)
    return Solution(tuple(values), lam, v0, v1, C, False)


def l2_norm_partial(sol, chain: BirthDeathChain, n: int) -> Fraction:
    """``sum_{k=0}^n v_k^2 m_k``."""
    values = sol.values if isinstance(sol, Solution) else sol
    if len(values) < n + 1:
        raise DomainError(f"solution known through {len(values) - 1}, need {n}")
    return sum((values[k] ** 2 * chain.measure(k) for k in range(n + 1)), Fraction(0))


def energy_form(chain: BirthDeathChain, phi: Sequence, psi: Sequence) -> Fraction:
    """``Q(phi, psi) = sum_r b_r (phi_r - phi_{r+1}) (psi_r - psi_{r+1})``.

    ``phi`` and ``psi`` are finite lists, read as zero beyond their length.
    """
    n = max(len(phi), len(psi))
    f = [to_scalar(x) for x in phi] + [Fraction(0)] * (n + 1 - len(phi))
    g = [to_scalar(x) for x in psi] + [Fraction(0)] * (n + 1 - len(psi))
    return sum(
        (chain.edge(r) * (f[r] - f[r + 1]) * (g[r] - g[r + 1]) for r in range(n)),
        Fraction(0),
    )


def form_matrix(chain: BirthDeathChain, n: int):
    """Tridiagonal data ``(diag, off, weights)`` of the form on ``{0..n}``.

    ``diag[k] = b_{k-1} + b_k + W_k m_k`` (no ``b_{-1}``), ``off[k] = -b_k``
    and ``weights[k] = m_k``.  The last diagonal entry carries the boundary
    edge ``b_n`` to vertex ``n+1`` where the test function vanishes.
    """
    diag, off, weights = [], [], []
    for k in range(n + 1):
        d = chain.edge(k) + chain.potential(k) * chain.measure(k)
        if k >= 1:
            d += chain.edge(k - 1)
        diag.append(d)
        weights.append(chain.measure(k))
        if k < n:
            off.append(-chain.edge(k))
    return diag, off, weights


def _count_below(diag, off, weights, x: float) -> int:
    """Number of pencil eigenvalues below ``x`` (Sturm count via LDL^T)."""
    count = 0
    d = 1.0
    for k in range(len(diag)):
        d_k = diag[k] - x * weights[k]
        if k > 0:
            d_k -= off[k - 1] ** 2 / d
        if d_k == 0.0:
            d_k = -1e-300
        if d_k < 0:
            count += 1
        d = d_k
    return count


def estimate_lower_bound(chain: BirthDeathChain, n: int, rtol: float = 1e-12) -> float:
    """Smallest eigenvalue of the form restricted to functions supported on ``{0..n}``.

    The generalized problem ``H x = mu M x`` with ``M = diag(m)`` is solved by
    bisection on Sturm counts.  Finite sections only bound the optimal lower
    bound from above, so the value is advisory: it can suggest a ``lam`` but
    never certifies ``lam < K``.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    diag_q, off_q, w_q = form_matrix(chain, n)
    diag = [float(d) for d in diag_q]
    off = [float(o) for o in off_q]
    weights = [float(w) for w in w_q]
    # Gershgorin discs of the symmetrically scaled matrix M^{-1/2} H M^{-1/2}
    lo, hi = math.inf, -math.inf
    for k in range(n + 1):
        radius = 0.0
        if k > 0:
            radius += abs(off[k - 1]) / math.sqrt(weights[k - 1] * weights[k])
        if k < n:
            radius += abs(off[k]) / math.sqrt(weights[k] * weights[k + 1])
        centre = diag[k] / weights[k]
        lo, hi = min(lo, centre - radius), max(hi, centre + radius)
    while hi - lo > rtol * max(abs(lo), abs(hi), 1e-300):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _count_below(diag, off, weights, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
