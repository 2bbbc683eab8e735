"""Closed-form solution of the eigen-recurrence as sums over compositions.

For the solution with ``v_1 = theta * v_0``

    v(k+1) = (alpha_k + beta_k) v(0),

where ``alpha_k`` sums over the compositions of ``k`` into parts 1 and 2 and
``beta_k`` over the compositions of ``k+1`` whose last part is 2.  With the
offsets ``c = k - (l_1 + ... + l_i)`` a part ``l_i = 1`` contributes

    1 + (b_c + (W_{c+1} - lam) m_{c+1}) / b_{c+1}

and a part ``l_i = 2`` contributes ``-b_{c+1} / b_{c+2}``.  ``alpha_k``
carries the extra prefactor ``theta``; ``alpha_0 = theta`` and ``beta_0 = 0``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .chain import BirthDeathChain, SpectralParams, forward_enclosures, solve_forward, theta
from .classify import (
    CAVEAT_UNVERIFIED_K,
    DEFAULT_TERMS,
    DivergencePolicy,
    Verdict,
    classify_series,
)
from .errors import CapExceededError, DomainError
from .sequences import ScalarLike, to_scalar
from .tails import characterization_certificate

DEFAULT_CAP = 30
CAP_ENV = "BDCHAIN_COMPOSITION_CAP"


def composition_cap() -> int:
    """Enumeration cap: ``$BDCHAIN_COMPOSITION_CAP`` if set, else 30."""
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{CAP_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class Composition:
    parts: tuple
    target: int

    def __post_init__(self):
        if any(p not in (1, 2) for p in self.parts):
            raise DomainError(f"parts must be 1 or 2: {self.parts}")
        if sum(self.parts) != self.target:
            raise DomainError(f"parts {self.parts} do not sum to {self.target}")

    def offsets(self, k: int) -> list:
        """``c_{k,i} = k - (l_1 + ... + l_i)`` for ``i = 1..r``."""
        out, acc = [], 0
        for p in self.parts:
            acc += p
            out.append(k - acc)
        return out


@dataclass(frozen=True)
class CoefficientPair:
    k: int
    alpha: Fraction
    beta: Fraction
    theta: Fraction

    @property
    def total(self) -> Fraction:
        return self.alpha + self.beta


def enumerate_compositions(k: int, require_last_two: bool = False) -> list:
    """All compositions of ``k`` into parts 1 and 2, lexicographically ordered."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k == 0:
        return []
    out = []

    def extend(prefix, remaining):
        if remaining == 0:
            if not require_last_two or prefix[-1] == 2:
                out.append(Composition(tuple(prefix), k))
            return
        for part in (1, 2):
            if part <= remaining:
                prefix.append(part)
                extend(prefix, remaining - part)
                prefix.pop()

    extend([], k)
    return out


def unit_factor(chain: BirthDeathChain, lam: Fraction, c: int) -> Fraction:
    """Contribution of a part equal to 1 at offset ``c``."""
    return 1 + (chain.edge(c) + (chain.potential(c + 1) - lam) * chain.measure(c + 1)) / chain.edge(c + 1)


def pair_factor(chain: BirthDeathChain, lam: Fraction, c: int) -> Fraction:
    """Contribution of a part equal to 2 at offset ``c``."""
    return -chain.edge(c + 1) / chain.edge(c + 2)


def composition_weight(chain: BirthDeathChain, lam: ScalarLike, comp: Composition, k: int) -> Fraction:
    """Product of the part factors of one composition, offsets taken relative to ``k``."""
    lam = to_scalar(lam)
    weight = Fraction(1)
    for part, c in zip(comp.parts, comp.offsets(k)):
        weight *= unit_factor(chain, lam, c) if part == 1 else pair_factor(chain, lam, c)
    return weight


def _factor_tables(chain, lam, k):
    # unit parts occur at offsets 0..k-1, pair parts at -1..k-2
    units = {c: unit_factor(chain, lam, c) for c in range(0, k)}
    pairs = {c: pair_factor(chain, lam, c) for c in range(-1, k - 1)}
    return units, pairs


def _composition_sum(units, pairs, k: int, last_two: bool) -> Fraction:
    """Sum of composition weights by depth-first enumeration.

    Without ``last_two`` the compositions of ``k`` are walked; with it the
    compositions of ``k+1`` ending in 2.  Every composition is visited once;
    a running numerator/denominator pair is carried down the walk so that the
    factors shared by a common prefix are multiplied only once.
    """
    unit_nd = {c: (f.numerator, f.denominator) for c, f in units.items()}
    pair_nd = {c: (f.numerator, f.denominator) for c, f in pairs.items()}
    denom = 1
    for f in list(units.values()) + list(pairs.values()):
        denom = denom * f.denominator
    total = 0
    # c is the offset after the parts placed so far: k minus their sum
    stack = [(k, 1, 1)]
    while stack:
        c, num, den = stack.pop()
        if not last_two:
            if c == 0:
                total += num * (denom // den)
                continue
            if c >= 1:
                un, ud = unit_nd[c - 1]
                stack.append((c - 1, num * un, den * ud))
            if c >= 2:
                pn, pd = pair_nd[c - 2]
                stack.append((c - 2, num * pn, den * pd))
        else:
            # remaining sum is c + 1; the walk must finish with a 2 at offset -1
            if c - 1 >= 1:
                un, ud = unit_nd[c - 1]
                stack.append((c - 1, num * un, den * ud))
            if c - 2 == -1:
                pn, pd = pair_nd[-1]
                total += num * pn * (denom // (den * pd))
            elif c - 2 >= 1:
                pn, pd = pair_nd[c - 2]
                stack.append((c - 2, num * pn, den * pd))
    return Fraction(total, denom)


def alpha_beta(
    chain: BirthDeathChain,
    lam: ScalarLike,
    k: int,
    cap: Optional[int] = None,
    method: str = "enumerate",
) -> CoefficientPair:
    """``(alpha_k, beta_k)`` and ``theta``.

    ``method="enumerate"`` walks the compositions and is capped (default
    30, see :func:`composition_cap`).  ``method="recurrence"`` uses the
    equivalent pair of linear recurrences and has no cap; it is verified
    against enumeration in the test suite.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    lam = to_scalar(lam)
    th = theta(chain, lam)
    if k == 0:
        return CoefficientPair(0, th, Fraction(0), th)
    if method == "recurrence":
        return alpha_beta_table(chain, lam, k, method="recurrence")[k]
    if method != "enumerate":
        raise DomainError(f"unknown method {method!r}")
    cap = composition_cap() if cap is None else cap
    if k > cap:
        raise CapExceededError(
            f"k = {k} exceeds the composition enumeration cap {cap} "
            f"(raise it with --cap or ${CAP_ENV})"
        )
    chain.edge(k + 1)
    units, pairs = _factor_tables(chain, lam, k)
    alpha = th * _composition_sum(units, pairs, k, last_two=False)
    beta = _composition_sum(units, pairs, k, last_two=True)
    return CoefficientPair(k, alpha, beta, th)


def alpha_beta_table(
    chain: BirthDeathChain,
    lam: ScalarLike,
    kmax: int,
    cap: Optional[int] = None,
    method: str = "enumerate",
) -> list:
    """``[alpha_beta(chain, lam, k) for k in 0..kmax]``.

    The recurrence method exploits that ``alpha_k / theta`` and ``beta_k``
    are the values at ``k+1`` of the solutions started from ``(0, 1)`` and
    ``(1, 0)``: paths through the composition graph either stop at vertex 1
    or jump from 2 to 0 with a final part 2.
    """
    lam = to_scalar(lam)
    if method == "enumerate":
        return [alpha_beta(chain, lam, k, cap=cap) for k in range(kmax + 1)]
    if method != "recurrence":
        raise DomainError(f"unknown method {method!r}")
    th = theta(chain, lam)
    p = solve_forward(chain, lam, 0, 1, max(kmax + 1, 1)).values
    q = solve_forward(chain, lam, 1, 0, max(kmax + 1, 1)).values
    out = [CoefficientPair(0, th, Fraction(0), th)]
    for k in range(1, kmax + 1):
        out.append(CoefficientPair(k, th * p[k + 1], q[k + 1], th))
    return out


def characterization_term(chain: BirthDeathChain, lam: ScalarLike, k: int, method: str = "enumerate") -> Fraction:
    """``(alpha_k + beta_k)^2 m_{k+1}``."""
    pair = alpha_beta(chain, lam, k, method=method)
    return pair.total ** 2 * chain.measure(k + 1)


def esa_characterize(
    chain: BirthDeathChain,
    params: SpectralParams,
    n: int = DEFAULT_TERMS,
    policy: DivergencePolicy = DivergencePolicy(),
) -> Verdict:
    """Classify ``sum_k (alpha_k + beta_k)^2 m_{k+1}``; divergence means essentially self-adjoint.

    The ``2n`` inspected terms exceed any practical enumeration cap.  Since
    ``alpha_k + beta_k = v(k+1)`` for the solution with ``v(0) = 1`` (the
    identity the enumeration is tested against), the sums are read off the
    forward solution, carried as tight enclosures.
    """
    lam = params.lam
    window = 2 * n
    values = forward_enclosures(chain, lam, 1, None, window + 1)
    terms = [values[k + 1].square() * chain.measure(k + 1) for k in range(window)]
    verdict = classify_series(terms, n, policy, characterization_certificate(chain, lam, values))
    if not params.semibounded_verified:
        verdict = verdict.with_caveats(CAVEAT_UNVERIFIED_K)
    return verdict
