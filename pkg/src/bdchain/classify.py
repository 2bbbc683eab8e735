"""Deciding divergence of a nonnegative series from finitely many terms.

A finite window can never settle an infinite series on its own.  A verdict is
therefore *proved* only when a tail certificate is supplied: a callable that,
given a start index ``k0``, returns an interval guaranteed to contain every
ratio ``term(k+1)/term(k)`` with ``k >= k0``.  Such certificates come from the
structure of the sequence families (see :mod:`bdchain.tails`).

* ratios bounded below by 1 and ``term(k0) > 0``: the terms never drop
  below ``eps = term(k0)``, so the series diverges;
* ratios bounded above by ``q < 1``: geometric majorant, the series converges.

Everything else is classified heuristically by comparing the partial sums
``S_N`` and ``S_2N``.

Terms may be exact rationals or :class:`~bdchain.intervals.Interval`
enclosures.  Every check that feeds a proof is made on the safe side of the
enclosure; exact terms are just point intervals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import BDChainError, CertificateError
from .intervals import Interval


class VerdictKind(enum.Enum):
    PROVED_DIVERGES = "PROVED_DIVERGES"
    PROVED_CONVERGES = "PROVED_CONVERGES"
    HEURISTIC_DIVERGES = "HEURISTIC_DIVERGES"
    HEURISTIC_CONVERGES = "HEURISTIC_CONVERGES"

    @property
    def diverges(self) -> bool:
        return self in (VerdictKind.PROVED_DIVERGES, VerdictKind.HEURISTIC_DIVERGES)

    @property
    def proved(self) -> bool:
        return self in (VerdictKind.PROVED_DIVERGES, VerdictKind.PROVED_CONVERGES)


@dataclass(frozen=True)
class TailBound:
    """Ratio enclosure valid for every ``k >= start`` plus a human-readable reason."""

    start: int
    ratio: Interval
    reason: str


TailCertificate = Callable[[int], Optional[TailBound]]


@dataclass(frozen=True)
class Evidence:
    """Partial sums are enclosures; they are points whenever the terms were exact."""

    partial_sum_n: Interval
    partial_sum_2n: Interval
    terms_inspected: int
    bound_kind: Optional[str] = None  # "lower" (eps) or "ratio" (q)
    bound_value: Optional[Fraction] = None
    start_index: Optional[int] = None
    justification: str = ""


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    evidence: Evidence
    caveats: tuple = ()
    terms: tuple = field(default=(), repr=False, compare=False)

    def with_caveats(self, *extra: str) -> Verdict:
        caveats = self.caveats + tuple(c for c in extra if c not in self.caveats)
        return Verdict(self.kind, self.evidence, caveats, self.terms)


@dataclass(frozen=True)
class DivergencePolicy:
    delta: Fraction = Fraction(1, 100)
    use_certificates: bool = True


DEFAULT_TERMS = 256
CAVEAT_UNVERIFIED_K = "unverified semi-boundedness: no lower bound K supplied"


def _start_candidates(window: int):
    k = 0
    seen = []
    while k <= window - 2:
        seen.append(k)
        k = 2 * k if k else 1
    if window - 2 >= 0 and window - 2 not in seen:
        seen.append(window - 2)
    return seen


def _as_term(k: int, t) -> Interval:
    term = t if isinstance(t, Interval) else Interval.point(t)
    if term.hi < 0:
        raise BDChainError(f"negative term {term.hi} at index {k}: nonnegative series expected")
    if term.lo < 0:
        # rounding slack around a term that is nonnegative by construction
        term = Interval(Fraction(0), term.hi)
    return term


def classify_series(
    term_fn: Callable[[int], object] | Sequence,
    n: int = DEFAULT_TERMS,
    policy: DivergencePolicy = DivergencePolicy(),
    certificate: Optional[TailCertificate] = None,
) -> Verdict:
    """Classify ``sum_k term(k)`` from the terms ``0 .. 2n-1``.

    ``term_fn`` is either a callable or an already computed sequence of at
    least ``2n`` terms (rationals or enclosures).  Terms must be nonnegative.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    window = 2 * n
    if callable(term_fn):
        raw = [term_fn(k) for k in range(window)]
    else:
        if len(term_fn) < window:
            raise ValueError(f"need {window} terms, got {len(term_fn)}")
        raw = term_fn[:window]
    terms = [_as_term(k, t) for k, t in enumerate(raw)]

    s_n = Interval.point(0)
    for t in terms[:n]:
        s_n = s_n + t
    s_2n = s_n
    for t in terms[n:]:
        s_2n = s_2n + t

    if certificate is not None and policy.use_certificates:
        for k0 in _start_candidates(window):
            bound = certificate(k0)
            if bound is None:
                continue
            proved = _try_prove(terms, bound, s_n, s_2n)
            if proved is not None:
                return proved

    mid_n, mid_2n = s_n.midpoint, s_2n.midpoint
    if mid_n == 0:
        diverging = mid_2n > 0
    else:
        diverging = mid_2n > (1 + policy.delta) * mid_n
    kind = VerdictKind.HEURISTIC_DIVERGES if diverging else VerdictKind.HEURISTIC_CONVERGES
    return Verdict(kind, Evidence(s_n, s_2n, window), (), tuple(terms))


def _try_prove(terms, bound: TailBound, s_n, s_2n) -> Optional[Verdict]:
    k0 = bound.start
    if k0 > len(terms) - 2:
        return None
    window = len(terms)
    env = bound.ratio
    if env.lo >= 1 and terms[k0].lo > 0:
        for k in range(k0, window):
            if terms[k].hi < terms[k0].lo:
                raise CertificateError(
                    f"certificate claims nondecreasing terms from {k0}, but term {k} < term {k0}"
                )
        # witnessed on the window; exact terms give eps = term(k0)
        eps = min(t.lo for t in terms[k0:])
        evidence = Evidence(s_n, s_2n, window, "lower", eps, k0, bound.reason)
        return Verdict(VerdictKind.PROVED_DIVERGES, evidence, (), tuple(terms))
    if env.hi < 1:
        q = Fraction(env.hi)
        for k in range(k0, window - 1):
            if terms[k + 1].lo > q * terms[k].hi:
                raise CertificateError(
                    f"certificate claims ratio <= {q} from {k0}, violated at {k}"
                )
        evidence = Evidence(s_n, s_2n, window, "ratio", q, k0, bound.reason)
        return Verdict(VerdictKind.PROVED_CONVERGES, evidence, (), tuple(terms))
    return None
