"""Criteria for essential self-adjointness that need no composition sums.

* :func:`hamburger` for the Laplacian alone (``W = 0``);
* :func:`positive_solution_criterion`, built from a positive solution of the
  eigen-equation below the lower bound;
* :func:`failure_criterion`, a sufficient condition for *failure* obtained by
  bounding the transfer matrices ``A_i`` through their traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .chain import BirthDeathChain, SpectralParams, forward_enclosures
from .classify import (
    CAVEAT_UNVERIFIED_K,
    DEFAULT_TERMS,
    DivergencePolicy,
    Verdict,
    classify_series,
)
from .errors import DomainError, NoPositiveSolutionError
from .intervals import Interval
from .sequences import ScalarLike, to_scalar
from .tails import failure_certificate, hamburger_certificate, positive_certificate

CAVEAT_ONE_SIDED = "sufficient condition only: no conclusion"


@dataclass(frozen=True)
class TransferStep:
    """``A_i = [[1 + a_i + c_i, -c_i], [1, 0]]`` advancing ``(v_{i+1}, v_i)`` to ``(v_{i+2}, v_{i+1})``."""

    i: int
    a: Fraction
    c: Fraction

    @property
    def matrix(self) -> tuple:
        return ((1 + self.a + self.c, -self.c), (Fraction(1), Fraction(0)))

    @property
    def det(self) -> Fraction:
        return self.c

    @property
    def gram_trace(self) -> Fraction:
        """``trace(A^T A) = (1 + a + c)^2 + c^2 + 1``."""
        return (1 + self.a + self.c) ** 2 + self.c ** 2 + 1


def transfer_step(chain: BirthDeathChain, lam: ScalarLike, i: int) -> TransferStep:
    if i < 0:
        raise DomainError("i must be nonnegative")
    lam = to_scalar(lam)
    a = (chain.potential(i + 1) - lam) * chain.measure(i + 1) / chain.edge(i + 1)
    c = chain.edge(i) / chain.edge(i + 1)
    return TransferStep(i, a, c)


def matmul(A, B) -> tuple:
    return tuple(
        tuple(sum((A[r][k] * B[k][c] for k in range(2)), Fraction(0)) for c in range(2))
        for r in range(2)
    )


def matvec(A, x) -> tuple:
    return (A[0][0] * x[0] + A[0][1] * x[1], A[1][0] * x[0] + A[1][1] * x[1])


def transfer_product(chain: BirthDeathChain, lam: ScalarLike, k: int) -> tuple:
    """``A_{k-2} ... A_1 A_0`` (left multiplication), identity for ``k < 2``."""
    lam = to_scalar(lam)
    P = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    for i in range(k - 1):
        P = matmul(transfer_step(chain, lam, i).matrix, P)
    return P


def operator_norm_2x2(M: Sequence[Sequence]) -> float:
    """Largest singular value ``sqrt(lambda_max(M^T M))`` of a 2x2 matrix."""
    (p, q), (r, s) = [[Fraction(x) for x in row] for row in M]
    # entries of the symmetric matrix M^T M, kept exact until the roots
    g11 = p * p + r * r
    g12 = p * q + r * s
    g22 = q * q + s * s
    tr = g11 + g22
    det = g11 * g22 - g12 * g12
    disc = float(tr * tr - 4 * det)
    lam_max = 0.5 * (float(tr) + math.sqrt(max(disc, 0.0)))
    return math.sqrt(lam_max)


def trace_bound_terms(chain: BirthDeathChain, lam: ScalarLike, kmax: int) -> list:
    """``[prod_{i=0}^k trace(A_i^T A_i) * m_{k+2} for k in 0..kmax]``, products accumulated."""
    lam = to_scalar(lam)
    out = []
    prod = Fraction(1)
    for k in range(kmax + 1):
        prod *= transfer_step(chain, lam, k).gram_trace
        out.append(prod * chain.measure(k + 2))
    return out


def trace_bound_term(chain: BirthDeathChain, lam: ScalarLike, k: int) -> Fraction:
    if k < 0:
        raise DomainError("k must be nonnegative")
    return trace_bound_terms(chain, lam, k)[k]


def _caveats(params: SpectralParams) -> tuple:
    return () if params.semibounded_verified else (CAVEAT_UNVERIFIED_K,)


def hamburger_sums(chain: BirthDeathChain, kmax: int) -> list:
    """``S_k = sum_{r=0}^k 1/b_r`` for ``k = 0..kmax``."""
    sums, acc = [], Fraction(0)
    for r in range(kmax + 1):
        acc += 1 / chain.edge(r)
        sums.append(acc)
    return sums


def hamburger(chain: BirthDeathChain, n: int = DEFAULT_TERMS, policy: DivergencePolicy = DivergencePolicy()) -> Verdict:
    """Classify ``sum_k S_k^2 m_{k+1}``; divergence means the Laplacian is essentially self-adjoint."""
    window = 2 * n
    sums, acc = [], Interval.point(0)
    for r in range(window + 1):
        acc = acc + 1 / chain.edge(r)
        sums.append(acc)
    terms = [sums[k].square() * chain.measure(k + 1) for k in range(window)]
    return classify_series(terms, n, policy, hamburger_certificate(chain, sums))


def positive_solution_criterion(
    chain: BirthDeathChain,
    params: SpectralParams,
    n: int = DEFAULT_TERMS,
    policy: DivergencePolicy = DivergencePolicy(),
) -> Verdict:
    """Classify ``sum_r S_r^2 v_{r+1}^2 m_{r+1}`` with ``S_r = sum_{k<=r} 1/(b_k v_k v_{k+1})``.

    ``v`` is the forward solution with ``v_0 = 1`` and the equation imposed
    at 0.  It must be strictly positive on the inspected window; a value
    whose enclosure touches zero does not count as witnessed.
    """
    lam = params.lam
    window = 2 * n
    v = forward_enclosures(chain, lam, 1, None, window + 2)
    for k, value in enumerate(v):
        if value.lo <= 0:
            shown = value.lo if value.is_point else f"in [{float(value.lo):.6g}, {float(value.hi):.6g}]"
            raise NoPositiveSolutionError(
                f"no positive solution witnessed at lambda = {lam}: v({k}) = {shown}"
            )
    sums, acc = [], Interval.point(0)
    for k in range(window + 1):
        acc = acc + (chain.edge(k) * v[k] * v[k + 1]).reciprocal()
        sums.append(acc)
    terms = [sums[r].square() * v[r + 1].square() * chain.measure(r + 1) for r in range(window)]
    verdict = classify_series(terms, n, policy, positive_certificate(chain, lam, v, sums))
    return verdict.with_caveats(*_caveats(params))


def failure_criterion(
    chain: BirthDeathChain,
    params: SpectralParams,
    n: int = DEFAULT_TERMS,
    policy: DivergencePolicy = DivergencePolicy(),
) -> Verdict:
    """Classify the trace-bound series; convergence means *not* essentially self-adjoint.

    Divergence proves nothing, so any diverging verdict carries the
    one-sided caveat.
    """
    lam = to_scalar(params.lam)
    window = 2 * n
    terms, prod = [], Interval.point(1)
    for k in range(window):
        prod = prod * transfer_step(chain, lam, k).gram_trace
        terms.append(prod * chain.measure(k + 2))
    verdict = classify_series(terms, n, policy, failure_certificate(chain, lam))
    verdict = verdict.with_caveats(*_caveats(params))
    if verdict.kind.diverges:
        verdict = verdict.with_caveats(CAVEAT_ONE_SIDED)
    return verdict
