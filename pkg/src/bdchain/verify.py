"""Cross-oracle suites run by ``bdchain verify``.

Each suite recomputes one quantity two independent ways and reports the
first place they disagree.  Suites always run and report in the order of
:data:`SUITES`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import closedform
from .chain import BirthDeathChain, SpectralParams, full_history_solve, solve_forward, theta
from .classify import DEFAULT_TERMS, DivergencePolicy, Verdict
from .criteria import failure_criterion, hamburger, matmul, matvec, positive_solution_criterion, transfer_step
from .errors import CertificateError, DeconvolutionError, NoPositiveSolutionError
from .sequences import Const, format_scalar
from .series import genfun_identity_check

DEFAULT_KMAX = 12
DEFAULT_ORDER = 32


class Status(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


@dataclass(frozen=True)
class SuiteResult:
    name: str
    status: Status
    detail: str

    def line(self) -> str:
        return f"{self.status.value} {self.name}: {self.detail}"


@dataclass(frozen=True)
class VerifyConfig:
    lam: Fraction
    K: Optional[Fraction] = None
    kmax: int = DEFAULT_KMAX
    order: int = DEFAULT_ORDER
    terms: int = DEFAULT_TERMS
    cap: Optional[int] = None
    delta: Fraction = Fraction(1, 100)


def _free_pairs(chain: BirthDeathChain, lam: Fraction) -> list:
    # the normalised solution plus one with v(0) = 0
    return [(Fraction(1), theta(chain, lam)), (Fraction(0), Fraction(1))]


def alpha_beta_suite(chain: BirthDeathChain, cfg: VerifyConfig) -> SuiteResult:
    name = "alpha-beta-vs-recurrence"
    values = solve_forward(chain, cfg.lam, 1, None, cfg.kmax + 1).values
    for k in range(cfg.kmax + 1):
        pair = closedform.alpha_beta(chain, cfg.lam, k, cap=cfg.cap)
        if pair.total != values[k + 1]:
            return SuiteResult(
                name,
                Status.FAIL,
                f"first mismatch at k = {k}: alpha + beta = {format_scalar(pair.total)}, "
                f"v({k + 1})/v(0) = {format_scalar(values[k + 1])}",
            )
    return SuiteResult(name, Status.PASS, f"k = 0..{cfg.kmax} exact")


def full_history_suite(chain: BirthDeathChain, cfg: VerifyConfig) -> SuiteResult:
    name = "full-history-vs-recurrence"
    weff = chain.folded(cfg.lam).W
    for v0, v1 in _free_pairs(chain, cfg.lam):
        direct = solve_forward(chain, cfg.lam, v0, v1, cfg.order).values
        history = full_history_solve(chain, weff, v0, v1, cfg.order).values
        for r, (x, y) in enumerate(zip(direct, history)):
            if x != y:
                return SuiteResult(
                    name,
                    Status.FAIL,
                    f"first mismatch at r = {r} for (v0, v1) = ({format_scalar(v0)}, {format_scalar(v1)}): "
                    f"{format_scalar(y)} vs {format_scalar(x)}",
                )
    return SuiteResult(name, Status.PASS, f"r = 0..{cfg.order} exact for 2 initial pairs")


def genfun_suite(chain: BirthDeathChain, cfg: VerifyConfig) -> SuiteResult:
    name = "generating-function-identity"
    v1 = theta(chain, cfg.lam)
    if v1 == 0:
        return SuiteResult(name, Status.SKIPPED, "v_1 = 0 for the normalised solution; the beta deconvolution has no pivot")
    try:
        check = genfun_identity_check(chain.folded(cfg.lam), 1, v1, cfg.order)
    except DeconvolutionError as exc:
        return SuiteResult(name, Status.SKIPPED, str(exc))
    if not check.holds:
        return SuiteResult(name, Status.FAIL, f"residual {format_scalar(check.residual)} through order {check.order}")
    return SuiteResult(name, Status.PASS, f"residual 0 through order {check.order}")


def transfer_suite(chain: BirthDeathChain, cfg: VerifyConfig) -> SuiteResult:
    name = "transfer-matrix-fidelity"
    steps = [transfer_step(chain, cfg.lam, i).matrix for i in range(max(cfg.order - 1, 0))]
    for v0, v1 in _free_pairs(chain, cfg.lam):
        values = solve_forward(chain, cfg.lam, v0, v1, cfg.order).values
        product = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
        for k in range(2, cfg.order + 1):
            product = matmul(steps[k - 2], product)
            y = matvec(product, (v1, v0))
            if y != (values[k], values[k - 1]):
                return SuiteResult(
                    name,
                    Status.FAIL,
                    f"first mismatch at k = {k} for (v0, v1) = ({format_scalar(v0)}, {format_scalar(v1)})",
                )
    return SuiteResult(name, Status.PASS, f"k = 2..{cfg.order} exact for 2 initial pairs")


def _label(verdict: Verdict) -> str:
    return verdict.kind.value


def consistency_suite(chain: BirthDeathChain, cfg: VerifyConfig) -> SuiteResult:
    """PROVED verdicts of the different criteria must not contradict each other."""
    name = "criterion-consistency"
    params = SpectralParams(cfg.lam, cfg.K)
    policy = DivergencePolicy(delta=cfg.delta)
    verdicts = {"characterize": closedform.esa_characterize(chain, params, cfg.terms, policy)}
    notes = []
    try:
        verdicts["positive"] = positive_solution_criterion(chain, params, cfg.terms, policy)
    except NoPositiveSolutionError:
        notes.append("positive: no positive solution witnessed")
    if chain.W == Const(0) and cfg.lam < 0:
        verdicts["hamburger"] = hamburger(chain, cfg.terms, policy)
    failure = failure_criterion(chain, params, cfg.terms, policy)

    # only proved verdicts count; the ESA reading of each is "diverges"
    proved = {key: v.kind.diverges for key, v in verdicts.items() if v.kind.proved}
    if failure.kind.proved and not failure.kind.diverges:
        proved["failure"] = False
    if len(set(proved.values())) > 1:
        shown = ", ".join(f"{key} {'ESA' if esa else 'not ESA'}" for key, esa in proved.items())
        return SuiteResult(name, Status.FAIL, f"proved verdicts disagree: {shown}")

    ham = verdicts.get("hamburger")
    if ham is None and cfg.K is not None:
        low = chain.W.value_env(0).lo
        if low >= cfg.K:
            ham = hamburger(chain, cfg.terms, policy)
            esa = verdicts["characterize"]
            if ham.kind.proved and ham.kind.diverges and esa.kind.proved and not esa.kind.diverges:
                return SuiteResult(name, Status.FAIL, "Laplacian ESA with W >= K, yet the characterization proves failure")

    shown = ", ".join(f"{key} {_label(v)}" for key, v in verdicts.items())
    detail = f"{shown}, failure {_label(failure)}"
    if notes:
        detail += "; " + "; ".join(notes)
    return SuiteResult(name, Status.PASS, detail)


SUITES = (
    ("alpha-beta-vs-recurrence", alpha_beta_suite),
    ("full-history-vs-recurrence", full_history_suite),
    ("generating-function-identity", genfun_suite),
    ("transfer-matrix-fidelity", transfer_suite),
    ("criterion-consistency", consistency_suite),
)


def run_suites(chain: BirthDeathChain, cfg: VerifyConfig) -> list:
    """Run every suite in order.

    Domain and chain errors propagate (they are the caller's problem); a
    certificate contradicting exact terms is a bug and is reported as FAIL.
    """
    results = []
    for name, suite in SUITES:
        try:
            results.append(suite(chain, cfg))
        except CertificateError as exc:
            results.append(SuiteResult(name, Status.FAIL, f"internal inconsistency: {exc}"))
    return results
