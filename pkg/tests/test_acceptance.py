"""The ten acceptance criteria, each printing one ``ACCEPTANCE <n> PASS|FAIL`` line."""

import io
import math
import random
from fractions import Fraction

import pytest

from bdchain import closedform
from bdchain.chain import BirthDeathChain, SpectralParams, constant_chain, full_history_solve, solve_forward
from bdchain.classify import VerdictKind
from bdchain.cli import main
from bdchain.closedform import alpha_beta, esa_characterize
from bdchain.criteria import (
    failure_criterion,
    hamburger,
    matvec,
    operator_norm_2x2,
    trace_bound_terms,
    transfer_product,
    transfer_step,
)
from bdchain.sequences import Const, Geom
from bdchain.series import (
    beta_deconvolve,
    falling_factorial,
    genfun_constant_case,
    genfun_identity_check,
    ode_identity_residual,
    power_formula,
    stirling2,
)

from _chains import random_chain, shift_below_estimate
from conftest import FIB_SPEC

FIB = constant_chain()
G11 = BirthDeathChain(Const(1), Geom(1, Fraction(1, 11)), Const(0))


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def _chains(seed, count):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        chain = random_chain(rng)
        out.append((chain, shift_below_estimate(chain)))
    return out


def test_1_composition_sums_equal_forward_solution(report):
    bad = []
    for idx, (chain, lam) in enumerate(_chains(1001, 100)):
        values = solve_forward(chain, lam, 1, None, 21).values
        for k in range(21):
            if alpha_beta(chain, lam, k).total != values[k + 1] / values[0]:
                bad.append((idx, k))
                break
    report(1, not bad, f"100 chains, k = 0..20, exact; mismatches {bad}")


def test_2_full_history_equals_forward_solution(report):
    bad = []
    rng = random.Random(2002)
    for idx, (chain, lam) in enumerate(_chains(1001, 100)):
        v0, v1 = Fraction(rng.randint(-4, 4), rng.randint(1, 3)), Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        direct = solve_forward(chain, lam, v0, v1, 64).values
        history = full_history_solve(chain, chain.folded(lam).W, v0, v1, 64).values
        if direct != history:
            bad.append(idx)
    report(2, not bad, f"100 chains, N = 64, coefficientwise exact; mismatches {bad}")


def test_3_worked_constants(report):
    values = solve_forward(FIB, -1, 1, None, 5).values
    p1, p2 = alpha_beta(FIB, -1, 1), alpha_beta(FIB, -1, 2)
    ok = (
        closedform.theta(FIB, -1) == 2
        and values == (1, 2, 5, 13, 34, 89)
        and (p1.alpha, p1.beta) == (6, -1)
        and (p2.alpha, p2.beta) == (16, -3)
    )
    report(3, ok, f"theta = 2, v = {list(map(int, values))}, (alpha, beta)_1 = ({p1.alpha}, {p1.beta}), _2 = ({p2.alpha}, {p2.beta})")


def test_4_hamburger_and_characterization_agree(report):
    geom = BirthDeathChain(Geom(1, 2), Geom(1, Fraction(1, 2)), Const(0))
    params = SpectralParams(-1, 0)
    ham_fib, ham_geom = hamburger(FIB).kind, hamburger(geom).kind
    esa_fib, esa_geom = esa_characterize(FIB, params).kind, esa_characterize(geom, params).kind
    ok = (
        ham_fib is VerdictKind.PROVED_DIVERGES
        and ham_geom is VerdictKind.PROVED_CONVERGES
        and esa_fib is ham_fib
        and esa_geom is ham_geom
    )
    report(4, ok, f"constant chain {ham_fib.value}/{esa_fib.value}, geometric chain {ham_geom.value}/{esa_geom.value}")


def test_5_failure_criterion(report):
    failure = failure_criterion(G11, SpectralParams(-1, 0)).kind
    ham = hamburger(G11).kind
    terms_ok = trace_bound_terms(FIB, -1, 40) == [11 ** (k + 1) for k in range(41)]
    ok = failure is VerdictKind.PROVED_CONVERGES and ham is VerdictKind.PROVED_CONVERGES and terms_ok
    report(5, ok, f"failure {failure.value}, hamburger {ham.value}, constant-chain terms 11^(k+1) for k <= 40: {terms_ok}")


def test_6_transfer_matrix_fidelity(report):
    bad, worst = [], 0.0
    rng = random.Random(6006)
    for idx, (chain, lam) in enumerate(_chains(6006, 50)):
        v0, v1 = Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3), 2)
        values = solve_forward(chain, lam, v0, v1, 30).values
        for k in range(2, 31):
            if matvec(transfer_product(chain, lam, k), (values[1], values[0])) != (values[k], values[k - 1]):
                bad.append((idx, k))
                break
        for i in range(29):
            step = transfer_step(chain, lam, i)
            sigma_sq = operator_norm_2x2(step.matrix) ** 2
            worst = max(worst, (sigma_sq - float(step.gram_trace)) / float(step.gram_trace))
    ok = not bad and worst <= 1e-12
    report(6, ok, f"50 chains, k <= 30 exact (mismatches {bad}); max relative excess of sigma_max^2 over trace {worst:.3g}")


PAIRS = [(1, 2), (2, 1), (0, 1), (1, 0), (1, 1), (-1, 3), (3, -2), (Fraction(1, 2), Fraction(1, 3)), (-2, -5)]
ALPHAS = [Fraction(1, 2), 1, 2, 5]


def _constant_values(alpha, v0, v1, n):
    values = [Fraction(v0), Fraction(v1)]
    for r in range(1, n):
        values.append((2 + Fraction(alpha)) * values[r] - values[r - 1])
    return values


def test_7_constant_generating_function(report):
    exact_bad, worst = [], 0.0
    for alpha in ALPHAS:
        for v0, v1 in PAIRS:
            values = _constant_values(alpha, v0, v1, 50)
            if list(genfun_constant_case(alpha, v0, v1, 50).coefficients[1:]) != values[1:]:
                exact_bad.append((alpha, v0, v1))
            for r in range(3, 31):
                ref = float(values[r])
                if ref:
                    worst = max(worst, abs(power_formula(float(alpha), float(v0), float(v1), r) - ref) / abs(ref))
    ok = not exact_bad and worst <= 1e-9
    report(7, ok, f"4 alphas x 9 pairs exact through order 50 (mismatches {exact_bad}); power formula max rel error {worst:.3g}")


def test_8_stirling_and_ode(report):
    stirling_ok = all(
        r ** gamma == sum(stirling2(gamma, k) * falling_factorial(r, k) for k in range(gamma + 1))
        for gamma in range(9)
        for r in range(21)
    )
    bad = []
    for gamma in (1, 2, 3):
        for b in (1, 2, Fraction(1, 3)):
            check = ode_identity_residual(b, gamma, 1, 2, 24)
            if not check.holds or check.order < 24 - gamma:
                bad.append((gamma, b, check.residual, check.order))
    report(8, stirling_ok and not bad, f"Stirling gamma <= 8, r <= 20 exact: {stirling_ok}; ODE residual nonzero for {bad}")


def test_9_generating_function_identity(report):
    constant = BirthDeathChain(Const(1), Const(1), Const(1))
    sol = full_history_solve(constant, constant.W, 1, 2, 13)
    betas_ok = all(beta_deconvolve(constant, sol, n, 12 - n) == [n] + [0] * (12 - n) for n in range(1, 12))
    checks = [genfun_identity_check(constant, 1, 2, 12)]
    rng = random.Random(9009)
    while len(checks) < 11:
        chain = random_chain(rng)
        v1 = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        if v1 != 0:
            checks.append(genfun_identity_check(chain, 1, v1, 12))
    failing = [i for i, c in enumerate(checks) if not c.holds or c.order < 12]
    report(9, betas_ok and not failing, f"beta_(0,n) = n: {betas_ok}; 11 chains through order 12, failing {failing}")


def _verify_statuses(path):
    out = io.StringIO()
    code = main(["verify", "--chain", path], out, io.StringIO())
    lines = [line for line in out.getvalue().splitlines() if line.split(" ", 1)[0] in ("PASS", "FAIL", "SKIPPED")]
    return code, out.getvalue(), lines


def test_10_cli_verify_and_mutation(report, chain_file, monkeypatch):
    path = chain_file(FIB_SPEC)
    code, first, lines = _verify_statuses(path)
    _, second, _ = _verify_statuses(path)
    clean = code == 0 and len(lines) == 5 and all(line.startswith("PASS") for line in lines) and first == second

    original = closedform.unit_factor
    monkeypatch.setattr(
        closedform, "unit_factor", lambda chain, lam, c: original(chain, lam, c) + (1 if c == 3 else 0)
    )
    code_mut, _, lines_mut = _verify_statuses(path)
    caught = code_mut == 4 and lines_mut[0].startswith("FAIL alpha-beta-vs-recurrence: first mismatch at k = 4:")
    report(10, clean and caught, f"clean run all PASS and deterministic: {clean}; mutation at offset 3: {lines_mut[0]}")
