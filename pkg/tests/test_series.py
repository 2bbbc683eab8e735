import math
import random
from fractions import Fraction

import pytest

from bdchain.chain import BirthDeathChain, constant_chain, full_history_solve, solve_forward
from bdchain.errors import DeconvolutionError, DomainError
from bdchain.sequences import Const
from bdchain.series import (
    TruncatedSeries,
    beta_deconvolve,
    expand_rational,
    falling_factorial,
    genfun_constant_case,
    genfun_identity_check,
    ode_identity_residual,
    power_formula,
    reconvolve,
    stirling2,
    stirling_row,
    stirling_table,
)

from _chains import random_chain


def _constant_values(alpha, v0, v1, n):
    values = [Fraction(v0), Fraction(v1)]
    for r in range(1, n):
        values.append((2 + Fraction(alpha)) * values[r] - values[r - 1])
    return values


def test_truncated_series_arithmetic():
    a = TruncatedSeries([1, 2, 3], 2)
    b = TruncatedSeries([0, 1], 4)
    assert (a * b).order == 2
    assert (a * b).coefficients == (0, 1, 2)
    assert (a + b).coefficients == (1, 3, 3)
    assert (a - a) == TruncatedSeries.zero(2)
    assert a.derivative().coefficients == (2, 6) and a.derivative().order == 1
    assert a.shift(2).coefficients == (0, 0, 1, 2, 3) and a.shift(2).order == 4
    assert (3 * a)[2] == 9
    with pytest.raises(DomainError):
        a[3]


def test_expand_rational_geometric():
    assert expand_rational([1], [1, -1], 5).coefficients == (1,) * 6
    assert expand_rational([0, 1], [1, -2, 1], 4).coefficients == (0, 1, 2, 3, 4)
    with pytest.raises(DomainError):
        expand_rational([1], [0, 1], 3)


def test_genfun_constant_case_examples():
    # alpha = 1 with (v0, v1) = (1, 2) is the Fibonacci-like chain 1, 2, 5, 13, ...
    assert genfun_constant_case(1, 1, 2, 5).coefficients[1:] == (2, 5, 13, 34, 89)
    rng = random.Random(0)
    for alpha in (Fraction(1, 2), 1, 2, 5):
        v0, v1 = Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3), 2)
        coeffs = genfun_constant_case(alpha, v0, v1, 40).coefficients
        assert list(coeffs[1:]) == _constant_values(alpha, v0, v1, 40)[1:]


def test_power_formula_prefactor_reading():
    # v0 = 1, v1 = 2, alpha = 1: v3 = 13
    assert power_formula(1, 1, 2, 3) == pytest.approx(13, rel=1e-12)
    beta = math.sqrt(5)
    assert power_formula(1, 1, 2, 3) * math.sqrt(beta) != pytest.approx(13, rel=1e-3)


def test_power_formula_small_solution():
    # alpha = 1/2, v0 = 2, v1 = 1 decays like 2^-r
    for r in range(3, 31):
        exact = _constant_values(Fraction(1, 2), 2, 1, r)[r]
        assert power_formula(0.5, 2, 1, r) == pytest.approx(float(exact), rel=1e-9)


def test_power_formula_domain():
    with pytest.raises(DomainError):
        power_formula(1, 1, 2, 2)
    with pytest.raises(DomainError):
        power_formula(-1, 1, 2, 5)


def _set_partitions(n, k):
    # count partitions of {0..n-1} into k nonempty blocks by assigning restricted growth strings
    def walk(i, blocks):
        if i == n:
            return 1 if blocks == k else 0
        total = 0
        for block in range(min(blocks + 1, k)):
            total += walk(i + 1, max(blocks, block + 1))
        return total

    return walk(0, 0)


def test_stirling_matches_set_partition_count():
    for gamma in range(8):
        for k in range(gamma + 1):
            assert stirling2(gamma, k) == _set_partitions(gamma, k)
    assert stirling_row(4) == [0, 1, 7, 6, 1]
    assert stirling_table(2) == [[1], [0, 1], [0, 1, 1]]


def test_stirling_expands_powers():
    for gamma in range(9):
        for r in range(21):
            assert r ** gamma == sum(stirling2(gamma, k) * falling_factorial(r, k) for k in range(gamma + 1))


def test_falling_factorial():
    assert falling_factorial(5, 0) == 1
    assert falling_factorial(5, 2) == 20
    assert falling_factorial(3, 4) == 0
    with pytest.raises(DomainError):
        falling_factorial(-1, 2)


@pytest.mark.parametrize("gamma", [1, 2, 3])
@pytest.mark.parametrize("b", [1, 2, Fraction(1, 3)])
def test_ode_identity(gamma, b):
    check = ode_identity_residual(b, gamma, 1, 3, 24)
    assert check.holds and check.order >= 24 - gamma


def test_ode_values_match_the_chain_solver():
    # W_r m_r = r^gamma with m = 1 and lambda = 0
    from bdchain.sequences import Poly

    chain = BirthDeathChain(Const(2), Const(1), Poly((0, 0, 1)))
    values = solve_forward(chain, 0, 1, 3, 12).values
    ref = [Fraction(1), Fraction(3)]
    for r in range(1, 12):
        ref.append(ref[r] * (2 + Fraction(r * r, 2)) - ref[r - 1])
    assert list(values) == ref


def test_ode_identity_needs_enough_order():
    with pytest.raises(DomainError):
        ode_identity_residual(1, 3, 1, 1, 4)


def test_deconvolution_round_trip():
    chain = random_chain(random.Random(3))
    sol = full_history_solve(chain, chain.W, 1, 2, 16)
    for n in (1, 3, 7):
        betas = beta_deconvolve(chain, sol, n, 14)
        for r in range(1, 16):
            lhs = chain.potential(r) * chain.measure(r) * sol.values[r] * sum(1 / chain.edge(l) for l in range(r, r + n))
            assert reconvolve(betas, sol.values, r) == lhs


def test_constant_chain_beta_is_n():
    chain = BirthDeathChain(Const(1), Const(1), Const(1))
    sol = full_history_solve(chain, chain.W, 1, 2, 10)
    for n in range(1, 5):
        assert beta_deconvolve(chain, sol, n, 8) == [n] + [0] * 8


def test_deconvolution_needs_pivot():
    chain = constant_chain()
    with pytest.raises(DeconvolutionError):
        beta_deconvolve(chain, [1, 0, 1, 2, 3], 1, 2)


def test_genfun_identity():
    assert genfun_identity_check(constant_chain().folded(-1), 1, 2, 12).holds
    rng = random.Random(6)
    for _ in range(3):
        chain = random_chain(rng)
        check = genfun_identity_check(chain, 1, Fraction(rng.randint(1, 5), 3), 12)
        assert check.holds and check.order == 12
