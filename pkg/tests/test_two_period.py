import math

import pytest
from hypothesis import given, settings, strategies as st

from insider_disclosure.errors import ValidationError
from insider_disclosure.params import ModelParams, Regime
from insider_disclosure.sequential import solution_from_two_period, value_function
from insider_disclosure.two_period import (compare_regimes, cubic_m, expected_profit_no_disclosure,
                                           rational_benchmark, solve_cubic_m,
                                           solve_disclosure_two_period, solve_no_disclosure)

from oracle import bisect, no_disclosure_moments, path_moments

Ks = st.floats(0.01, 1.99)


def unit(K, **kw):
    return ModelParams(K=K, N=2, **kw)


# --- cubic ------------------------------------------------------------------

@pytest.mark.parametrize("K,m", [(0.5, 0.9235), (1.5, 1.6257)])
def test_cubic_published_roots(K, m):
    assert solve_cubic_m(K).m == pytest.approx(m, abs=5e-5)


def test_cubic_rational_root_matches_bisection():
    ref = bisect(lambda m: m**3 - 4 * m**2 - 4 * m + 8, 0.0, 2.0, tol=1e-14)
    assert ref == pytest.approx(1.1099, abs=5e-5)
    assert solve_cubic_m(1.0).m == pytest.approx(ref, abs=1e-12)


@given(Ks)
def test_cubic_root_in_bracket(K):
    r = solve_cubic_m(K)
    assert 0.0 < r.m < 2.0 / (2.0 - K)
    assert abs(r.residual) < 1e-12
    assert r.residual == cubic_m(r.m, K)


@given(Ks)
def test_cubic_bracket_signs(K):
    assert cubic_m(0.0, K) == 8.0
    assert cubic_m(2.0 / (2.0 - K), K) == pytest.approx(-8.0 * K / (2.0 - K), rel=1e-12)


# --- no disclosure ------------------------------------------------------------

def test_no_disclosure_half():
    s = solve_no_disclosure(unit(0.5))
    got = (s.lambda1, s.lambda2, s.beta1, s.beta2, s.gamma1, s.theta1, s.Sigma1, s.Sigma2)
    assert got == pytest.approx((0.3665, 0.3969, -0.1105, 1.2598, -0.1926, 0.5255, 0.8401, 0.6301),
                                abs=1e-4)
    assert s.regime is Regime.NO_DISCLOSURE and s.eta1 is None


def test_no_disclosure_three_halves():
    s = solve_no_disclosure(unit(1.5))
    got = (s.lambda1, s.lambda2, s.beta1, s.theta1, s.Sigma1, s.Sigma2)
    assert got == pytest.approx((0.5000, 0.3076, 0.8869, 0.1872, 0.5045, 0.1261), abs=1e-4)


@given(Ks, st.floats(0.01, 100), st.floats(0.01, 100))
def test_no_disclosure_variance_ratio(K, S0, s2):
    s = solve_no_disclosure(unit(K, Sigma0=S0, sigma_mu_sq=s2))
    assert s.Sigma2 / s.Sigma1 == pytest.approx(1.0 - K / 2.0, rel=1e-12)
    assert s.lambda1 > 0 and s.lambda2 > 0


@given(Ks, st.floats(0.1, 10), st.floats(0.1, 10))
def test_no_disclosure_pricing_is_efficient(K, S0, s2):
    # zero expected market-maker profit and posterior variances, from explicit moments
    s = solve_no_disclosure(unit(K, Sigma0=S0, sigma_mu_sq=s2, p0=0.3))
    mom = no_disclosure_moments(s)
    scale = S0 + s2
    assert mom.mm_profit == pytest.approx([0.0, 0.0], abs=1e-10 * scale)
    assert mom.residual_var == pytest.approx([s.Sigma1, s.Sigma2], rel=1e-10)


@pytest.mark.parametrize("K", [0.3, 0.5, 1.0, 1.5, 1.8])
@pytest.mark.parametrize("p0", [0.0, 1.0, -0.7])
def test_no_disclosure_profits_match_moment_oracle(K, p0):
    s = solve_no_disclosure(unit(K, p0=p0, Sigma0=1.7, sigma_mu_sq=0.6))
    h = no_disclosure_moments(s).hybrid
    assert s.expected_profit1 == pytest.approx(h[0] + h[1], rel=1e-10, abs=1e-12)
    assert s.expected_profit2 == pytest.approx(h[1], rel=1e-10, abs=1e-12)


def test_no_disclosure_profit_p0_shift():
    s = solve_no_disclosure(unit(0.5))
    e1, _ = expected_profit_no_disclosure(s, unit(0.5, p0=1.0))
    assert e1 == pytest.approx(s.profit1_coefs[0] + s.profit1_coefs[1], rel=1e-12)
    assert e1 == pytest.approx(0.3814 + 0.3671, abs=1e-4)


def test_expected_profit_rejects_disclosure_solution():
    with pytest.raises(ValueError):
        expected_profit_no_disclosure(solve_disclosure_two_period(unit(0.5)))


def test_requires_two_auctions():
    with pytest.raises(ValueError):
        solve_no_disclosure(ModelParams(K=0.5, N=3))
    with pytest.raises(ValidationError):
        solve_disclosure_two_period(ModelParams(K=2.5, N=2))


# --- disclosure ---------------------------------------------------------------

def test_disclosure_half():
    s = solve_disclosure_two_period(unit(0.5))
    got = (s.lambda1, s.lambda2, s.eta1, s.gamma1, s.beta1, s.beta2, s.theta1, s.Sigma1)
    assert got == pytest.approx((0.3062, 0.3062, 0.4082, -0.5, -0.8165, 1.6330, 1.6330, 0.5), abs=1e-4)


def test_disclosure_rational():
    s = solve_disclosure_two_period(unit(1.0))
    assert s.lambda1 == s.lambda2 == pytest.approx(math.sqrt(0.5) / 2, abs=1e-12)
    assert s.theta1 == 0.0 and s.gamma1 == 0.0 and s.sigma_z1_sq == 0.5
    rat = rational_benchmark(unit(1.0))
    assert s.beta1 == pytest.approx(rat["beta1"]) and s.beta2 == pytest.approx(rat["beta2"])


def test_disclosure_three_halves():
    s = solve_disclosure_two_period(unit(1.5))
    assert (s.eta1, s.beta1, s.theta1, s.gamma1) == pytest.approx((1.2247, 1.3608, -1.6330, 0.5), abs=1e-4)


@given(Ks, st.floats(0.01, 100), st.floats(0.01, 100))
def test_disclosure_exact_identities(K, S0, s2):
    s = solve_disclosure_two_period(unit(K, Sigma0=S0, sigma_mu_sq=s2))
    assert s.lambda1 == s.lambda2
    assert s.Sigma1 == S0 / 2
    assert s.theta2 == -s.theta1
    assert s.gamma2 == 1 - K and s.gamma1 == K - 1
    assert s.sigma_z1_sq == pytest.approx((2 - K) / (2 * K) * s2, rel=1e-15)
    if K != 1.0:
        assert math.copysign(1, s.theta1) == math.copysign(1, 1 - K)
        assert math.copysign(1, s.theta2) == math.copysign(1, K - 1)


def test_disclosure_gap_increasing_in_K():
    grid = [0.1 * i for i in range(1, 20)]
    gaps = []
    for K in grid:
        s = solve_disclosure_two_period(unit(K, Sigma0=2.0, sigma_mu_sq=0.5))
        expected = K * math.sqrt(K * 2.0) / (2 * math.sqrt(0.5) * math.sqrt(2 * (2 - K)))
        assert s.eta1 - s.lambda1 == pytest.approx(expected, rel=1e-12)
        gaps.append(s.eta1 - s.lambda1)
    assert all(b > a > 0 for a, b in zip(gaps, gaps[1:]))


@given(Ks, st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-3, 3))
@settings(max_examples=60)
def test_disclosure_equilibrium_moments(K, S0, s2, p0):
    s = solve_disclosure_two_period(unit(K, Sigma0=S0, sigma_mu_sq=s2, p0=p0))
    seq = solution_from_two_period(s)
    from oracle import sequential_moments
    mom = sequential_moments(seq)
    scale = S0 + s2 + p0 * p0
    assert mom.mm_profit == pytest.approx([0, 0], abs=1e-9 * scale)
    assert mom.residual_var == pytest.approx([S0 / 2, 0.0], abs=1e-9 * S0)


def test_printed_first_profit_coefficient_differs_from_moments():
    # The published p0^2 loading of total profit does not equal the moment
    # computation; the closed form is kept as published.
    s = solve_disclosure_two_period(unit(0.5, p0=1.0))
    from oracle import sequential_moments
    h = sequential_moments(solution_from_two_period(s)).hybrid
    assert s.profit1_coefs[1] == pytest.approx(0.4082, abs=5e-5)
    assert sum(h) == pytest.approx(s.profit1_coefs[0], rel=1e-12)
    assert h[1] == pytest.approx(sum(s.profit2_coefs), rel=1e-12)


def test_disclosure_value_function_identity():
    s = solve_disclosure_two_period(unit(0.7, Sigma0=1.3, sigma_mu_sq=0.4))
    K = 0.7
    seq = solution_from_two_period(s)
    for sv in (-1.0, 0.2, 1.5):
        for P in (-0.5, 0.0, 0.8):
            direct = (K * sv - (2 - K) * P) ** 2 / (4 * s.lambda2)
            assert value_function(seq[1], sv, P) == pytest.approx(direct, rel=1e-12)


# --- comparisons --------------------------------------------------------------

def test_compare_half():
    (rep,) = compare_regimes(unit(0.5))
    row = rep.row("lambda_with < lambda_without")
    assert row.satisfied and row.lhs == pytest.approx(0.3062, abs=1e-4)
    assert row.rhs == pytest.approx(0.3665, abs=1e-4)
    assert all(r.agrees is not False for r in rep.rows)


def test_compare_three_halves():
    (rep,) = compare_regimes(unit(1.5))
    row = rep.row("Sigma1_with < Sigma1_without")
    assert row.satisfied and (row.lhs, row.rhs) == pytest.approx((0.5, 0.5045), abs=1e-4)
    assert all(r.agrees is not False for r in rep.rows)


def test_compare_rational_rows_identical():
    (rep,) = compare_regimes(unit(1.0))
    for r in rep.rows:
        if r.section.startswith("rational") or r.name.startswith(("theta", "gamma")):
            assert r.relation == "="
            assert r.satisfied


def test_compare_unknown_row():
    (rep,) = compare_regimes(unit(0.5))
    with pytest.raises(KeyError):
        rep.row("nope")


@given(st.floats(0.05, 1.95).filter(lambda k: abs(k - 1) > 1e-3))
@settings(max_examples=40)
def test_compare_claims_hold_off_fixture_points(K):
    (rep,) = compare_regimes(unit(K))
    # Rational-benchmark comparisons are general claims and must hold everywhere they apply
    for r in rep.rows:
        if r.section.startswith("rational") and r.expected is not None:
            assert r.satisfied, r
