import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from insider_disclosure.errors import DenominatorCollapse, NegativeNoiseVariance, ValidationError
from insider_disclosure.params import ModelParams
from insider_disclosure.sequential import (NormalizedState, ValueCoefficients, _invert,
                                           _normalized_step, backward_pass, forward_pass,
                                           indifference_residuals, seed_boundary,
                                           solution_from_two_period, solve_sequential,
                                           value_function, value_recursion_residuals)
from insider_disclosure.two_period import solve_disclosure_two_period

from oracle import bellman_rhs, sequential_moments

GRID = (0.5, 0.8, 1.0, 1.2, 1.8)
Ks = st.floats(0.05, 1.95)
Ns = st.integers(1, 30)


def rel_spread(values):
    arr = np.asarray(values)
    return float((arr.max() - arr.min()) / abs(arr).max())


# --- seed -------------------------------------------------------------------

def test_seed_rational():
    a_N, b, c, a = seed_boundary(1.0)
    assert (b, c, a) == pytest.approx((1 / math.sqrt(2), 0.0, 0.35355339), abs=1e-8)
    assert a_N == 0.5


def test_seed_half():
    _, b, c, a = seed_boundary(0.5)
    assert (b, c, a) == pytest.approx((1.83712, 2.44949, 0.30619), abs=1e-5)


@given(Ks)
def test_seed_solves_inversion_relation(K):
    # b_{N-1} (1 - K a_{N-1}/((2-K) b - c))^{1/2} equals the terminal q
    a_N, b, c, a = seed_boundary(K)
    q = (2 - K) ** 1.5 / (2 * math.sqrt(K))
    assert b * math.sqrt(1 - K * a / ((2 - K) * b - c)) == pytest.approx(q, rel=1e-12)
    assert a == pytest.approx(K * K * b / (2 * b - c) ** 2, rel=1e-12)


def test_seed_rejects_bad_K():
    with pytest.raises(ValidationError):
        seed_boundary(2.0)


# --- backward pass ----------------------------------------------------------

@pytest.mark.parametrize("N", [2, 5, 13])
def test_backward_rational_has_no_heterogeneity(N):
    for st_ in backward_pass(1.0, N):
        assert st_.c == 0.0 and st_.z == 0.0


def test_backward_two_periods_is_seed_only():
    states = backward_pass(0.5, 2)
    assert [s.n for s in states] == [2, 1]
    assert states[1].a == pytest.approx(0.30619, abs=1e-5)


def test_backward_three_periods_positive_denominators():
    for s in backward_pass(1.2, 3):
        assert s.a > 0
        if s.n < 3:
            assert 2 * s.b - s.c > 0 and (2 - 1.2) * s.b - s.c > 0


def test_backward_denominator_collapse():
    with pytest.raises(DenominatorCollapse):
        _normalized_step(0.5, 0.3, 1.0, 2.0, n=4)
    with pytest.raises(DenominatorCollapse):
        _invert(0.5, 1.0, 2.0, n=4)


def test_forward_rejects_incomplete_states():
    states = backward_pass(0.5, 4)
    with pytest.raises(ValueError):
        forward_pass(states[:2], ModelParams(K=0.5, N=4))


def test_negative_noise_variance_detected():
    # a state with (2-K)b - c tiny makes the noise-variance expression negative
    K = 0.5
    b, c = 1.0, 1.5 - 1e-3
    d = 2 * b - c
    bad = NormalizedState(1, K * K * b / d**2 * 50, b, c, 0.0, 0.0)
    last = NormalizedState(2, 0.5, 0.0, 0.0, 0.0, 0.0)
    with pytest.raises(NegativeNoiseVariance):
        forward_pass([last, bad], ModelParams(K=K, N=2))


# --- forward pass / invariants -------------------------------------------------

@pytest.mark.parametrize("K", [0.3, 0.5, 0.8, 1.0, 1.2, 1.5, 1.8])
def test_matches_two_period_closed_form(K):
    prm = ModelParams(K=K, N=2, p0=0.4, Sigma0=1.7, sigma_mu_sq=0.3)
    seq = solve_sequential(prm)
    ref = solution_from_two_period(solve_disclosure_two_period(prm))
    for a, b in zip(seq.periods, ref.periods):
        for name in ("beta", "theta", "lam", "gamma", "gamma_prime", "eta", "sigma_z_sq",
                     "Sigma", "alpha", "omega", "phi", "delta"):
            assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-10, abs=1e-12), name
    for name in ("alpha", "omega", "phi"):
        assert getattr(seq.initial, name) == pytest.approx(getattr(ref.initial, name), rel=1e-10, abs=1e-12)


def test_rational_variance_declines_linearly():
    sol = solve_sequential(ModelParams(K=1.0, N=20))
    assert sol.column("Sigma") == pytest.approx([1 - n / 20 for n in range(1, 21)], abs=1e-12)


@pytest.mark.parametrize("K", GRID)
def test_single_auction(K):
    sol = solve_sequential(ModelParams(K=K, N=1, Sigma0=2.0, sigma_mu_sq=0.5))
    c = sol[1]
    assert c.lam == pytest.approx(math.sqrt(K * (2 - K) * 2.0) / (2 * math.sqrt(0.5)))
    assert c.beta == pytest.approx(1 / (2 * c.lam)) and c.theta == pytest.approx((K - 1) / c.lam)
    assert c.sigma_z_sq == 0.0 and c.Sigma == 0.0
    assert sol.N == 1


@pytest.mark.parametrize("K", GRID)
def test_grid_invariants(K):
    sol = solve_sequential(ModelParams(K=K, N=20))
    assert rel_spread(sol.column("lam")) < 1e-8
    assert sol.column("Sigma") == pytest.approx([1 - n / 20 for n in range(1, 21)], rel=1e-8, abs=1e-15)
    assert all(v >= 0 for v in sol.column("sigma_z_sq")) and sol[20].sigma_z_sq == 0.0
    assert all(d == 0.0 for d in sol.column("delta"))
    for n in range(1, 20):
        assert max(map(abs, indifference_residuals(sol, n))) < 1e-10


def test_depth_ordering_in_heterogeneity():
    lam = {K: solve_sequential(ModelParams(K=K, N=20)).column("lam") for K in GRID}
    for n in range(20):
        assert lam[1.0][n] > lam[1.2][n] > lam[1.8][n]
        assert lam[1.0][n] > lam[0.5][n]


def test_last_period_residuals():
    sol = solve_sequential(ModelParams(K=1.3, N=6))
    quad, _, _ = indifference_residuals(sol, 6)
    assert quad == -sol[6].lam


def test_rational_zero_heterogeneity_terms():
    sol = solve_sequential(ModelParams(K=1.0, N=9, p0=2.0))
    for c in sol.periods:
        assert c.theta == 0.0 and c.gamma == 0.0 and c.gamma_prime == 0.0 and c.omega == 0.0


def test_indexing():
    sol = solve_sequential(ModelParams(K=0.9, N=3))
    assert sol[1] is sol.periods[0]
    with pytest.raises(IndexError):
        sol[0]
    with pytest.raises(IndexError):
        sol[4]
    assert sol.Sigma_before(1) == 1.0 and sol.Sigma_before(3) == sol[2].Sigma


@given(Ks, Ns, st.floats(0.05, 20), st.floats(0.05, 20))
@settings(max_examples=80, deadline=None)
def test_structural_properties(K, N, S0, s2):
    sol = solve_sequential(ModelParams(K=K, N=N, Sigma0=S0, sigma_mu_sq=s2))
    assert rel_spread(sol.column("lam")) < 1e-8
    expected = [S0 * (1 - n / N) for n in range(1, N + 1)]
    assert sol.column("Sigma") == pytest.approx(expected, rel=1e-8, abs=1e-12 * S0)
    for c in sol.periods:
        assert c.lam > 0
        assert c.gamma == pytest.approx(-c.lam * c.theta, rel=1e-10, abs=1e-12)
        assert c.gamma_prime == pytest.approx(-c.eta * c.theta, rel=1e-10, abs=1e-12)
        assert c.sigma_z_sq >= 0 and c.delta == 0.0
    for n in range(1, N + 1):
        a, o, f = value_recursion_residuals(sol, n)
        prev = sol.initial if n == 1 else sol[n - 1]
        scale = abs(prev.alpha) + abs(prev.omega) + abs(prev.phi) + 1e-300
        assert max(abs(a), abs(o), abs(f)) <= 1e-10 * scale
    for n in range(1, N):
        quad, info, prior = indifference_residuals(sol, n)
        c = sol[n]
        assert abs(quad) <= 1e-10 * c.lam
        assert abs(info) <= 1e-10 * max(1.0, K)
        assert abs(prior) <= 1e-9


@given(Ks, st.integers(2, 12), st.floats(0.2, 5), st.floats(0.2, 5),
       st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=40, deadline=None)
def test_bellman_equation(K, N, S0, s2, sv, P):
    sol = solve_sequential(ModelParams(K=K, N=N, Sigma0=S0, sigma_mu_sq=s2))
    for n in range(1, N + 1):
        prev = sol.initial if n == 1 else sol[n - 1]
        lhs = value_function(prev, sv, P)
        rhs = bellman_rhs(sol, n, sv, P)
        c = sol[n]
        scale = 1.0 + abs(c.alpha) + abs(prev.alpha) + abs(prev.omega) + abs(prev.phi)
        assert lhs == pytest.approx(rhs, abs=1e-8 * scale * (1 + sv * sv + P * P))


@given(Ks, st.integers(1, 15), st.floats(0.2, 5), st.floats(0.2, 5), st.floats(-2, 2))
@settings(max_examples=40, deadline=None)
def test_pricing_efficiency_moments(K, N, S0, s2, p0):
    sol = solve_sequential(ModelParams(K=K, N=N, Sigma0=S0, sigma_mu_sq=s2, p0=p0))
    mom = sequential_moments(sol)
    scale = S0 + s2 + p0 * p0
    assert mom.mm_profit == pytest.approx([0.0] * N, abs=1e-9 * scale)
    assert mom.residual_var == pytest.approx(sol.column("Sigma"), abs=1e-9 * S0)


def test_value_function_boundary_and_rational():
    zero = ValueCoefficients(0.0, 0.0, 0.0, 0.0)
    for sv, P in [(1, 2), (-3, 0.5)]:
        assert value_function(zero, sv, P) == 0.0
    sol = solve_sequential(ModelParams(K=1.0, N=4))
    c = sol[2]
    assert value_function(c, 1.5, 0.5) == pytest.approx(value_function(c, 2.5, 1.5))


def test_value_function_vectorized():
    sol = solve_sequential(ModelParams(K=0.7, N=4))
    s = np.linspace(-1, 1, 5)
    out = value_function(sol[1], s, 0.2)
    assert out.shape == (5,)
    assert out[2] == pytest.approx(value_function(sol[1], 0.0, 0.2))


def test_total_expected_profit_equals_initial_value():
    sol = solve_sequential(ModelParams(K=1.4, N=7, p0=0.5, Sigma0=2.0))
    mom = sequential_moments(sol)
    init = sol.initial
    total = (init.alpha + init.phi) * 2.0 + (init.omega + init.phi) * 0.25
    assert sum(mom.hybrid) == pytest.approx(total, rel=1e-10)


def test_solution_from_two_period_no_disclosure_returns_none():
    from insider_disclosure.two_period import solve_no_disclosure
    assert solution_from_two_period(solve_no_disclosure(ModelParams(K=0.5, N=2))) is None
