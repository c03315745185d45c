"""Closed-form two-auction equilibria with and without trade disclosure.

The no-disclosure benchmark reduces to one cubic for the ratio
``m = lambda_1 / lambda_2``; the disclosure equilibrium is fully explicit.
Both are evaluated straight from their closed forms so that any mismatch
against published fixtures points at a transcription problem rather than
at numerics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import NoSignChange, SecondOrderViolation
from .params import ModelParams, Regime, validate

CUBIC_TOL = 1e-12


@dataclass(frozen=True)
class CubicRoot:
    m: float
    residual: float
    upper: float


def cubic_m(m: float, K: float) -> float:
    """Left-hand side of the cubic whose root in ``(0, 2/(2-K))`` is ``m``."""
    h = 2.0 - K
    return h**3 * m**3 - 4.0 * h * m**2 - 4.0 * h * m + 8.0


def solve_cubic_m(K: float) -> CubicRoot:
    """Unique root of the no-disclosure cubic inside ``(0, 2/(2-K))``.

    ``f(0) = 8`` and ``f(2/(2-K)) = -8K/(2-K)`` bracket exactly one root,
    so a bracketed solver cannot wander onto the other branches.
    """
    validate(ModelParams(K=K, N=2))
    upper = 2.0 / (2.0 - K)
    f_lo, f_hi = cubic_m(0.0, K), cubic_m(upper, K)
    if not (f_lo > 0.0 > f_hi):
        raise NoSignChange(f"cubic has no sign change on (0, {upper}) for K={K}")
    m = brentq(cubic_m, 0.0, upper, args=(K,), xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    residual = cubic_m(m, K)
    if not (0.0 < m < upper) or abs(residual) >= CUBIC_TOL:
        raise NoSignChange(f"cubic root {m} for K={K} has residual {residual:.3e}")
    return CubicRoot(m=m, residual=residual, upper=upper)


@dataclass(frozen=True)
class TwoPeriodSolution:
    """Both periods of a two-auction equilibrium.

    Value coefficients follow the convention that ``alpha_n, omega_n,
    phi_n, delta_n`` price the insider's expected profit from auction
    ``n + 1`` onward as a quadratic in the signal and the latest price.
    Disclosure-only fields are ``None`` in the no-disclosure regime.
    """

    regime: Regime
    params: ModelParams
    beta1: float
    beta2: float
    theta1: float
    theta2: float
    lambda1: float
    lambda2: float
    gamma1: float
    gamma2: float
    alpha0: float
    alpha1: float
    omega0: float
    omega1: float
    phi0: float
    phi1: float
    delta0: float
    delta1: float
    Sigma1: float
    Sigma2: float
    expected_profit1: float
    expected_profit2: float
    # Coefficients on sigma_mu*sqrt(Sigma0) and p0^2*sigma_mu/sqrt(Sigma0).
    profit1_coefs: tuple[float, float]
    profit2_coefs: tuple[float, float]
    m: Optional[float] = None
    gamma1_prime: Optional[float] = None
    eta1: Optional[float] = None
    sigma_z1_sq: Optional[float] = None

    @property
    def intensity1(self) -> float:
        """Total first-period loading on the signal, ``beta1(1+gamma1)+theta1``."""
        return self.beta1 * (1.0 + self.gamma1) + self.theta1

    @property
    def intensity2(self) -> float:
        return self.beta2 * (1.0 + self.gamma2) + self.theta2


def _require(params: ModelParams) -> ModelParams:
    validate(params)
    if params.N != 2:
        raise ValueError(f"two-period solver needs N=2, got N={params.N}")
    return params


def solve_no_disclosure(params: ModelParams) -> TwoPeriodSolution:
    """Two-auction equilibrium when the insider's trades stay private."""
    _require(params)
    K, S0, sig = params.K, params.Sigma0, params.sigma_mu
    h = 2.0 - K
    m = solve_cubic_m(K).m

    denom = 4.0 - m * h**2
    lam1 = math.sqrt(2.0 * K * h * (2.0 - m * h) * (1.0 - m * (1.0 - K)) * S0) / (sig * denom)
    lam2 = math.sqrt(2.0 * K * h**2 * (1.0 - m * (1.0 - K)) * S0 / denom) / (2.0 * sig)
    beta1 = (2.0 - m * h**2) / (lam1 * denom)
    beta2 = 1.0 / (2.0 * lam2)
    gamma1 = (1.0 - K) * (1.0 - m * h)
    gamma2 = 1.0 - K
    theta1 = -gamma1 / lam1
    theta2 = (K - 1.0) / lam2
    alpha1 = h**2 / (4.0 * lam2)
    alpha0 = (1.0 + gamma1) ** 2 / (4.0 * lam1 * (1.0 - alpha1 * lam1))
    omega1 = h * (1.0 - K) / lam2
    omega0 = omega1 + h * gamma1 / lam1
    phi1 = (K - 1.0) / lam2
    phi0 = phi1 - gamma1 / lam1
    delta1 = 0.0
    delta0 = alpha1 * lam1**2 * params.sigma_mu_sq
    Sigma1 = 2.0 * h * (1.0 - m * (1.0 - K)) / denom * S0
    Sigma2 = h**2 * (1.0 - m * (1.0 - K)) / denom * S0

    for n, lam, alpha in ((1, lam1, alpha1), (2, lam2, 0.0)):
        if not lam * (1.0 - alpha * lam) > 0.0:
            raise SecondOrderViolation(f"lambda_{n}(1 - alpha_{n} lambda_{n}) <= 0 at K={K}")

    sol = TwoPeriodSolution(
        regime=Regime.NO_DISCLOSURE, params=params, m=m,
        beta1=beta1, beta2=beta2, theta1=theta1, theta2=theta2,
        lambda1=lam1, lambda2=lam2, gamma1=gamma1, gamma2=gamma2,
        alpha0=alpha0, alpha1=alpha1, omega0=omega0, omega1=omega1,
        phi0=phi0, phi1=phi1, delta0=delta0, delta1=delta1,
        Sigma1=Sigma1, Sigma2=Sigma2,
        expected_profit1=math.nan, expected_profit2=math.nan,
        profit1_coefs=(math.nan, math.nan), profit2_coefs=(math.nan, math.nan),
    )
    (e1, e2), (c1, c2) = _no_disclosure_profits(sol)
    return replace(sol, expected_profit1=e1, expected_profit2=e2,
                    profit1_coefs=c1, profit2_coefs=c2)


def _no_disclosure_profits(sol: TwoPeriodSolution):
    p = sol.params
    S0, p0sq, S1 = p.Sigma0, p.p0**2, sol.Sigma1
    scale_var = p.sigma_mu * math.sqrt(S0)
    scale_p0 = p.sigma_mu / math.sqrt(S0)
    # Market makers' moments: E[(s-p0)^2] = Sigma0, E[s^2] = Sigma0 + p0^2,
    # and for the efficient first price E[s p1] = E[p1^2] = Sigma0 - Sigma1 + p0^2.
    var1 = (sol.alpha0 + sol.phi0) * S0 + sol.delta0
    sq1 = sol.omega0 + sol.phi0
    var2 = sol.alpha1 * S1 + sol.omega1 * (S0 - S1) + sol.phi1 * S0 + sol.delta1
    sq2 = sol.omega1 + sol.phi1
    e1 = var1 + sq1 * p0sq
    e2 = var2 + sq2 * p0sq
    return (e1, e2), ((var1 / scale_var, sq1 / scale_p0), (var2 / scale_var, sq2 / scale_p0))


def expected_profit_no_disclosure(sol: TwoPeriodSolution,
                                  params: Optional[ModelParams] = None) -> tuple[float, float]:
    """Ex-ante ``(E pi_1, E pi_2)`` of the no-disclosure equilibrium.

    ``E pi_1`` is the market makers' expectation of the insider's own
    conditional expected profit over both auctions; ``E pi_2`` covers the
    second auction only. ``params`` may change ``p0`` (the coefficients do
    not depend on it).
    """
    if sol.regime is not Regime.NO_DISCLOSURE:
        raise ValueError("expected_profit_no_disclosure needs a no-disclosure solution")
    if params is not None:
        validate(params)
        sol = replace(sol, params=params)
    (e1, e2), _ = _no_disclosure_profits(sol)
    return e1, e2


def solve_disclosure_two_period(params: ModelParams) -> TwoPeriodSolution:
    """Two-auction equilibrium when the first trade is disclosed ex post."""
    _require(params)
    K, S0, sig, p0 = params.K, params.Sigma0, params.sigma_mu, params.p0
    h = 2.0 - K
    root = math.sqrt(2.0 * K * h)

    lam = math.sqrt(K * h * S0) / (2.0 * math.sqrt(2.0) * sig)
    eta1 = math.sqrt(K * S0) / (sig * math.sqrt(2.0 * h))
    gamma1 = K - 1.0
    gamma1_prime = 2.0 * (K - 1.0) / h
    gamma2 = 1.0 - K
    beta1 = (3.0 * K - 2.0) * sig / (K * math.sqrt(2.0 * K * h * S0))
    beta2 = sig * math.sqrt(2.0 / (h * K * S0))
    theta1 = 2.0 * math.sqrt(2.0) * (1.0 - K) * sig / math.sqrt(K * h * S0)
    theta2 = -theta1
    Sigma1 = 0.5 * S0
    sigma_z1_sq = h / (2.0 * K) * params.sigma_mu_sq

    c1 = (K**2 / root, (6.0 * K**2 - 10.0 * K + 4.0) / root)
    c2 = ((5.0 * K**2 - 8.0 * K + 4.0) / (2.0 * root), (2.0 * K - 2.0) ** 2 / root)
    scale_var, scale_p0 = sig * math.sqrt(S0), sig / math.sqrt(S0) * p0**2
    e1 = c1[0] * scale_var + c1[1] * scale_p0
    e2 = c2[0] * scale_var + c2[1] * scale_p0

    # Continuation after auction 1 is (1/4 lambda_2)[K s - (2-K) p1*]^2.
    alpha1 = h**2 / (4.0 * lam)
    omega1 = h * (1.0 - K) / lam
    phi1 = (K - 1.0) / lam
    # Indifference makes the auction-1 objective equal to its value at x = 0,
    # alpha1 (s - t p0)^2 + omega1 t s p0 + phi1 s^2 with t = 1 + gamma1'.
    t = 1.0 + gamma1_prime
    alpha0 = alpha1 * t**2
    omega0 = -2.0 * alpha1 * t + omega1 * t + 2.0 * alpha1 * t**2
    phi0 = alpha1 + phi1 - alpha1 * t**2

    return TwoPeriodSolution(
        regime=Regime.DISCLOSURE, params=params,
        beta1=beta1, beta2=beta2, theta1=theta1, theta2=theta2,
        lambda1=lam, lambda2=lam, gamma1=gamma1, gamma2=gamma2,
        gamma1_prime=gamma1_prime, eta1=eta1, sigma_z1_sq=sigma_z1_sq,
        alpha0=alpha0, alpha1=alpha1, omega0=omega0, omega1=omega1,
        phi0=phi0, phi1=phi1, delta0=0.0, delta1=0.0,
        Sigma1=Sigma1, Sigma2=0.0,
        expected_profit1=e1, expected_profit2=e2,
        profit1_coefs=c1, profit2_coefs=c2,
    )


def rational_benchmark(params: ModelParams) -> dict[str, float]:
    """Rational-insider (``K = 1``) disclosure values for the same primitives."""
    S0, sig = params.Sigma0, params.sigma_mu
    return {
        "beta1": sig / math.sqrt(2.0 * S0),
        "beta2": sig * math.sqrt(2.0 / S0),
        "lambda": math.sqrt(S0 / 2.0) / (2.0 * sig),
        "Sigma1": S0 / 2.0,
        "sigma_z1_sq": params.sigma_mu_sq / 2.0,
        "total_profit": sig * math.sqrt(S0) / math.sqrt(2.0),
    }


# --- regime comparison ---------------------------------------------------

EQ_TOL = 1e-12


@dataclass(frozen=True)
class ComparisonRow:
    section: str
    name: str
    lhs: float
    rhs: float
    relation: str
    satisfied: bool
    margin: float
    expected: Optional[bool]

    @property
    def agrees(self) -> Optional[bool]:
        return None if self.expected is None else self.satisfied == self.expected


@dataclass(frozen=True)
class ComparisonReport:
    params: ModelParams
    with_disclosure: TwoPeriodSolution
    without_disclosure: TwoPeriodSolution
    rational: dict[str, float]
    rows: list[ComparisonRow] = field(default_factory=list)

    def row(self, name: str) -> ComparisonRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def coefficient_table(self) -> list[tuple[str, Optional[float], Optional[float]]]:
        names = ("beta1", "beta2", "theta1", "theta2", "lambda1", "lambda2",
                 "gamma1", "gamma2", "Sigma1", "Sigma2", "eta1", "sigma_z1_sq",
                 "expected_profit1", "expected_profit2")
        return [(n, getattr(self.with_disclosure, n), getattr(self.without_disclosure, n))
                for n in names]


def _row(section, name, lhs, rhs, relation, expected) -> ComparisonRow:
    scale = max(1.0, abs(lhs), abs(rhs))
    if relation == "<":
        margin = rhs - lhs
        ok = margin > 0.0
    elif relation == ">":
        margin = lhs - rhs
        ok = margin > 0.0
    elif relation == "=":
        margin = -abs(lhs - rhs)
        ok = abs(lhs - rhs) <= EQ_TOL * scale
    else:
        raise ValueError(relation)
    return ComparisonRow(section, name, lhs, rhs, relation, ok, margin, expected)


def _rational_benchmark_rows(K, w, rat) -> list[ComparisonRow]:
    total_with = w.expected_profit1
    if K == 1.0:
        return [
            _row("rational(i)", "intensity1_with = intensity1_rational", w.intensity1, rat["beta1"], "=", True),
            _row("rational(i)", "intensity2_with = intensity2_rational", w.intensity2, rat["beta2"], "=", True),
            _row("rational(ii)", "lambda_with = lambda_rational", w.lambda1, rat["lambda"], "=", True),
            _row("rational(iii)", "Sigma1_with = Sigma1_rational", w.Sigma1, rat["Sigma1"], "=", True),
            _row("rational(iv)", "profit_with = profit_rational", total_with, rat["total_profit"], "=", True),
            _row("rational(v)", "sigma_z1_sq_with = sigma_z1_sq_rational", w.sigma_z1_sq, rat["sigma_z1_sq"], "=", True),
        ]
    under = K < 1.0
    rows = [
        _row("rational(i)", f"intensity1_with {'>' if under else '<'} intensity1_rational",
             w.intensity1, rat["beta1"], ">" if under else "<", True),
        _row("rational(i)", f"intensity2_with {'<' if under else '>'} intensity2_rational",
             w.intensity2, rat["beta2"], "<" if under else ">", True),
        _row("rational(ii)", "lambda_with < lambda_rational", w.lambda1, rat["lambda"], "<", True),
        _row("rational(iii)", "Sigma1_with = Sigma1_rational", w.Sigma1, rat["Sigma1"], "=", True),
        _row("rational(v)", f"sigma_z1_sq_with {'>' if under else '<'} sigma_z1_sq_rational",
             w.sigma_z1_sq, rat["sigma_z1_sq"], ">" if under else "<", True),
    ]
    if K > 1.0:
        rows.insert(3, _row("rational(iv)", "profit_with > profit_rational", total_with, rat["total_profit"], ">", True))
    elif K > 2.0 / 3.0:
        rows.insert(3, _row("rational(iv)", "profit_with < profit_rational", total_with, rat["total_profit"], "<", True))
    else:
        # Sign depends on p0; evaluated at the supplied p0 only.
        rows.insert(3, _row("rational(iv)", "profit_with < profit_rational", total_with, rat["total_profit"], "<", None))
    return rows


def _no_disclosure_rows(K, w, wo) -> list[ComparisonRow]:
    claimed = {0.5: True, 1.5: True}.get(K)
    lam_hat_min = min(wo.lambda1, wo.lambda2)
    dprof_w = w.expected_profit1 - w.expected_profit2
    dprof_wo = wo.expected_profit1 - wo.expected_profit2
    R = _row
    if K < 1.0:
        sec = "no_disclosure(i)"
        return [
            R(sec, "lambda_with < lambda_without", w.lambda1, lam_hat_min, "<", claimed),
            R(sec, "lambda1_without < lambda2_without", wo.lambda1, wo.lambda2, "<", claimed),
            R(sec, "beta1_with < beta1_without", w.beta1, wo.beta1, "<", claimed),
            R(sec, "beta1_without < 0", wo.beta1, 0.0, "<", claimed),
            R(sec, "beta2_with > beta2_without", w.beta2, wo.beta2, ">", claimed),
            R(sec, "beta2_without > 0", wo.beta2, 0.0, ">", claimed),
            R(sec, "Sigma1_with < Sigma1_without", w.Sigma1, wo.Sigma1, "<", claimed),
            R(sec, "gamma1_with < gamma1_without", w.gamma1, wo.gamma1, "<", claimed),
            R(sec, "gamma1_without < 0", wo.gamma1, 0.0, "<", claimed),
            R(sec, "gamma2_with = gamma2_without", w.gamma2, wo.gamma2, "=", claimed),
            R(sec, "theta1_with > theta1_without", w.theta1, wo.theta1, ">", claimed),
            R(sec, "theta1_without > 0", wo.theta1, 0.0, ">", claimed),
            R(sec, "theta2_with < theta2_without", w.theta2, wo.theta2, "<", claimed),
            R(sec, "theta2_without < 0", wo.theta2, 0.0, "<", claimed),
            R(sec, "profit_gap_with < 0", dprof_w, 0.0, "<", claimed),
            R(sec, "profit_gap_without > 0", dprof_wo, 0.0, ">", claimed),
            R(sec, "profit2_with > profit2_without", w.expected_profit2, wo.expected_profit2, ">", claimed),
        ]
    sec = "no_disclosure(ii)"
    return [
        R(sec, "lambda_with < lambda_without", w.lambda1, lam_hat_min, "<", claimed),
        R(sec, "lambda2_without < lambda1_without", wo.lambda2, wo.lambda1, "<", claimed),
        R(sec, "beta1_with > beta1_without", w.beta1, wo.beta1, ">", claimed),
        R(sec, "beta1_without > 0", wo.beta1, 0.0, ">", claimed),
        R(sec, "beta2_with > beta2_without", w.beta2, wo.beta2, ">", claimed),
        R(sec, "beta2_without > 0", wo.beta2, 0.0, ">", claimed),
        R(sec, "Sigma1_with < Sigma1_without", w.Sigma1, wo.Sigma1, "<", claimed),
        R(sec, "gamma1_with > 0", w.gamma1, 0.0, ">", claimed),
        R(sec, "gamma1_without < 0", wo.gamma1, 0.0, "<", claimed),
        R(sec, "gamma2_with = gamma2_without", w.gamma2, wo.gamma2, "=", claimed),
        R(sec, "theta1_with < 0", w.theta1, 0.0, "<", claimed),
        R(sec, "theta1_without > 0", wo.theta1, 0.0, ">", claimed),
        R(sec, "theta2_with > theta2_without", w.theta2, wo.theta2, ">", claimed),
        R(sec, "theta2_without > 0", wo.theta2, 0.0, ">", claimed),
        # Direction depends on p0 and Sigma0: reported, not asserted.
        R(sec, "profit_gap_with > profit_gap_without", dprof_w, dprof_wo, ">", None),
        R(sec, "profit2_with > profit2_without", w.expected_profit2, wo.expected_profit2, ">", None),
    ]


def _rational_rows(w, wo) -> list[ComparisonRow]:
    sec = "K=1"
    return [_row(sec, f"{name} = 0", value, 0.0, "=", True) for name, value in (
        ("theta1_with", w.theta1), ("theta2_with", w.theta2),
        ("theta1_without", wo.theta1), ("theta2_without", wo.theta2),
        ("gamma1_with", w.gamma1), ("gamma2_with", w.gamma2),
        ("gamma1_prime_with", w.gamma1_prime),
        ("gamma1_without", wo.gamma1), ("gamma2_without", wo.gamma2),
    )]


def compare_regimes(params_list: Iterable[ModelParams] | ModelParams) -> list[ComparisonReport]:
    """Side-by-side two-period comparison against both benchmark models.

    Each report lists every inequality claimed for the disclosure model
    relative to the rational disclosure benchmark and to the no-disclosure
    model, evaluated at the supplied primitives. ``expected`` is ``None``
    where the claimed direction depends on ``p0`` or is not asserted for
    this ``K``.
    """
    if isinstance(params_list, ModelParams):
        params_list = [params_list]
    reports = []
    for params in params_list:
        _require(params)
        w = solve_disclosure_two_period(params)
        wo = solve_no_disclosure(params)
        rat = rational_benchmark(params)
        K = params.K
        rows = _rational_benchmark_rows(K, w, rat)
        rows += _rational_rows(w, wo) if K == 1.0 else _no_disclosure_rows(K, w, wo)
        reports.append(ComparisonReport(params, w, wo, rat, rows))
    return reports
