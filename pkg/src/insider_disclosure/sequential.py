r"""N-auction disclosure equilibrium.

The equilibrium is computed in two sweeps. A backward sweep runs in
dimensionless coordinates

.. math::

    \lambda_n = a_n \sqrt{\Sigma_{n-1}} / \sigma_\mu, \quad
    \alpha_n = b_n \sigma_\mu / \sqrt{\Sigma_{n-1}}, \quad
    \omega_n = c_n \sigma_\mu / \sqrt{\Sigma_{n-1}},

which removes every dependence on the (still unknown) posterior variances.
A forward sweep then starts from ``Sigma0`` and recovers every coefficient
in base units.

The generic backward step is 0/0 at the terminal condition
``b_N = c_N = 0``, so the first step is seeded from the closed-form
last-auction value function instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import DenominatorCollapse, NegativeNoiseVariance, NegativeRadicand
from .params import ModelParams, validate

NOISE_VAR_TOL = 1e-12


@dataclass(frozen=True)
class NormalizedState:
    """Dimensionless backward-sweep state for auction ``n``.

    ``q`` and ``z`` are the normalized ``alpha_{n-1}`` and ``omega_{n-1}``
    measured in units of ``sigma_mu / sqrt(Sigma_{n-1})``; they are what
    the next backward step inverts.
    """

    n: int
    a: float
    b: float
    c: float
    q: float
    z: float


@dataclass(frozen=True)
class PeriodCoefficients:
    n: int
    beta: float
    theta: float
    lam: float
    gamma: float
    gamma_prime: float
    eta: float
    sigma_z_sq: float
    Sigma: float
    alpha: float
    omega: float
    phi: float
    delta: float

    @property
    def intensity(self) -> float:
        """Loading on ``s - p*_{n-1}`` once the known ``theta p*`` part is removed."""
        return self.beta * (1.0 + self.gamma) + self.theta

    @property
    def beta_eff(self) -> float:
        return self.beta * (1.0 + self.gamma)


@dataclass(frozen=True)
class ValueCoefficients:
    alpha: float
    omega: float
    phi: float
    delta: float


@dataclass(frozen=True)
class EquilibriumSolution:
    """Per-auction coefficients ``periods[0..N-1]`` for auctions ``1..N``.

    ``initial`` holds the value-function coefficients before the first
    auction, so ``value_function(initial, s, p0)`` is the insider's
    expected profit over the whole game.
    """

    params: ModelParams
    periods: tuple[PeriodCoefficients, ...]
    initial: ValueCoefficients
    states: tuple[NormalizedState, ...] = ()

    @property
    def N(self) -> int:
        return len(self.periods)

    def __getitem__(self, n: int) -> PeriodCoefficients:
        """One-based access, ``sol[n]`` for ``n`` in ``1..N``."""
        if not 1 <= n <= self.N:
            raise IndexError(f"auction index {n} outside 1..{self.N}")
        return self.periods[n - 1]

    def column(self, name: str) -> list[float]:
        return [getattr(p, name) for p in self.periods]

    def Sigma_before(self, n: int) -> float:
        return self.params.Sigma0 if n == 1 else self[n - 1].Sigma


# --- backward sweep -------------------------------------------------------

def _terminal_qz(K: float) -> tuple[float, float]:
    # alpha_{N-1} = (2-K)^2/(4 lambda_N), omega_{N-1} = (2-K)(1-K)/lambda_N,
    # lambda_N = sqrt(K(2-K) Sigma_{N-1}) / (2 sigma_mu).
    q = (2.0 - K) ** 1.5 / (2.0 * math.sqrt(K))
    return q, q * 4.0 * (1.0 - K) / (2.0 - K)


def _invert(K: float, q: float, z: float, n: int) -> tuple[float, float]:
    """Map normalized ``(alpha_{n-1}, omega_{n-1})`` onto ``(b_{n-1}, c_{n-1})``.

    The conversion rescales from ``Sigma_{n-1}`` to ``Sigma_{n-2}`` units;
    the variance ratio is itself a function of ``(b, c)`` and the common
    factor below is the closed-form solution.
    """
    e, d = (2.0 - K) * q - z, 2.0 * q - z
    if e <= 0.0 or d <= 0.0:
        raise DenominatorCollapse(f"backward step at n={n}, K={K}: (2-K)q-z={e:.3e}, 2q-z={d:.3e}")
    radicand = 1.0 + K**3 * q / (e * d * d)
    if radicand < 0.0:
        raise NegativeRadicand(f"backward step at n={n}, K={K}: radicand {radicand:.3e}")
    f = math.sqrt(radicand)
    return q * f, z * f


def _normalized_step(K: float, a: float, b: float, c: float, n: int) -> tuple[float, float]:
    """Normalized ``(alpha_{n-1}, omega_{n-1})`` from auction-``n`` state."""
    d = 2.0 * b - c
    e = (2.0 - K) * b - c
    if d <= 0.0 or e <= 0.0:
        raise DenominatorCollapse(f"n={n}, K={K}: 2b-c={d:.3e}, (2-K)b-c={e:.3e}")
    g = 2.0 * b * K - 2.0 * b + c
    D = K**4 * b * b
    # First factor is 1 + gamma - lambda*beta(1+gamma); second is
    # 1 + gamma' - eta*beta(1+gamma). Both exponents on (2b - c) differ.
    price_keep = 1.0 - D / (e * d**3)
    post_keep = 1.0 - K**3 * b / (e * d**2)
    u = (D - g * e * d * d) / (K * K * b * d * e)
    q = price_keep * u + b * post_keep**2
    z = (K * K * b * (1.0 - K) / (d * e)
         - (2.0 - K - D / (e * d**3)) * g * d / (K * K * b)
         + c * post_keep)
    return q, z


def seed_boundary(K: float) -> tuple[float, float, float, float]:
    """Closed-form start of the backward sweep.

    Returns ``(a_N, b_{N-1}, c_{N-1}, a_{N-1})``.
    """
    validate(ModelParams(K=K))
    a_N = math.sqrt(K * (2.0 - K)) / 2.0
    b = (2.0 - K) ** 1.5 / math.sqrt(2.0 * K)
    c = 4.0 * (1.0 - K) / (2.0 - K) * b
    a = (2.0 - K) ** 2 / (4.0 * b)
    return a_N, b, c, a


def backward_pass(K: float, N: int) -> tuple[NormalizedState, ...]:
    """Dimensionless states ordered ``n = N, N-1, ..., 1``."""
    validate(ModelParams(K=K, N=N))
    a_N, b_seed, c_seed, _ = seed_boundary(K)
    qN, zN = _terminal_qz(K)
    states = [NormalizedState(N, a_N, 0.0, 0.0, qN, zN)]
    b, c = b_seed, c_seed
    for n in range(N - 1, 0, -1):
        d = 2.0 * b - c
        a = K * K * b / (d * d)
        q, z = _normalized_step(K, a, b, c, n)
        states.append(NormalizedState(n, a, b, c, q, z))
        if n > 1:
            b, c = _invert(K, q, z, n)
    return tuple(states)


# --- forward sweep --------------------------------------------------------

def _last_period(n: int, K: float, S_prev: float, sigma_mu: float) -> dict:
    lam = math.sqrt(K * (2.0 - K) * S_prev) / (2.0 * sigma_mu)
    theta = (K - 1.0) / lam
    # sigma_z = 0, so the disclosed trade reveals s - p*_{N-1} exactly:
    # eta_N is the inverse of the total signal loading K / (2 lambda_N).
    eta = 2.0 * lam / K
    return dict(n=n, beta=1.0 / (2.0 * lam), theta=theta, lam=lam, gamma=1.0 - K,
                gamma_prime=-eta * theta, eta=eta, sigma_z_sq=0.0, Sigma=0.0,
                alpha=0.0, omega=0.0, phi=0.0, delta=0.0)


def _value_step(K: float, p: dict, alpha: float, omega: float, phi: float) -> tuple[float, float, float]:
    """One application of the value-function recursion from auction ``n`` to ``n-1``."""
    u = p["beta"] * (1.0 + p["gamma"])
    lam, eta, theta, gamma, gp = p["lam"], p["eta"], p["theta"], p["gamma"], p["gamma_prime"]
    price_keep = 1.0 + gamma - lam * u
    alpha_prev = price_keep * u + alpha * (1.0 + gp - eta * u) ** 2
    omega_prev = u * (1.0 - K) - price_keep * theta + omega * (1.0 - (eta * u - gp))
    phi_prev = phi + u * (K - 1.0) + (K + gamma - lam * u) * theta + omega * (eta * u - gp)
    return alpha_prev, omega_prev, phi_prev


def forward_pass(states: Sequence[NormalizedState], params: ModelParams) -> EquilibriumSolution:
    """Recover base-unit coefficients from a completed backward sweep."""
    validate(params)
    K, sig, N = params.K, params.sigma_mu, params.N
    by_n = {s.n: s for s in states}
    if sorted(by_n) != list(range(1, N + 1)):
        raise ValueError(f"backward sweep covers {sorted(by_n)}, expected 1..{N}")

    rows: list[dict] = []
    S_prev = params.Sigma0
    for n in range(1, N + 1):
        if n == N:
            rows.append(_last_period(n, K, S_prev, sig))
            break
        st = by_n[n]
        a, b, c = st.a, st.b, st.c
        d = 2.0 * b - c
        e = (2.0 - K) * b - c
        if d <= 0.0 or e <= 0.0:
            raise DenominatorCollapse(f"n={n}, K={K}: 2b-c={d:.3e}, (2-K)b-c={e:.3e}")
        g = 2.0 * b * K - 2.0 * b + c
        root = math.sqrt(S_prev)
        up, down = sig / root, root / sig  # sigma_mu/sqrt(Sigma), its inverse

        szz = (K * b / e - K**4 * b * b / (e * e * d * d)) * params.sigma_mu_sq
        if szz < 0.0:
            if szz < -NOISE_VAR_TOL:
                raise NegativeNoiseVariance(f"sigma_z^2 = {szz:.3e} at n={n}, K={K}")
            szz = 0.0
        theta = g / (a * d) * up
        eta = K / d * down
        Sigma = (1.0 - K * a / e) * S_prev
        rows.append(dict(
            n=n,
            beta=(K**4 * b * b - g * e * d * d) / (2.0 * K * K * b * e * e) * up,
            theta=theta,
            lam=a * down,
            gamma=-g / d,
            gamma_prime=-g / (K * b),
            eta=eta,
            sigma_z_sq=szz,
            Sigma=Sigma,
            alpha=b * up,
            omega=c * up,
            phi=math.nan,
            delta=0.0,
        ))
        S_prev = Sigma

    # phi never enters a first-order condition; it is carried along for the
    # value function only, via the recursion run backward from phi_N = 0.
    alpha, omega, phi = 0.0, 0.0, 0.0
    for row in reversed(rows):
        row["phi"] = phi
        alpha, omega, phi = _value_step(K, row, row["alpha"], row["omega"], phi)
    initial = ValueCoefficients(alpha, omega, phi, 0.0)

    periods = tuple(PeriodCoefficients(**row) for row in rows)
    return EquilibriumSolution(params=params, periods=periods, initial=initial,
                               states=tuple(sorted(states, key=lambda s: s.n)))


def solve_sequential(params: ModelParams) -> EquilibriumSolution:
    """Disclosure equilibrium for ``params.N`` auctions."""
    validate(params)
    return forward_pass(backward_pass(params.K, params.N), params)


# --- value function and optimality checks ---------------------------------

def value_function(coeffs: PeriodCoefficients | ValueCoefficients, s, p_star):
    """Insider's expected continuation profit ``alpha (s-p*)^2 + omega s p* + phi s^2 + delta``."""
    return (coeffs.alpha * (s - p_star) ** 2 + coeffs.omega * s * p_star
            + coeffs.phi * s * s + coeffs.delta)


def indifference_residuals(sol: EquilibriumSolution, n: int) -> tuple[float, float, float]:
    """First-order-condition coefficients of the auction-``n`` objective.

    The objective ``x [K s - (1+gamma) p* - lambda x] + V_n(s, p*_n(x))``
    is a quadratic in the trade ``x``. The returned triple is

    * the coefficient on ``x^2``: ``alpha eta^2 - lambda``;
    * the derivative loading on the signal: ``K - 2 alpha eta + eta omega``;
    * the derivative loading on the prior price: ``1 + gamma - 2 alpha eta (1 + gamma')``.

    All three vanish for ``n < N``; for ``n = N`` the first equals
    ``-lambda_N``, so the last trade is a strict maximum.
    """
    p = sol[n]
    alpha, omega = (0.0, 0.0) if n == sol.N else (p.alpha, p.omega)
    quad = alpha * p.eta**2 - p.lam
    if n == sol.N:
        # no continuation: V_N = 0 and the information slopes are just the flow terms
        return quad, sol.params.K, 1.0 + p.gamma
    info = sol.params.K - 2.0 * alpha * p.eta + p.eta * omega
    prior = 1.0 + p.gamma - 2.0 * alpha * p.eta * (1.0 + p.gamma_prime)
    return quad, info, prior


def value_recursion_residuals(sol: EquilibriumSolution, n: int) -> tuple[float, float, float]:
    """Mismatch between stored ``(alpha, omega, phi)_{n-1}`` and the recursion applied at ``n``."""
    p = sol[n]
    row = dict(beta=p.beta, gamma=p.gamma, lam=p.lam, eta=p.eta, theta=p.theta,
               gamma_prime=p.gamma_prime)
    a, o, f = _value_step(sol.params.K, row, p.alpha, p.omega, p.phi)
    prev = sol.initial if n == 1 else sol[n - 1]
    return a - prev.alpha, o - prev.omega, f - prev.phi


def solution_from_two_period(sol) -> Optional[EquilibriumSolution]:
    """Wrap a two-period disclosure solution in the N-period container."""
    if sol.eta1 is None:
        return None
    p = sol.params
    lam = sol.lambda2
    eta2 = 2.0 * lam / p.K
    periods = (
        PeriodCoefficients(1, sol.beta1, sol.theta1, sol.lambda1, sol.gamma1, sol.gamma1_prime,
                           sol.eta1, sol.sigma_z1_sq, sol.Sigma1, sol.alpha1, sol.omega1,
                           sol.phi1, sol.delta1),
        PeriodCoefficients(2, sol.beta2, sol.theta2, lam, sol.gamma2, -eta2 * sol.theta2,
                           eta2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    )
    return EquilibriumSolution(p, periods, ValueCoefficients(sol.alpha0, sol.omega0, sol.phi0, sol.delta0))
