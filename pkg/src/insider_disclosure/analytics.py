"""Closed-form expected volume, per-auction profits and depth series.

Every series is a function of a solved :class:`EquilibriumSolution` only.
Expectations are taken under the market makers' measure, for which the
relevant second moments of the adjusted price are

* ``E[(s - p*_{n-1})^2] = Sigma_{n-1}``
* ``E[s p*_{n-1}] = E[(p*_{n-1})^2] = Sigma0 + p0^2 - Sigma_{n-1}``

because ``p*`` is the projection of ``s`` on public information.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .sequential import EquilibriumSolution

SQRT_2PI = math.sqrt(2.0 * math.pi)


class ProfitMeasure(str, enum.Enum):
    """How the insider's per-auction profit is averaged.

    ``HYBRID`` averages the insider's own conditional expectation (value
    ``K s``) over the market makers' law of ``s``. ``REALIZED`` averages
    ``x (v - p)`` with ``v = s``.
    """

    HYBRID = "hybrid"
    REALIZED = "realized"


@dataclass(frozen=True)
class VolumeSeries:
    V_i: tuple[float, ...]
    V_l: tuple[float, ...]
    V_m: tuple[float, ...]
    expected_volume: tuple[float, ...]


@dataclass(frozen=True)
class ProfitSeries:
    measure: ProfitMeasure
    per_period: tuple[float, ...]

    @property
    def cumulative(self) -> tuple[float, ...]:
        """Running totals ``sum_{k<=n}``."""
        out, acc = [], 0.0
        for v in self.per_period:
            acc += v
            out.append(acc)
        return tuple(out)

    @property
    def remaining(self) -> tuple[float, ...]:
        """Expected profit from auction ``n`` onward, ``sum_{k>=n}``."""
        out, acc = [], 0.0
        for v in reversed(self.per_period):
            acc += v
            out.append(acc)
        return tuple(reversed(out))

    @property
    def total(self) -> float:
        return math.fsum(self.per_period)


@dataclass(frozen=True)
class DepthRow:
    n: int
    lam: float
    depth: float
    Sigma: float
    disclosure_gap: float


def prior_second_moment(sol: EquilibriumSolution, n: int) -> float:
    """``E[(p*_{n-1})^2]``, which equals ``Sigma0 + p0^2 - Sigma_{n-1}``."""
    p = sol.params
    return p.Sigma0 + p.p0**2 - sol.Sigma_before(n)


def _insider_second_moment(sol: EquilibriumSolution, n: int) -> float:
    prm = sol.params
    c = sol[n]
    S = sol.Sigma_before(n)
    M = prior_second_moment(sol, n)
    K, s2 = prm.K, prm.sigma_mu_sq
    if n == sol.N:
        return K * s2 / (2.0 - K) + 4.0 * (K - 1.0) ** 2 * s2 / (K * (2.0 - K) * S) * M
    # alpha, omega are the continuation coefficients after auction n
    a, w, lam = c.alpha, c.omega, c.lam
    info = (2.0 * a - w) * s2 * lam / ((2.0 * a - K * a - w) * S)
    hetero = (2.0 * a * K - 2.0 * a + w) / ((2.0 * a - w) * lam)
    return info**2 * S + hetero**2 * M + c.sigma_z_sq


def expected_volume_series(sol: EquilibriumSolution) -> VolumeSeries:
    """Expected volume ``E[(|x| + |y| + |mu|)/2]`` per auction.

    ``V_i`` and ``V_m`` are root second moments of the insider's and the
    aggregate order, ``V_l = sigma_mu``. The half-normal identity behind
    ``(V_i + V_l + V_m)/sqrt(2 pi)`` needs zero-mean orders, so the total
    is exact only for ``p0 = 0``.
    """
    sig = sol.params.sigma_mu
    Vi, Vl, Vm, vol = [], [], [], []
    for n in range(1, sol.N + 1):
        xx = _insider_second_moment(sol, n)
        vi, vm = math.sqrt(xx), math.sqrt(xx + sig * sig)
        Vi.append(vi)
        Vl.append(sig)
        Vm.append(vm)
        vol.append((vi + sig + vm) / SQRT_2PI)
    return VolumeSeries(tuple(Vi), tuple(Vl), tuple(Vm), tuple(vol))


def realized_profit(sol: EquilibriumSolution, n: int) -> float:
    """``E[x_n (v - p_n)]`` with ``v = s``.

    Writing ``x = B (s - p*) + theta p* + z`` with ``B = beta(1+gamma) + theta``,
    the ``p*`` terms cancel through ``gamma = -lambda theta``.
    """
    c = sol[n]
    B = c.intensity
    return B * (1.0 - c.lam * B) * sol.Sigma_before(n) - c.lam * c.sigma_z_sq


def belief_premium(sol: EquilibriumSolution, n: int) -> float:
    """``(K - 1) E[x_n s]``: the gap between hybrid and realized profit."""
    c = sol[n]
    return (sol.params.K - 1.0) * (c.intensity * sol.Sigma_before(n)
                                   + c.theta * prior_second_moment(sol, n))


def expected_profit_series(sol: EquilibriumSolution,
                           measure: ProfitMeasure | str = ProfitMeasure.HYBRID) -> ProfitSeries:
    measure = ProfitMeasure(measure)
    vals = []
    for n in range(1, sol.N + 1):
        v = realized_profit(sol, n)
        if measure is ProfitMeasure.HYBRID:
            v += belief_premium(sol, n)
        vals.append(v)
    return ProfitSeries(measure, tuple(vals))


def depth_efficiency_series(sol: EquilibriumSolution) -> list[DepthRow]:
    return [DepthRow(c.n, c.lam, 1.0 / c.lam, c.Sigma, c.eta - c.lam) for c in sol.periods]


def theta_sign_pattern(sol: EquilibriumSolution) -> dict:
    """Report whether ``theta_n`` alternates in sign; informational only."""
    th = sol.column("theta")
    flips = [th[i] * th[i + 1] < 0.0 for i in range(len(th) - 1)]
    return {"theta": th, "alternates": bool(flips) and all(flips), "sign_flips": sum(flips)}
