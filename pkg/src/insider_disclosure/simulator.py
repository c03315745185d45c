"""Seeded Monte Carlo of the auction game under the market makers' measure.

Paths draw ``v = s ~ N(p0, Sigma0)``, noise orders and dissimulation noise
from a counter-based generator keyed by ``(master_seed, path_index)``.
Paths are processed in fixed-size blocks; block partial sums are exact
(:func:`math.fsum`) and combined in block order, so every statistic is
independent of how many workers ran the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from ._paths_py import normals, path_keys
from .analytics import expected_profit_series, expected_volume_series, ProfitMeasure
from .errors import InsufficientPaths, ValidationError
from .params import ModelParams, Regime, validate
from .sequential import EquilibriumSolution, value_function
from .two_period import TwoPeriodSolution

BLOCK_SIZE = 8192
MIN_REGRESSION_PATHS = 10_000
SE_MULTIPLIER = 3.0
SIGMA_REL_TOL = 0.02
# v - p*_N is zero up to rounding once the last trade is fully disclosed
SIGMA_ABS_TOL = 1e-10

Solution = Union[EquilibriumSolution, TwoPeriodSolution]


@dataclass(frozen=True)
class SimulationConfig:
    n_paths: int
    master_seed: int
    params: ModelParams
    regime: Regime = Regime.DISCLOSURE
    workers: int = 1
    keep_paths: bool = False
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        validate(self.params)
        if not isinstance(self.n_paths, int) or self.n_paths < 1:
            raise ValidationError(f"n_paths must be a positive integer, got {self.n_paths!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ValidationError(f"workers must be a positive integer, got {self.workers!r}")
        if self.block_size < 1:
            raise ValidationError(f"block_size must be positive, got {self.block_size!r}")
        object.__setattr__(self, "regime", Regime(self.regime))


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float


@dataclass(frozen=True)
class SimulationStats:
    """Per-auction sample means and standard errors (sample std / sqrt(n)).

    ``var_v_minus_pstar[n-1]`` is the sample variance of ``v - p*_n``,
    the market makers' residual uncertainty after auction ``n``.
    """

    n_paths: int
    backend: str
    insider_profit: tuple[Estimate, ...]
    mm_profit: tuple[Estimate, ...]
    abs_x: tuple[Estimate, ...]
    abs_y: tuple[Estimate, ...]
    abs_mu: tuple[Estimate, ...]
    volume: tuple[Estimate, ...]
    var_v_minus_pstar: tuple[Estimate, ...]
    total_insider_profit: Estimate
    paths: Optional[dict] = field(default=None, repr=False, compare=False)

    @property
    def N(self) -> int:
        return len(self.insider_profit)


@dataclass(frozen=True)
class Strategy:
    """Coefficient arrays driving the path kernel."""

    u: np.ndarray
    theta: np.ndarray
    lam: np.ndarray
    gamma: np.ndarray
    gamma_prime: np.ndarray
    eta: np.ndarray
    sz: np.ndarray
    disclose: bool


def strategy_from(sol: Solution) -> Strategy:
    if isinstance(sol, EquilibriumSolution):
        cols = {k: np.array(sol.column(k), dtype=float)
                for k in ("theta", "lam", "gamma", "gamma_prime", "eta", "sigma_z_sq")}
        u = np.array([c.beta_eff for c in sol.periods], dtype=float)
        return Strategy(u, cols["theta"], cols["lam"], cols["gamma"], cols["gamma_prime"],
                        cols["eta"], np.sqrt(cols["sigma_z_sq"]), True)
    if sol.regime is Regime.DISCLOSURE:
        from .sequential import solution_from_two_period
        return strategy_from(solution_from_two_period(sol))
    zero = np.zeros(2)
    return Strategy(
        u=np.array([sol.beta1 * (1 + sol.gamma1), sol.beta2 * (1 + sol.gamma2)]),
        theta=np.array([sol.theta1, sol.theta2]),
        lam=np.array([sol.lambda1, sol.lambda2]),
        gamma=np.array([sol.gamma1, sol.gamma2]),
        gamma_prime=zero, eta=zero, sz=zero, disclose=False,
    )


def _sigma_path(sol: Solution) -> list[float]:
    if isinstance(sol, EquilibriumSolution):
        return sol.column("Sigma")
    return [sol.Sigma1, sol.Sigma2]


def _run_block(strat: Strategy, prm: ModelParams, seed: int, start: int, count: int):
    return kernels.simulate_block(
        strat.u, strat.theta, strat.lam, strat.gamma, strat.gamma_prime, strat.eta, strat.sz,
        float(prm.p0), math.sqrt(prm.Sigma0), prm.sigma_mu, int(seed), int(start), int(count),
        bool(strat.disclose))


_QUANTITIES = ("insider_profit", "mm_profit", "abs_x", "abs_y", "abs_mu", "volume", "err")


def _block_sums(v, x, mu, p, ps) -> dict:
    y = x + mu
    vc = v[:, None]
    q = {
        "insider_profit": x * (vc - p),
        "mm_profit": (p - vc) * y,
        "abs_x": np.abs(x),
        "abs_y": np.abs(y),
        "abs_mu": np.abs(mu),
        "err": vc - ps,
    }
    q["volume"] = 0.5 * (q["abs_x"] + q["abs_y"] + q["abs_mu"])
    out = {}
    for name in _QUANTITIES:
        a = q[name]
        out[name] = [(math.fsum(a[:, k].tolist()), math.fsum((a[:, k] ** 2).tolist()))
                     for k in range(a.shape[1])]
    tot = q["insider_profit"].sum(axis=1)
    out["total"] = (math.fsum(tot.tolist()), math.fsum((tot**2).tolist()))
    return out


def _estimate(s1: float, s2: float, n: int) -> tuple[float, float]:
    mean = s1 / n
    var = max(s2 - s1 * s1 / n, 0.0) / (n - 1) if n > 1 else math.inf
    return mean, var


def simulate(config: SimulationConfig, sol: Solution) -> SimulationStats:
    """Simulate ``config.n_paths`` paths of the equilibrium ``sol``."""
    prm = config.params
    strat = strategy_from(sol)
    if len(strat.u) != prm.N:
        raise ValidationError(f"solution has {len(strat.u)} auctions, params say N={prm.N}")
    n = config.n_paths
    starts = list(range(0, n, config.block_size))

    def work(start):
        count = min(config.block_size, n - start)
        arrays = _run_block(strat, prm, config.master_seed, start, count)
        return _block_sums(*arrays), (arrays if config.keep_paths else None)

    if config.workers == 1 or len(starts) == 1:
        results = [work(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(work, starts))

    N = prm.N
    series = {}
    for name in _QUANTITIES:
        ests = []
        for k in range(N):
            s1 = math.fsum(r[0][name][k][0] for r in results)
            s2 = math.fsum(r[0][name][k][1] for r in results)
            mean, var = _estimate(s1, s2, n)
            if name == "err":
                # sample variance of v - p*, with the normal-theory standard error
                ests.append(Estimate(var, var * math.sqrt(2.0 / (n - 1)) if n > 1 else math.inf))
            else:
                ests.append(Estimate(mean, math.sqrt(var / n)))
        series[name] = tuple(ests)
    t1 = math.fsum(r[0]["total"][0] for r in results)
    t2 = math.fsum(r[0]["total"][1] for r in results)
    tm, tv = _estimate(t1, t2, n)

    paths = None
    if config.keep_paths:
        cat = [np.concatenate([r[1][i] for r in results]) for i in range(5)]
        paths = dict(zip(("v", "x", "mu", "p", "pstar"), cat))
        paths["p0"] = prm.p0
    return SimulationStats(
        n_paths=n, backend=kernels.BACKEND,
        insider_profit=series["insider_profit"], mm_profit=series["mm_profit"],
        abs_x=series["abs_x"], abs_y=series["abs_y"], abs_mu=series["abs_mu"],
        volume=series["volume"], var_v_minus_pstar=series["err"],
        total_insider_profit=Estimate(tm, math.sqrt(tv / n)), paths=paths,
    )


# --- statistical checks ---------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: Optional[bool]
    detail: list


def _within(value: float, target: float, tol: float) -> bool:
    return abs(value - target) <= tol


def zero_profit_check(stats: SimulationStats) -> CheckResult:
    rows, ok = [], True
    for k, e in enumerate(stats.mm_profit, start=1):
        passed = _within(e.mean, 0.0, SE_MULTIPLIER * e.se)
        ok &= passed
        rows.append({"n": k, "mean": e.mean, "se": e.se, "pass": passed})
    return CheckResult("zero_profit", ok, rows)


def sigma_check(stats: SimulationStats, sol: Solution) -> CheckResult:
    rows, ok = [], True
    for k, (e, target) in enumerate(zip(stats.var_v_minus_pstar, _sigma_path(sol)), start=1):
        tol = SIGMA_REL_TOL * target if target > 0.0 else SIGMA_ABS_TOL * sol.params.Sigma0
        passed = _within(e.mean, target, tol)
        ok &= passed
        rows.append({"n": k, "empirical": e.mean, "analytic": target, "tol": tol, "pass": passed})
    return CheckResult("sigma", ok, rows)


def volume_check(stats: SimulationStats, sol: EquilibriumSolution) -> CheckResult:
    """Expected volume against the closed form; only meaningful for ``p0 = 0``."""
    if not isinstance(sol, EquilibriumSolution) or sol.params.p0 != 0.0:
        return CheckResult("volume", None, [])
    rows, ok = [], True
    for k, (e, target) in enumerate(zip(stats.volume, expected_volume_series(sol).expected_volume), start=1):
        passed = _within(e.mean, target, SE_MULTIPLIER * e.se)
        ok &= passed
        rows.append({"n": k, "empirical": e.mean, "analytic": target, "se": e.se, "pass": passed})
    return CheckResult("volume", ok, rows)


def realized_profit_check(stats: SimulationStats, sol: EquilibriumSolution) -> CheckResult:
    if not isinstance(sol, EquilibriumSolution):
        return CheckResult("realized_profit", None, [])
    target = expected_profit_series(sol, ProfitMeasure.REALIZED).total
    e = stats.total_insider_profit
    passed = _within(e.mean, target, SE_MULTIPLIER * e.se)
    return CheckResult("realized_profit", passed,
                       [{"empirical": e.mean, "analytic": target, "se": e.se, "pass": passed}])


def run_checks(stats: SimulationStats, sol: Solution) -> list[CheckResult]:
    return [zero_profit_check(stats), sigma_check(stats, sol),
            volume_check(stats, sol), realized_profit_check(stats, sol)]


# --- regression recovery of the pricing rule ------------------------------

@dataclass(frozen=True)
class RegressionRow:
    n: int
    lam_hat: float
    lam_se: float
    gamma_hat: Optional[float]
    gamma_se: Optional[float]


def empirical_regression_check(source: SimulationStats | dict) -> list[RegressionRow]:
    """Recover ``(lambda_n, gamma_n)`` by least squares on retained paths.

    Semi-strong efficiency says ``E[v - p*_{n-1} | p*_{n-1}, y_n]`` equals
    ``gamma_n p*_{n-1} + lambda_n y_n``, so ``v - p*_{n-1}`` is regressed on
    ``(p*_{n-1}, y_n)`` without intercept. When ``p*_{n-1}`` is the
    constant ``0`` the ``gamma`` column is dropped and reported as ``None``.
    """
    paths = source.paths if isinstance(source, SimulationStats) else source
    if paths is None:
        raise InsufficientPaths("no paths retained; simulate with keep_paths=True")
    v, x, mu, ps = paths["v"], paths["x"], paths["mu"], paths["pstar"]
    n_paths = len(v)
    if n_paths < MIN_REGRESSION_PATHS:
        raise InsufficientPaths(f"regression needs at least {MIN_REGRESSION_PATHS} paths, got {n_paths}")
    rows = []
    prev = np.full(n_paths, float(paths.get("p0", 0.0)))
    for k in range(x.shape[1]):
        y = x[:, k] + mu[:, k]
        target = v - prev
        use_prev = bool(np.ptp(prev) > 0.0 or np.any(prev != 0.0))
        X = np.column_stack([prev, y]) if use_prev else y[:, None]
        coef, _, _, _ = np.linalg.lstsq(X, target, rcond=None)
        resid = target - X @ coef
        dof = n_paths - X.shape[1]
        s2 = float(resid @ resid) / dof
        cov = s2 * np.linalg.inv(X.T @ X)
        se = np.sqrt(np.diag(cov))
        if use_prev:
            rows.append(RegressionRow(k + 1, float(coef[1]), float(se[1]), float(coef[0]), float(se[0])))
        else:
            rows.append(RegressionRow(k + 1, float(coef[0]), float(se[0]), None, None))
        prev = ps[:, k]
    return rows


# --- deviation probe ------------------------------------------------------

@dataclass(frozen=True)
class ProbeResult:
    """Insider payoff (own measure) against an overridden auction-``n`` trade.

    ``coef[j]`` is the mean over paths of the per-path quadratic fit
    coefficient on ``x^j``; ``coef_se`` its standard error.
    """

    n: int
    s: float
    p_star: float
    grid: tuple[float, ...]
    mean_payoff: tuple[float, ...]
    se_payoff: tuple[float, ...]
    coef: tuple[float, float, float]
    coef_se: tuple[float, float, float]
    equilibrium_trade: float
    equilibrium_payoff: Estimate
    value_prediction: float
    lam: float


def _continuation(sol: EquilibriumSolution, n: int, s: float, P: np.ndarray,
                  x_n: np.ndarray, keys: np.ndarray) -> np.ndarray:
    K = sol.params.K
    sig = sol.params.sigma_mu
    c = sol[n]
    mu = sig * normals(keys, 1 + 2 * (n - 1))
    p = (1.0 + c.gamma) * P + c.lam * (x_n + mu)
    payoff = x_n * (K * s - p)
    P = (1.0 + c.gamma_prime) * P + c.eta * x_n
    for k in range(n + 1, sol.N + 1):
        c = sol[k]
        z = math.sqrt(c.sigma_z_sq) * normals(keys, 2 + 2 * (k - 1))
        mu = sig * normals(keys, 1 + 2 * (k - 1))
        x = c.beta_eff * (s - P) + c.theta * s + z
        p = (1.0 + c.gamma) * P + c.lam * (x + mu)
        payoff = payoff + x * (K * s - p)
        P = (1.0 + c.gamma_prime) * P + c.eta * x
    return payoff


def deviation_profit_probe(sol: EquilibriumSolution, n: int, x_override_grid: Sequence[float],
                           *, s: Optional[float] = None, p_star: Optional[float] = None,
                           n_paths: int = 20_000, seed: int = 0) -> ProbeResult:
    """Payoff profile when auction ``n``'s trade is forced to each grid value.

    All other trades follow the equilibrium strategy, and every grid point
    reuses the same random draws. The payoff ``sum_k x_k (K s - p_k)`` is
    the insider's own valuation. It is exactly quadratic in the override
    on each path, so a per-path quadratic fit is exact.
    """
    if not 1 <= n <= sol.N:
        raise ValidationError(f"auction index {n} outside 1..{sol.N}")
    grid = np.asarray(list(x_override_grid), dtype=float)
    if grid.size < 3:
        raise ValidationError("deviation probe needs at least three grid points")
    prm = sol.params
    if s is None:
        s = prm.p0 + math.sqrt(prm.Sigma0)
    if p_star is None:
        p_star = prm.p0 if n == 1 else prm.p0 + 0.5 * math.sqrt(prm.Sigma0 - sol.Sigma_before(n))
    keys = path_keys(seed, np.arange(n_paths, dtype=np.uint64))
    P = np.full(n_paths, float(p_star))
    pay = np.column_stack([_continuation(sol, n, s, P, np.full(n_paths, g), keys) for g in grid])
    c = sol[n]
    x_eq = c.beta_eff * (s - p_star) + c.theta * s
    eq = _continuation(sol, n, s, P, np.full(n_paths, x_eq), keys)

    V = np.vander(grid, 3, increasing=True)
    coefs = pay @ np.linalg.pinv(V).T
    root_n = math.sqrt(n_paths)
    prev = sol.initial if n == 1 else sol[n - 1]
    return ProbeResult(
        n=n, s=float(s), p_star=float(p_star), grid=tuple(grid.tolist()),
        mean_payoff=tuple(pay.mean(axis=0).tolist()),
        se_payoff=tuple((pay.std(axis=0, ddof=1) / root_n).tolist()),
        coef=tuple(coefs.mean(axis=0).tolist()),
        coef_se=tuple((coefs.std(axis=0, ddof=1) / root_n).tolist()),
        equilibrium_trade=float(x_eq),
        equilibrium_payoff=Estimate(float(eq.mean()), float(eq.std(ddof=1) / root_n)),
        value_prediction=float(value_function(prev, s, p_star)),
        lam=c.lam,
    )
