"""Tabular and JSON renderings of solutions, figure data and simulations.

Numbers are written with 12 significant digits; CSV uses LF line endings
and a fixed column order so output can be diffed against golden files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .analytics import (ProfitMeasure, expected_profit_series, expected_volume_series)
from .params import ModelParams, Regime, validate, validate_regime
from .sequential import EquilibriumSolution, solve_sequential
from .simulator import (SimulationConfig, SimulationStats, empirical_regression_check,
                        run_checks, simulate)
from .two_period import ComparisonReport, TwoPeriodSolution, solve_no_disclosure

SOLVE_COLUMNS = ("n", "beta", "theta", "lambda", "gamma", "gamma_prime", "eta",
                 "sigma_z_sq", "Sigma", "alpha", "omega", "phi", "delta")
FIGURE_COLUMNS = ("figure", "K", "n", "series", "value")
COMPARE_COLUMNS = ("K", "section", "name", "lhs", "rhs", "relation", "satisfied",
                   "margin", "expected", "agrees")
FIGURE_IDS = ("lambda", "sigma", "profit", "noise_var", "beta", "theta", "gamma",
              "gamma_prime", "volume")
DEFAULT_K_GRID = (0.5, 0.8, 1.0, 1.2, 1.8)


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def round12(value):
    """Round floats (recursively) to 12 significant digits for JSON output."""
    if isinstance(value, float):
        return float(format(value, ".12g")) if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: round12(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round12(v) for v in value]
    return value


def to_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(round12(obj), indent=2, sort_keys=True) + "\n"


# --- solve ----------------------------------------------------------------

def solve(params: ModelParams, regime: Regime = Regime.DISCLOSURE):
    validate(params)
    validate_regime(params, regime)
    if Regime(regime) is Regime.NO_DISCLOSURE:
        return solve_no_disclosure(params)
    return solve_sequential(params)


def solve_rows(sol: EquilibriumSolution | TwoPeriodSolution) -> list[dict]:
    """One row per auction; value coefficients price profit after that auction."""
    if isinstance(sol, EquilibriumSolution):
        return [{"n": c.n, "beta": c.beta, "theta": c.theta, "lambda": c.lam, "gamma": c.gamma,
                 "gamma_prime": c.gamma_prime, "eta": c.eta, "sigma_z_sq": c.sigma_z_sq,
                 "Sigma": c.Sigma, "alpha": c.alpha, "omega": c.omega, "phi": c.phi,
                 "delta": c.delta} for c in sol.periods]
    return [
        {"n": 1, "beta": sol.beta1, "theta": sol.theta1, "lambda": sol.lambda1,
         "gamma": sol.gamma1, "gamma_prime": sol.gamma1_prime, "eta": sol.eta1,
         "sigma_z_sq": sol.sigma_z1_sq if sol.sigma_z1_sq is not None else 0.0,
         "Sigma": sol.Sigma1, "alpha": sol.alpha1, "omega": sol.omega1, "phi": sol.phi1,
         "delta": sol.delta1},
        {"n": 2, "beta": sol.beta2, "theta": sol.theta2, "lambda": sol.lambda2,
         "gamma": sol.gamma2, "gamma_prime": None, "eta": None, "sigma_z_sq": 0.0,
         "Sigma": sol.Sigma2, "alpha": 0.0, "omega": 0.0, "phi": 0.0, "delta": 0.0},
    ]


# --- figures --------------------------------------------------------------

@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    K_grid: tuple[float, ...] = DEFAULT_K_GRID
    N: int = 20
    p0: float = 0.0
    Sigma0: float = 1.0
    sigma_mu_sq: float = 1.0

    def __post_init__(self):
        from .errors import ValidationError
        if self.figure_id not in FIGURE_IDS:
            raise ValidationError(f"unknown figure {self.figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
        if not self.K_grid:
            raise ValidationError("K grid is empty")
        for K in self.K_grid:
            validate(self.params(K))

    def params(self, K: float) -> ModelParams:
        return ModelParams(K=K, p0=self.p0, Sigma0=self.Sigma0, sigma_mu_sq=self.sigma_mu_sq, N=self.N)


_COLUMN_FIGURES = {"lambda": "lam", "sigma": "Sigma", "noise_var": "sigma_z_sq", "beta": "beta",
                   "theta": "theta", "gamma": "gamma", "gamma_prime": "gamma_prime"}
_SERIES_NAMES = {"lambda": "lambda", "sigma": "Sigma", "noise_var": "sigma_z_sq"}
_WITHOUT = {"lambda": ("lambda1", "lambda2"), "sigma": ("Sigma1", "Sigma2"),
            "beta": ("beta1", "beta2"), "theta": ("theta1", "theta2"),
            "gamma": ("gamma1", "gamma2")}


def figure_rows(spec: FigureSpec) -> list[dict]:
    """Long-format data for one figure across the K grid.

    Series suffixed ``_without`` come from the no-disclosure equilibrium
    and are emitted only for ``N = 2``.
    """
    rows: list[dict] = []
    fid = spec.figure_id

    def add(K, n, series, value):
        rows.append({"figure": fid, "K": K, "n": n, "series": series, "value": value})

    for K in spec.K_grid:
        prm = spec.params(K)
        sol = solve_sequential(prm)
        nd = solve_no_disclosure(prm) if prm.N == 2 else None
        if fid in _COLUMN_FIGURES:
            name = _SERIES_NAMES.get(fid, fid)
            for n, v in enumerate(sol.column(_COLUMN_FIGURES[fid]), start=1):
                add(K, n, name, v)
            if nd is not None and fid in _WITHOUT:
                for n, attr in enumerate(_WITHOUT[fid], start=1):
                    add(K, n, name + "_without", getattr(nd, attr))
        elif fid == "profit":
            for measure in ProfitMeasure:
                for n, v in enumerate(expected_profit_series(sol, measure).per_period, start=1):
                    add(K, n, measure.value, v)
            if nd is not None:
                add(K, 1, "hybrid_without", nd.expected_profit1 - nd.expected_profit2)
                add(K, 2, "hybrid_without", nd.expected_profit2)
        elif fid == "volume":
            vs = expected_volume_series(sol)
            for series in ("expected_volume", "V_i", "V_l", "V_m"):
                for n, v in enumerate(getattr(vs, series), start=1):
                    add(K, n, series, v)
    return rows


# --- comparisons ----------------------------------------------------------

def compare_rows(reports: Sequence[ComparisonReport]) -> list[dict]:
    out = []
    for rep in reports:
        for r in rep.rows:
            out.append({"K": rep.params.K, "section": r.section, "name": r.name, "lhs": r.lhs,
                        "rhs": r.rhs, "relation": r.relation, "satisfied": r.satisfied,
                        "margin": r.margin, "expected": r.expected, "agrees": r.agrees})
    return out


# --- simulation -----------------------------------------------------------

def _est(e) -> dict:
    return {"mean": e.mean, "se": e.se}


def simulation_report(config: SimulationConfig, sol, stats: SimulationStats,
                      regression: bool = True) -> dict:
    """JSON-ready report; deliberately omits the worker count."""
    checks = {c.name: c for c in run_checks(stats, sol)}
    prm = config.params
    per_period = []
    for k in range(stats.N):
        per_period.append({
            "n": k + 1,
            "insider_profit": _est(stats.insider_profit[k]),
            "mm_profit": _est(stats.mm_profit[k]),
            "abs_x": _est(stats.abs_x[k]),
            "abs_y": _est(stats.abs_y[k]),
            "abs_mu": _est(stats.abs_mu[k]),
            "volume": _est(stats.volume[k]),
            "var_v_minus_pstar": _est(stats.var_v_minus_pstar[k]),
        })
    report = {
        "params": {"K": prm.K, "p0": prm.p0, "Sigma0": prm.Sigma0,
                   "sigma_mu_sq": prm.sigma_mu_sq, "N": prm.N},
        "regime": config.regime.value,
        "paths": config.n_paths,
        "seed": config.master_seed,
        "backend": stats.backend,
        "periods": per_period,
        "total_insider_profit": _est(stats.total_insider_profit),
        "checks": {name: {"passed": c.passed, "detail": c.detail} for name, c in checks.items()},
        "zero_profit_pass": checks["zero_profit"].passed,
        "sigma_pass": checks["sigma"].passed,
        "volume_pass": checks["volume"].passed,
        "realized_profit_pass": checks["realized_profit"].passed,
    }
    gating = [checks[k].passed for k in ("zero_profit", "sigma", "volume")]
    report["all_passed"] = all(p is not False for p in gating)
    if regression and stats.paths is not None and stats.n_paths >= 10_000:
        report["regression"] = [
            {"n": r.n, "lambda_hat": r.lam_hat, "lambda_se": r.lam_se,
             "gamma_hat": r.gamma_hat, "gamma_se": r.gamma_se}
            for r in empirical_regression_check(stats)
        ]
    return report


def run_simulation(config: SimulationConfig) -> tuple[dict, object, SimulationStats]:
    sol = solve(config.params, config.regime)
    keep = config.n_paths >= 10_000
    if keep != config.keep_paths:
        config = SimulationConfig(config.n_paths, config.master_seed, config.params, config.regime,
                                  config.workers, keep, config.block_size)
    stats = simulate(config, sol)
    return simulation_report(config, sol, stats), sol, stats
