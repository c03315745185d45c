"""Exogenous model primitives and regime selection."""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from .errors import (
    NonPositiveVariance,
    OutOfRangeK,
    UnsupportedRegime,
    ValidationError,
    ZeroPeriods,
)


class Regime(str, enum.Enum):
    DISCLOSURE = "disclosure"
    NO_DISCLOSURE = "no-disclosure"


@dataclass(frozen=True)
class ModelParams:
    """Primitives of the sequential-auction economy.

    Parameters
    ----------
    K : float
        Belief parameter. The insider believes ``s = v / K`` while market
        makers believe ``s = v``; ``K > 1`` is overconfidence.
    p0 : float
        Prior mean of the liquidation value.
    Sigma0 : float
        Prior variance of the liquidation value.
    sigma_mu_sq : float
        Variance of noise-trader demand in every auction.
    N : int
        Number of auctions.
    """

    K: float = 1.0
    p0: float = 0.0
    Sigma0: float = 1.0
    sigma_mu_sq: float = 1.0
    N: int = 20

    @property
    def sigma_mu(self) -> float:
        return math.sqrt(self.sigma_mu_sq)

    def replace(self, **changes: Any) -> "ModelParams":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ModelParams(**values)


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged if an equilibrium can exist, else raise.

    Raises
    ------
    OutOfRangeK
        ``K`` is not strictly inside ``(0, 2)``.
    NonPositiveVariance
        ``Sigma0`` or ``sigma_mu_sq`` is not a positive finite number.
    ZeroPeriods
        ``N`` is not an integer of at least one.
    """
    K = params.K
    if not (isinstance(K, (int, float)) and 0.0 < K < 2.0):
        raise OutOfRangeK(f"K out of (0,2): got {K!r}")
    for name in ("Sigma0", "sigma_mu_sq"):
        value = getattr(params, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0.0):
            raise NonPositiveVariance(f"{name} must be positive and finite: got {value!r}")
    if not (isinstance(params.p0, (int, float)) and math.isfinite(params.p0)):
        raise ValidationError(f"p0 must be finite: got {params.p0!r}")
    N = params.N
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise ZeroPeriods(f"N must be an integer >= 1: got {N!r}")
    return params


def validate_regime(params: ModelParams, regime: Regime) -> ModelParams:
    validate(params)
    if Regime(regime) is Regime.NO_DISCLOSURE and params.N != 2:
        raise UnsupportedRegime(f"no-disclosure regime requires N=2: got N={params.N}")
    return params


CONFIG_KEYS = ("K", "p0", "Sigma0", "sigma_mu_sq", "N", "regime")


def params_from_mapping(data: Mapping[str, Any]) -> tuple[ModelParams, Regime]:
    """Build parameters from a JSON-style mapping with the documented keys."""
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    kwargs: dict[str, Any] = {}
    for key in ("K", "p0", "Sigma0", "sigma_mu_sq"):
        if key in data:
            try:
                kwargs[key] = float(data[key])
            except (TypeError, ValueError):
                raise ValidationError(f"{key} must be a number: got {data[key]!r}") from None
    if "N" in data:
        N = data["N"]
        if isinstance(N, float) and N.is_integer():
            N = int(N)
        kwargs["N"] = N
    try:
        regime = Regime(data.get("regime", Regime.DISCLOSURE.value))
    except ValueError:
        raise ValidationError(f"unknown regime: {data.get('regime')!r}") from None
    params = ModelParams(**kwargs)
    validate_regime(params, regime)
    return params, regime


def load_config(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {str(path)!r} is not valid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ValidationError("config document must be a JSON object")
    return data
