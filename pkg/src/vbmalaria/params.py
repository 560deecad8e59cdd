"""Model parameters: validation, the shipped baseline, and JSON config loading.

All rates are per day; populations are head counts. The two control knobs are
``bednet`` (proportion of insecticide-treated-net users, written b) and
``pi_bias`` (ratio of mosquito biting probabilities infectious/susceptible,
written pi; pi = 1 means host preference is switched off).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ParameterError

FIELD_NAMES = (
    "lambda_h", "lambda_v", "mu", "eta_nat", "eta_bn", "alpha",
    "p1", "p2", "beta_max", "beta_min", "delta", "pi_bias", "bednet",
)

# Short override keys accepted by the CLI and config loaders.
FIELD_ALIASES = {"b": "bednet", "pi": "pi_bias"}


@dataclass(frozen=True)
class ModelParams:
    """Biological and control constants of the model.

    Attributes:
        lambda_h: human immigration rate (individuals/day).
        lambda_v: mosquito immigration rate (individuals/day).
        mu: human natural mortality (1/day).
        eta_nat: mosquito natural mortality (1/day).
        eta_bn: maximum bed-net-induced mosquito mortality (1/day).
        alpha: disease-induced human mortality (1/day).
        p1: mosquito-to-human transmission probability.
        p2: human-to-mosquito transmission probability.
        beta_max: maximum transmission rate (1/day).
        beta_min: minimum transmission rate (1/day).
        delta: human recovery rate (1/day).
        pi_bias: vector-bias ratio p/q, >= 1.
        bednet: bed-net usage proportion b in [0, 1].
    """

    lambda_h: float
    lambda_v: float
    mu: float
    eta_nat: float
    eta_bn: float
    alpha: float
    p1: float
    p2: float
    beta_max: float
    beta_min: float
    delta: float
    pi_bias: float
    bednet: float

    def __post_init__(self):
        for name in ("lambda_h", "lambda_v", "mu", "eta_nat", "beta_max", "delta"):
            v = getattr(self, name)
            if not v > 0.0:
                raise ParameterError(f"{name} must be > 0; got {v!r}")
        for name in ("alpha", "beta_min", "eta_bn"):
            v = getattr(self, name)
            if not v >= 0.0:
                raise ParameterError(f"{name} must be >= 0; got {v!r}")
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1]; got {v!r}")
        if not self.pi_bias >= 1.0:
            raise ParameterError(
                f"pi_bias must be >= 1 (vector-bias ratio p/q; 1 disables host "
                f"preference); got {self.pi_bias!r}")
        if not 0.0 <= self.bednet <= 1.0:
            raise ParameterError(
                f"bednet must lie in [0, 1] (proportion of net users); got {self.bednet!r}")
        if not self.beta_min <= self.beta_max:
            raise ParameterError(
                f"beta_min must not exceed beta_max; got beta_min={self.beta_min!r}, "
                f"beta_max={self.beta_max!r}")

    @property
    def alpha0(self) -> float:
        """Total exit rate from the infectious-human compartment, alpha + mu + delta."""
        return self.alpha + self.mu + self.delta

    def replace(self, **changes) -> "ModelParams":
        """Copy with the given fields changed; the copy is re-validated."""
        resolved = {FIELD_ALIASES.get(k, k): v for k, v in changes.items()}
        for key in resolved:
            if key not in FIELD_NAMES:
                raise ParameterError(
                    f"unknown parameter field {key!r}; valid fields: "
                    f"{', '.join(FIELD_NAMES)} (aliases: b=bednet, pi=pi_bias)")
        return dataclasses.replace(self, **resolved)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FIELD_NAMES}


# Shipped baseline. Human values use a 70-year lifespan and a standing
# population of 1000; mosquito lifespan is 21 days with a standing population
# of 10^4. pi_bias and bednet are study knobs and default to the neutral
# choices pi = 1, b = 0.
TABLE1 = ModelParams(
    lambda_h=1000.0 / (70.0 * 365.0),
    lambda_v=10_000.0 / 21.0,
    mu=1.0 / (70.0 * 365.0),
    eta_nat=1.0 / 21.0,
    eta_bn=1.0 / 21.0,
    alpha=1e-3,
    p1=1.0,
    p2=1.0,
    beta_max=0.1,
    beta_min=0.0,
    delta=0.25,
    pi_bias=1.0,
    bednet=0.0,
)

NAMED_PARAMS = {"table1": TABLE1}


def load_params(source: str | Path) -> ModelParams:
    """Load parameters from a named default or a JSON document.

    The JSON document must map the thirteen field names to numbers; the short
    aliases ``b`` and ``pi`` are also accepted.
    """
    if isinstance(source, str) and source in NAMED_PARAMS:
        return NAMED_PARAMS[source]
    path = Path(source)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ParameterError(
            f"parameter source {str(source)!r} is neither a named default "
            f"({', '.join(sorted(NAMED_PARAMS))}) nor a readable file") from None
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed parameter file {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ParameterError(f"parameter file {path} must contain a JSON object")
    resolved = {}
    for key, value in raw.items():
        name = FIELD_ALIASES.get(key, key)
        if name not in FIELD_NAMES:
            raise ParameterError(f"unknown parameter field {key!r} in {path}")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ParameterError(f"field {key!r} in {path} must be a number; got {value!r}")
        resolved[name] = float(value)
    missing = [name for name in FIELD_NAMES if name not in resolved]
    if missing:
        raise ParameterError(f"parameter file {path} is missing fields: {', '.join(missing)}")
    return ModelParams(**resolved)
