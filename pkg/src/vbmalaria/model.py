"""Core model: compartment states, control functions, forces of infection,
and the right-hand sides of the full 4D and reduced 3D systems.

Full system (S_h, I_h, S_v, I_v):

    S_h' = Lambda_h - lambda_h S_h - mu S_h + delta I_h
    I_h' = lambda_h S_h - (alpha + mu + delta) I_h
    S_v' = Lambda_v - lambda_v S_v - eta(b) S_v
    I_v' = lambda_v S_v - eta(b) I_v

with forces of infection

    lambda_h = p1 beta(b) I_v / (pi I_h + S_h)
    lambda_v = pi p2 beta(b) I_h / (pi I_h + S_h)

and controls beta(b) = beta_max - b (beta_max - beta_min),
eta(b) = eta_nat + eta_bn b.

The reduced system holds the total mosquito population at its equilibrium
value V = Lambda_v / eta(b) and tracks (S_h, I_h, I_v) with S_v = V - I_v.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import DegenerateStateError, ParameterError
from .params import ModelParams


@dataclass(frozen=True)
class StateFull:
    """Compartment sizes (individuals) of the full 4D system."""

    s_h: float
    i_h: float
    s_v: float
    i_v: float

    def __post_init__(self):
        for name in ("s_h", "i_h", "s_v", "i_v"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} must be >= 0; got {getattr(self, name)!r}")

    @property
    def n_h(self) -> float:
        return self.s_h + self.i_h

    @property
    def n_v(self) -> float:
        return self.s_v + self.i_v

    def as_array(self) -> np.ndarray:
        return np.array([self.s_h, self.i_h, self.s_v, self.i_v])

    @classmethod
    def from_array(cls, y) -> "StateFull":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))


@dataclass(frozen=True)
class StateReduced:
    """Compartment sizes of the reduced 3D system plus the constant total
    mosquito population V."""

    s_h: float
    i_h: float
    i_v: float
    v_total: float

    def __post_init__(self):
        for name in ("s_h", "i_h", "i_v"):
            if getattr(self, name) < 0.0:
                raise ParameterError(f"{name} must be >= 0; got {getattr(self, name)!r}")
        if self.v_total <= 0.0:
            raise ParameterError(f"v_total must be > 0; got {self.v_total!r}")

    @property
    def n_h(self) -> float:
        return self.s_h + self.i_h

    @property
    def s_v(self) -> float:
        return self.v_total - self.i_v

    def as_array(self) -> np.ndarray:
        return np.array([self.s_h, self.i_h, self.i_v])

    @classmethod
    def from_array(cls, y, v_total: float) -> "StateReduced":
        return cls(float(y[0]), float(y[1]), float(y[2]), v_total)


State = Union[StateFull, StateReduced]


class ForceOfInfection(NamedTuple):
    lambda_h: float  # human force of infection (1/day)
    lambda_v: float  # vector force of infection (1/day)


def contact_rate(params: ModelParams) -> float:
    """Transmission rate beta(b) = beta_max - b (beta_max - beta_min)."""
    return params.beta_max - params.bednet * (params.beta_max - params.beta_min)


def mosquito_death_rate(params: ModelParams) -> float:
    """Mosquito mortality eta(b) = eta_nat + eta_bn b."""
    return params.eta_nat + params.eta_bn * params.bednet


def vector_capacity(params: ModelParams) -> float:
    """Equilibrium total mosquito population V = Lambda_v / eta(b)."""
    return params.lambda_v / mosquito_death_rate(params)


def human_capacity(params: ModelParams) -> float:
    """Upper bound Lambda_h / mu on the total human population."""
    return params.lambda_h / params.mu


def reduced_state(params: ModelParams, s_h: float, i_h: float, i_v: float) -> StateReduced:
    """Reduced state with V pinned to the model's vector capacity."""
    return StateReduced(s_h, i_h, i_v, vector_capacity(params))


def _forces(params: ModelParams, s_h: float, i_h: float, i_v: float) -> tuple[float, float]:
    denom = params.pi_bias * i_h + s_h
    if denom <= 0.0:
        # Continuous extension at the origin corner: with no humans and no
        # infectious vectors there is nothing to transmit.
        if i_h == 0.0 and i_v == 0.0:
            return 0.0, 0.0
        raise DegenerateStateError(
            f"pi*I_h + S_h = {denom!r} with infection present (I_h={i_h!r}, I_v={i_v!r})")
    beta = contact_rate(params)
    lam_h = params.p1 * beta * i_v / denom
    lam_v = params.pi_bias * params.p2 * beta * i_h / denom
    return lam_h, lam_v


def forces_of_infection(params: ModelParams, state: State) -> ForceOfInfection:
    """Forces of infection at a state of either system."""
    lam_h, lam_v = _forces(params, state.s_h, state.i_h, state.i_v)
    return ForceOfInfection(lam_h, lam_v)


def make_rhs_full(params: ModelParams) -> Callable[[np.ndarray], np.ndarray]:
    """Time derivative of the full system as a fast closure on raw arrays."""
    lh, mu, delta = params.lambda_h, params.mu, params.delta
    lv_imm, alpha0 = params.lambda_v, params.alpha0
    eta = mosquito_death_rate(params)
    beta = contact_rate(params)
    pi, p1, p2 = params.pi_bias, params.p1, params.p2

    def rhs(y: np.ndarray) -> np.ndarray:
        s_h, i_h, s_v, i_v = y[0], y[1], y[2], y[3]
        denom = pi * i_h + s_h
        if denom <= 0.0:
            if i_h == 0.0 and i_v == 0.0:
                lam_h = lam_v = 0.0
            else:
                raise DegenerateStateError(
                    f"pi*I_h + S_h = {denom!r} with infection present")
        else:
            lam_h = p1 * beta * i_v / denom
            lam_v = pi * p2 * beta * i_h / denom
        return np.array([
            lh - lam_h * s_h - mu * s_h + delta * i_h,
            lam_h * s_h - alpha0 * i_h,
            lv_imm - lam_v * s_v - eta * s_v,
            lam_v * s_v - eta * i_v,
        ])

    return rhs


def make_rhs_reduced(params: ModelParams) -> Callable[[np.ndarray], np.ndarray]:
    """Time derivative of the reduced system as a fast closure on raw arrays."""
    lh, mu, delta = params.lambda_h, params.mu, params.delta
    alpha0 = params.alpha0
    eta = mosquito_death_rate(params)
    beta = contact_rate(params)
    pi, p1, p2 = params.pi_bias, params.p1, params.p2
    v_total = vector_capacity(params)

    def rhs(y: np.ndarray) -> np.ndarray:
        s_h, i_h, i_v = y[0], y[1], y[2]
        denom = pi * i_h + s_h
        if denom <= 0.0:
            if i_h == 0.0 and i_v == 0.0:
                lam_h = lam_v = 0.0
            else:
                raise DegenerateStateError(
                    f"pi*I_h + S_h = {denom!r} with infection present")
        else:
            lam_h = p1 * beta * i_v / denom
            lam_v = pi * p2 * beta * i_h / denom
        return np.array([
            lh - lam_h * s_h - mu * s_h + delta * i_h,
            lam_h * s_h - alpha0 * i_h,
            lam_v * (v_total - i_v) - eta * i_v,
        ])

    return rhs


def rhs_full(params: ModelParams, state: StateFull) -> np.ndarray:
    """Component derivatives (dS_h, dI_h, dS_v, dI_v) of the full system."""
    return make_rhs_full(params)(state.as_array())


def rhs_reduced(params: ModelParams, state: StateReduced) -> np.ndarray:
    """Component derivatives (dS_h, dI_h, dI_v) of the reduced system.

    Uses the V stored on the state, which normally equals vector_capacity().
    """
    lam_h, lam_v = _forces(params, state.s_h, state.i_h, state.i_v)
    eta = mosquito_death_rate(params)
    return np.array([
        params.lambda_h - lam_h * state.s_h - params.mu * state.s_h + params.delta * state.i_h,
        lam_h * state.s_h - params.alpha0 * state.i_h,
        lam_v * (state.v_total - state.i_v) - eta * state.i_v,
    ])


def rhs_scale_full(params: ModelParams, state: StateFull) -> np.ndarray:
    """Per-equation magnitude scales: sums of absolute values of the terms.

    Used to judge residuals relatively without cancellation artifacts.
    """
    lam_h, lam_v = _forces(params, state.s_h, state.i_h, state.i_v)
    eta = mosquito_death_rate(params)
    return np.array([
        params.lambda_h + lam_h * state.s_h + params.mu * state.s_h + params.delta * state.i_h,
        lam_h * state.s_h + params.alpha0 * state.i_h,
        params.lambda_v + lam_v * state.s_v + eta * state.s_v,
        lam_v * state.s_v + eta * state.i_v,
    ])


def rhs_scale_reduced(params: ModelParams, state: StateReduced) -> np.ndarray:
    lam_h, lam_v = _forces(params, state.s_h, state.i_h, state.i_v)
    eta = mosquito_death_rate(params)
    return np.array([
        params.lambda_h + lam_h * state.s_h + params.mu * state.s_h + params.delta * state.i_h,
        lam_h * state.s_h + params.alpha0 * state.i_h,
        lam_v * (state.v_total - state.i_v) + eta * state.i_v,
    ])


def equilibrium_residual(params: ModelParams, state: State) -> float:
    """Largest per-equation residual of the state, relative to term magnitudes."""
    if isinstance(state, StateFull):
        r = rhs_full(params, state)
        scale = rhs_scale_full(params, state)
    else:
        r = rhs_reduced(params, state)
        scale = rhs_scale_reduced(params, state)
    return float(np.max(np.abs(r) / np.maximum(scale, 1e-300)))


def in_region(params: ModelParams, state: State, rel_tol: float = 1e-9) -> bool:
    """Membership in the positively invariant box, with relative slack.

    Full system: components >= 0, N_h <= Lambda_h/mu, N_v <= Lambda_v/eta(b).
    Reduced system: components >= 0, N_h <= Lambda_h/mu, I_v <= V.
    """
    cap_h = human_capacity(params)
    if isinstance(state, StateFull):
        cap_v = vector_capacity(params)
        return (state.s_h >= -rel_tol * cap_h
                and state.i_h >= -rel_tol * cap_h
                and state.s_v >= -rel_tol * cap_v
                and state.i_v >= -rel_tol * cap_v
                and state.n_h <= cap_h * (1.0 + rel_tol)
                and state.n_v <= cap_v * (1.0 + rel_tol))
    cap_v = state.v_total
    return (state.s_h >= -rel_tol * cap_h
            and state.i_h >= -rel_tol * cap_h
            and state.i_v >= -rel_tol * cap_v
            and state.n_h <= cap_h * (1.0 + rel_tol)
            and state.i_v <= cap_v * (1.0 + rel_tol))
