"""Closed-form sensitivities of R0 and of the backward-bifurcation indicator,
critical bed-net coverage, and (pi, b) surface grids.

Normalized index: S_psi = (psi / R0) dR0/dpsi. The vector-bias index is
identically 1 (R0 is linear in pi); the bed-net index is

    S_b = -2 b [ (beta_max - beta_min)/beta(b) + eta_bn/eta(b) ].

Eradication threshold from R0(b) < 1:

    b_crit = (sqrt(pi) beta_max - eta_nat sqrt(phi))
             / (sqrt(pi) (beta_max - beta_min) + eta_bn sqrt(phi)),
    phi = (alpha + mu + delta) Lambda_h / (p1 p2 mu Lambda_v),

with b_1 the pi = 1 specialization.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bifurcation, equilibria, model
from .errors import CriticalityError, InternalConsistencyError, ParameterError
from .model import ModelParams


def phi_tilde(params: ModelParams) -> float:
    """(alpha + mu + delta) Lambda_h / (p1 p2 mu Lambda_v)."""
    if params.p1 * params.p2 <= 0.0:
        raise ParameterError("phi_tilde requires p1 p2 > 0")
    return (params.alpha0 * params.lambda_h
            / (params.p1 * params.p2 * params.mu * params.lambda_v))


def _r0_of_raw(params: ModelParams, b: float, pi: float) -> float:
    """R0 with b and pi as free real numbers (for derivative stencils only)."""
    beta = params.beta_max - b * (params.beta_max - params.beta_min)
    eta = params.eta_nat + params.eta_bn * b
    return (pi * params.p1 * params.p2 * params.mu * params.lambda_v * beta * beta
            / (params.lambda_h * eta * eta * params.alpha0))


def _theta_of_raw(params: ModelParams, b: float, pi: float) -> float:
    beta = params.beta_max - b * (params.beta_max - params.beta_min)
    eta = params.eta_nat + params.eta_bn * b
    lh = params.lambda_h
    return ((params.alpha + params.mu) / lh - 2.0 * pi * params.mu / lh
            - params.alpha0 * eta / (beta * params.p1 * params.lambda_v))


def _check_fd(name: str, closed: float, fd: float, f_scale: float, h: float) -> None:
    """1e-5 relative agreement, above the stencil's own roundoff floor.

    A central difference of a function of size f_scale carries cancellation
    noise of order eps * f_scale / h, which dominates when the derivative is
    many orders smaller than the function.
    """
    noise = 64.0 * np.finfo(float).eps * f_scale / h
    if abs(closed - fd) > 1e-5 * max(abs(closed), abs(fd)) + noise:
        raise InternalConsistencyError(
            f"closed-form {name} = {closed!r} disagrees with finite difference {fd!r}")


@dataclass(frozen=True)
class SensitivityReport:
    """Derivatives, normalized indices, and coverage thresholds."""

    s_pi: float
    s_b: float
    dr0_db: float
    dr0_dpi: float
    dtheta_dpi: float
    dtheta_db: float
    b_crit: Optional[float]       # None when eradication is unattainable at b = 1
    b_1: Optional[float]
    phi_tilde: float

    def to_dict(self) -> dict:
        return {
            "s_pi": self.s_pi,
            "s_b": self.s_b,
            "dr0_db": self.dr0_db,
            "dr0_dpi": self.dr0_dpi,
            "dtheta_dpi": self.dtheta_dpi,
            "dtheta_db": self.dtheta_db,
            "b_crit": self.b_crit if self.b_crit is not None else "unattainable",
            "b_1": self.b_1 if self.b_1 is not None else "unattainable",
            "phi_tilde": self.phi_tilde,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _b_threshold(params: ModelParams, pi: float) -> Optional[float]:
    """Smallest b in [0, 1] with R0(b) <= 1 at the given pi, or None.

    The closed form is clamped to 0 when R0(0) is already below 1; the round
    trip R0(b_crit) = 1 is verified to 1e-8 whenever the threshold is
    interior.
    """
    sp = math.sqrt(pi)
    sf = math.sqrt(phi_tilde(params))
    num = sp * params.beta_max - params.eta_nat * sf
    den = sp * (params.beta_max - params.beta_min) + params.eta_bn * sf
    if den <= 0.0:
        # beta and eta are both b-independent; R0 cannot be moved by b.
        return None if _r0_of_raw(params, 0.0, pi) > 1.0 else 0.0
    b = num / den
    if b > 1.0:
        return None
    if b < 0.0:
        return 0.0
    r0_at = _r0_of_raw(params, b, pi)
    if abs(r0_at - 1.0) > 1e-8:
        raise InternalConsistencyError(
            f"R0 at the coverage threshold is {r0_at!r}, not 1")
    return b


def critical_bednet_coverage(params: ModelParams) -> tuple[Optional[float], Optional[float]]:
    """(b_crit, b_1): minimal coverage making R0 <= 1, at pi and at pi = 1.

    None flags an unattainable threshold (R0(1) > 1).
    """
    if params.p1 * params.p2 <= 0.0:
        raise ParameterError("coverage thresholds require p1 p2 > 0")
    return _b_threshold(params, params.pi_bias), _b_threshold(params, 1.0)


def sensitivity_indices(params: ModelParams) -> SensitivityReport:
    """Closed-form derivatives and indices, each cross-checked against a
    central finite difference (step 1e-6, relative tolerance 1e-5)."""
    beta = model.contact_rate(params)
    if beta <= 0.0:
        raise CriticalityError("sensitivities are undefined at beta(b) = 0")
    eta = model.mosquito_death_rate(params)
    r0 = equilibria.basic_reproduction_number(params)
    b, pi = params.bednet, params.pi_bias

    dbeta = -(params.beta_max - params.beta_min)
    dr0_db = (2.0 * pi * params.p1 * params.p2 * params.mu * params.lambda_v
              * (beta * dbeta * eta * eta - eta * params.eta_bn * beta * beta)
              / (params.lambda_h * params.alpha0 * eta ** 4))
    dr0_dpi = (params.p1 * params.p2 * params.mu * params.lambda_v * beta * beta
               / (params.lambda_h * eta * eta * params.alpha0))
    s_b = -2.0 * b * ((params.beta_max - params.beta_min) / beta + params.eta_bn / eta)
    dtheta_dpi, dtheta_db = bifurcation.theta_derivatives(params)

    h = 1e-6
    fd = (_r0_of_raw(params, b + h, pi) - _r0_of_raw(params, b - h, pi)) / (2 * h)
    _check_fd("dR0/db", dr0_db, fd, r0, h)
    fd = (_r0_of_raw(params, b, pi + h) - _r0_of_raw(params, b, pi - h)) / (2 * h)
    _check_fd("dR0/dpi", dr0_dpi, fd, r0, h)
    th_scale = ((params.alpha + params.mu) / params.lambda_h
                + 2.0 * pi * params.mu / params.lambda_h
                + params.alpha0 * eta / (beta * params.p1 * params.lambda_v))
    fd = (_theta_of_raw(params, b, pi + h) - _theta_of_raw(params, b, pi - h)) / (2 * h)
    _check_fd("dtheta/dpi", dtheta_dpi, fd, th_scale, h)
    fd = (_theta_of_raw(params, b + h, pi) - _theta_of_raw(params, b - h, pi)) / (2 * h)
    _check_fd("dtheta/db", dtheta_db, fd, th_scale, h)

    b_crit, b_1 = critical_bednet_coverage(params)
    return SensitivityReport(
        s_pi=1.0,   # (pi/R0) dR0/dpi: R0 is linear in pi
        s_b=s_b,
        dr0_db=dr0_db,
        dr0_dpi=dr0_dpi,
        dtheta_dpi=dtheta_dpi,
        dtheta_db=dtheta_db,
        b_crit=b_crit,
        b_1=b_1,
        phi_tilde=phi_tilde(params),
    )


def grid_surface(params: ModelParams, pi_values: Sequence[float],
                 b_values: Sequence[float], quantity: str) -> np.ndarray:
    """Dense evaluation of R0 or theta on a (pi, b) grid.

    Returns a matrix with rows following ``pi_values`` and columns following
    ``b_values``. The theta surface diverges where beta(b) = 0 (b = 1 with
    beta_min = 0); such grids are rejected.
    """
    if quantity not in ("R0", "theta"):
        raise ParameterError(f"quantity must be 'R0' or 'theta'; got {quantity!r}")
    pi_arr = np.asarray(pi_values, dtype=float)
    b_arr = np.asarray(b_values, dtype=float)
    if np.any(pi_arr < 1.0):
        raise ParameterError("pi grid values must be >= 1")
    if np.any(b_arr < 0.0) or np.any(b_arr > 1.0):
        raise ParameterError("b grid values must lie in [0, 1]")
    out = np.empty((len(pi_arr), len(b_arr)))
    for j, b in enumerate(b_arr):
        beta = params.beta_max - b * (params.beta_max - params.beta_min)
        if quantity == "theta" and beta <= 0.0:
            raise CriticalityError(
                f"theta diverges at b={b!r} where beta(b) = 0; cap the b grid below it")
        for i, pi in enumerate(pi_arr):
            out[i, j] = (_r0_of_raw(params, b, pi) if quantity == "R0"
                         else _theta_of_raw(params, b, pi))
    return out


def write_surface_csv(pi_values: Sequence[float], b_values: Sequence[float],
                      values: np.ndarray, path: str | Path) -> None:
    """Surface CSV: first row the b grid, first column the pi grid, body values."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pi\\b"] + [repr(float(b)) for b in b_values])
        for pi, row in zip(pi_values, values):
            writer.writerow([repr(float(pi))] + [repr(float(v)) for v in row])
