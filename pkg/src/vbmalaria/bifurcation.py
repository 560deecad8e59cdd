"""Centre-manifold analysis at the transmission criticality R0 = 1 and
branch sweeps for bifurcation diagrams.

With p2 as bifurcation parameter, the disease-free equilibrium loses
hyperbolicity at p2_crit (a simple zero eigenvalue). The normal form on the
centre manifold is u' = a u^2 + b xi u; b > 0 always holds here, so the sign
of ``a`` decides the direction: a > 0 means a backward (subcritical)
transition with a window of bistability below R0 = 1, a < 0 a forward one.
The sign of ``a`` is carried by the closed-form indicator

    theta = (alpha + mu)/Lambda_h - 2 pi mu/Lambda_h
            - alpha0 eta / (beta p1 Lambda_v)

through a = 2 p1 beta eta / (eta + alpha0) * theta.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import equilibria, model, stability
from .errors import CriticalityError, InternalConsistencyError, ParameterError
from .model import ModelParams


def critical_p2(params: ModelParams) -> float:
    """The p2 value at which R0 = 1: Lambda_h eta^2 alpha0 / (pi p1 mu Lambda_v beta^2).

    Verified by the round trip R0(p2_crit) = 1 to 1e-12 relative.
    """
    beta = model.contact_rate(params)
    if beta <= 0.0:
        raise CriticalityError("no criticality exists: beta(b) = 0")
    if params.p1 <= 0.0:
        raise CriticalityError("no criticality exists: p1 = 0")
    p2c = equilibria._p2_at_unit_r0(params)
    r0_at = equilibria._r0_raw(params, p2c)
    if abs(r0_at - 1.0) > 1e-12:
        raise InternalConsistencyError(
            f"R0 at the computed criticality is {r0_at!r}, not 1")
    return p2c


def params_at_criticality(params: ModelParams) -> ModelParams:
    """Copy of ``params`` with p2 set to p2_crit (which must lie in [0, 1])."""
    return params.replace(p2=critical_p2(params))


def _require_critical(params: ModelParams, tol: float = 1e-9) -> None:
    r0 = equilibria.basic_reproduction_number(params)
    if abs(r0 - 1.0) > tol:
        raise CriticalityError(
            f"operation requires p2 = p2_crit (R0 = 1 within {tol:g}); got R0={r0!r}")


def eigenvectors_at_criticality(params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Left and right null eigenvectors (v, w) of the Jacobian at the
    disease-free equilibrium at criticality, normalized so v . w = 1.

    Closed forms; residuals |J w| and |v^T J| are verified below 1e-10 of the
    Jacobian's scale.
    """
    _require_critical(params)
    beta = model.contact_rate(params)
    eta = model.mosquito_death_rate(params)
    alpha0, p1 = params.alpha0, params.p1
    a_mu = params.alpha + params.mu
    v = np.array([0.0,
                  eta * alpha0 / (p1 * beta * (eta + alpha0)),
                  0.0,
                  alpha0 / (eta + alpha0)])
    w = np.array([-p1 * beta * a_mu / (params.mu * alpha0),
                  p1 * beta / alpha0,
                  -1.0,
                  1.0])
    w = w / float(v @ w)

    jac = stability.jacobian_full(params, equilibria.disease_free_equilibrium(params))
    scale = np.max(np.abs(jac)) * max(1.0, float(np.max(np.abs(w))))
    if np.max(np.abs(jac @ w)) > 1e-10 * scale or np.max(np.abs(v @ jac)) > 1e-10 * scale:
        raise InternalConsistencyError("closed-form null eigenvectors fail the Jacobian residual check")
    return v, w


def theta(params: ModelParams) -> float:
    """Backward-bifurcation indicator; positive means backward."""
    beta = model.contact_rate(params)
    if beta <= 0.0:
        raise CriticalityError("theta is undefined at beta(b) = 0")
    eta = model.mosquito_death_rate(params)
    lh = params.lambda_h
    return ((params.alpha + params.mu) / lh
            - 2.0 * params.pi_bias * params.mu / lh
            - params.alpha0 * eta / (beta * params.p1 * params.lambda_v))


def theta_derivatives(params: ModelParams) -> tuple[float, float]:
    """(d theta / d pi, d theta / d b), closed forms.

    d theta/d pi = -2 mu / Lambda_h;
    d theta/d b = -alpha0/(p1 Lambda_v) [eta_bn/beta + eta (beta_max-beta_min)/beta^2].
    """
    beta = model.contact_rate(params)
    if beta <= 0.0:
        raise CriticalityError("theta is undefined at beta(b) = 0")
    eta = model.mosquito_death_rate(params)
    dpi = -2.0 * params.mu / params.lambda_h
    db = -(params.alpha0 / (params.p1 * params.lambda_v)) * (
        params.eta_bn / beta
        + eta * (params.beta_max - params.beta_min) / (beta * beta))
    return dpi, db


def centre_manifold_coefficients(params: ModelParams) -> tuple[float, float]:
    """Normal-form coefficients (a, b) at criticality, cross-checked.

    ``a`` is computed both as the eigenvector-weighted sum of the four
    nonvanishing second derivatives of the right-hand side at the
    disease-free point and through the closed form
    2 p1 beta eta/(eta + alpha0) * theta; the two must agree to 1e-10
    relative. ``b`` (the coefficient on the bifurcation parameter) is the
    v-weighted mixed derivative with respect to p2 and is always positive.
    """
    _require_critical(params)
    v, w = eigenvectors_at_criticality(params)
    beta = model.contact_rate(params)
    eta = model.mosquito_death_rate(params)
    pi, p1, p2 = params.pi_bias, params.p1, params.p2
    sh0 = model.human_capacity(params)
    sv0 = model.vector_capacity(params)

    d2f2_ih_iv = -pi * p1 * beta / sh0
    d2f4_sh_ih = -pi * p2 * beta * sv0 / (sh0 * sh0)
    d2f4_ih_sv = pi * p2 * beta / sh0
    d2f4_ih_ih = -2.0 * pi * pi * p2 * beta * sv0 / (sh0 * sh0)

    terms = (2.0 * v[1] * w[1] * w[3] * d2f2_ih_iv,
             2.0 * v[3] * w[0] * w[1] * d2f4_sh_ih,
             2.0 * v[3] * w[1] * w[2] * d2f4_ih_sv,
             v[3] * w[1] * w[1] * d2f4_ih_ih)
    coeff_a = float(sum(terms))
    closed_form = 2.0 * p1 * beta * eta / (eta + params.alpha0) * theta(params)
    # The 1e-4 * term_scale floor keeps the check meaningful when theta ~ 0
    # and the four terms cancel to roundoff.
    term_scale = sum(abs(t) for t in terms)
    if abs(coeff_a - closed_form) > 1e-10 * max(abs(closed_form), term_scale * 1e-4):
        raise InternalConsistencyError(
            f"centre-manifold coefficient paths disagree: sum={coeff_a!r}, "
            f"closed form={closed_form!r}")

    coeff_b_cm = float(v[3] * w[1] * pi * beta * sv0 / sh0)
    if not coeff_b_cm > 0.0:
        raise InternalConsistencyError(
            f"coefficient on the bifurcation parameter must be positive; got {coeff_b_cm!r}")
    return coeff_a, coeff_b_cm


@dataclass(frozen=True)
class BifurcationReport:
    """Criticality summary: direction and the quantities that decide it."""

    p2_crit: float
    theta: float
    coeff_a: float
    coeff_b_cm: float
    direction: str  # "backward" | "forward" | "degenerate"
    left_eigenvector: np.ndarray
    right_eigenvector: np.ndarray

    def to_dict(self) -> dict:
        return {
            "p2_crit": self.p2_crit,
            "theta": self.theta,
            "coeff_a": self.coeff_a,
            "coeff_b_cm": self.coeff_b_cm,
            "direction": self.direction,
            "left_eigenvector": [float(x) for x in self.left_eigenvector],
            "right_eigenvector": [float(x) for x in self.right_eigenvector],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def bifurcation_report(params: ModelParams) -> BifurcationReport:
    """Full criticality analysis of ``params`` (its own p2 is not used)."""
    p2c = critical_p2(params)
    if p2c > 1.0:
        raise CriticalityError(
            f"p2_crit = {p2c!r} exceeds 1; criticality is not reachable by a "
            f"transmission probability")
    at_crit = params.replace(p2=p2c)
    v, w = eigenvectors_at_criticality(at_crit)
    coeff_a, coeff_b = centre_manifold_coefficients(at_crit)
    if coeff_a > 0.0:
        direction = "backward"
    elif coeff_a < 0.0:
        direction = "forward"
    else:
        direction = "degenerate"
    return BifurcationReport(p2_crit=p2c, theta=theta(at_crit),
                             coeff_a=coeff_a, coeff_b_cm=coeff_b,
                             direction=direction,
                             left_eigenvector=v, right_eigenvector=w)


@dataclass(frozen=True)
class BranchRoot:
    i_v_star: float
    stable: bool
    dominant_eigenvalue: float


@dataclass(frozen=True)
class BranchPoint:
    """Endemic roots (as infectious-vector counts) at one p2 grid value."""

    p2: float
    r0: float
    roots: tuple[BranchRoot, ...]  # sorted by i_v_star ascending, 0-2 entries

    @property
    def i_v_low(self) -> Optional[BranchRoot]:
        return self.roots[0] if len(self.roots) == 2 else None

    @property
    def i_v_high(self) -> Optional[BranchRoot]:
        return self.roots[-1] if self.roots else None


def sweep_branch(params: ModelParams, p2_grid: Sequence[float]) -> list[BranchPoint]:
    """Endemic branch data over a p2 grid, with per-root stability flags.

    Grid values must be transmission probabilities in (0, 1]. Points with no
    endemic root are reported with an empty root tuple.
    """
    points: list[BranchPoint] = []
    for p2 in p2_grid:
        if not 0.0 < p2 <= 1.0:
            raise ParameterError(f"p2 grid values must lie in (0, 1]; got {p2!r}")
        eq = equilibria.endemic_equilibria(params.replace(p2=float(p2)))
        roots = tuple(sorted(
            (BranchRoot(i_v_star=e.state.i_v, stable=e.locally_stable,
                        dominant_eigenvalue=e.dominant_eigenvalue)
             for e in eq.endemic),
            key=lambda r: r.i_v_star))
        points.append(BranchPoint(p2=float(p2), r0=eq.r0, roots=roots))
    return points


def saddle_node_r0(params: ModelParams) -> float:
    """Smallest R0 at which an endemic equilibrium exists along the p2 sweep.

    For a backward transition this is the saddle-node value located by
    bisection (1e-8 in R0); for a forward one it is exactly 1.
    """
    window = equilibria.backward_window(params, r0_tol=1e-8)
    return window[0] if window is not None else 1.0


def write_branch_csv(points: Sequence[BranchPoint], path: str | Path) -> None:
    """Branch CSV: p2, r0, i_v_low, i_v_low_stable, i_v_high, i_v_high_stable.

    Cells are empty where a root is absent. A single root is reported in the
    high columns (it continues the upper branch).
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p2", "r0", "i_v_low", "i_v_low_stable",
                         "i_v_high", "i_v_high_stable"])
        for pt in points:
            low, high = pt.i_v_low, pt.i_v_high
            writer.writerow([
                repr(pt.p2), repr(pt.r0),
                repr(low.i_v_star) if low else "",
                str(low.stable).lower() if low else "",
                repr(high.i_v_star) if high else "",
                str(high.stable).lower() if high else "",
            ])
