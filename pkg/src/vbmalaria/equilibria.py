"""Equilibria of the full system: the disease-free point, the basic
reproduction number, and the endemic-equilibrium quadratic.

Endemic forces of infection solve

    A0 x^2 + B0 x + C0 = 0,   x = lambda_h*,

with A0 = eta Lh pi^2 (eta + p2 beta) > 0,
B0 = pi [eta a0 Lh (2 eta + p2 beta) - p1 p2 beta^2 Lv (alpha + mu)],
C0 = eta^2 a0^2 Lh (1 - R0), a0 = alpha + mu + delta.

Sign pattern of (B0, C0, disc = B0^2 - 4 A0 C0) classifies existence:
  (i)   C0 < 0                        -> one endemic equilibrium;
  (ii)  B0 < 0 and (C0 = 0 or disc=0) -> one;
  (iii) C0 > 0, B0 < 0, disc > 0      -> two (sub-threshold bistability);
  (iv)  otherwise                     -> none.

B0 < 0 is equivalent to R0 > R_a = pi mu (2 eta + p2 beta)/(eta (alpha+mu)).
The discriminant is tested directly rather than through a closed-form R0
threshold; the R0 value at which disc crosses zero is located by bisection
in p2 (R0 is linear in p2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional


from . import model, stability
from .errors import InternalConsistencyError, ParameterError
from .model import ModelParams, StateFull

_ZERO_TOL = 1e-12   # relative tolerance for C0 = 0 and disc = 0 detection


def disease_free_equilibrium(params: ModelParams) -> StateFull:
    """(Lambda_h/mu, 0, Lambda_v/eta(b), 0)."""
    return StateFull(model.human_capacity(params), 0.0,
                     model.vector_capacity(params), 0.0)


def disease_free_reduced(params: ModelParams) -> model.StateReduced:
    """Disease-free state of the reduced system."""
    return model.reduced_state(params, model.human_capacity(params), 0.0, 0.0)


def basic_reproduction_number(params: ModelParams) -> float:
    """R0 = pi p1 p2 mu Lambda_v beta(b)^2 / (Lambda_h eta(b)^2 (alpha+mu+delta))."""
    return _r0_raw(params, params.p2)


def _r0_raw(params: ModelParams, p2: float) -> float:
    """R0 with p2 supplied as a free positive number (no [0,1] validation).

    Internal sweeps treat p2 purely as a bifurcation parameter; R0 is linear
    in it.
    """
    beta = model.contact_rate(params)
    eta = model.mosquito_death_rate(params)
    return (params.pi_bias * params.p1 * p2 * params.mu * params.lambda_v * beta * beta
            / (params.lambda_h * eta * eta * params.alpha0))


@dataclass(frozen=True)
class QuadraticCoefficients:
    """Coefficients of the endemic quadratic plus the derived thresholds."""

    a0: float
    b0: float
    c0: float
    r_a: float    # B0 < 0 iff R0 > r_a
    disc: float   # b0^2 - 4 a0 c0


def quadratic_coefficients(params: ModelParams) -> QuadraticCoefficients:
    return _quad_raw(params, params.p2)


def _quad_raw(params: ModelParams, p2: float) -> QuadraticCoefficients:
    beta = model.contact_rate(params)
    eta = model.mosquito_death_rate(params)
    lh, lv = params.lambda_h, params.lambda_v
    pi, p1 = params.pi_bias, params.p1
    a_mu = params.alpha + params.mu
    alpha0 = params.alpha0
    a0 = eta * lh * pi * pi * (eta + p2 * beta)
    b0 = pi * (eta * alpha0 * lh * (2.0 * eta + p2 * beta)
               - p1 * p2 * beta * beta * lv * a_mu)
    c0 = eta * eta * alpha0 * alpha0 * lh * (1.0 - _r0_raw(params, p2))
    r_a = pi * params.mu * (2.0 * eta + p2 * beta) / (eta * a_mu)
    return QuadraticCoefficients(a0=a0, b0=b0, c0=c0, r_a=r_a,
                                 disc=b0 * b0 - 4.0 * a0 * c0)


@dataclass(frozen=True)
class EndemicEquilibrium:
    """One endemic equilibrium with its forces of infection and local verdict."""

    lambda_h_star: float
    lambda_v_star: float
    state: StateFull
    residual: float
    locally_stable: bool
    dominant_eigenvalue: float

    def to_dict(self) -> dict:
        return {
            "s_h": self.state.s_h, "i_h": self.state.i_h,
            "s_v": self.state.s_v, "i_v": self.state.i_v,
            "lambda_h_star": self.lambda_h_star,
            "lambda_v_star": self.lambda_v_star,
            "residual": self.residual,
            "locally_stable": self.locally_stable,
            "dominant_eigenvalue": self.dominant_eigenvalue,
        }


@dataclass(frozen=True)
class EquilibriumSet:
    """Disease-free point, R0, and 0-2 endemic equilibria with a case label."""

    dfe: StateFull
    r0: float
    endemic: tuple[EndemicEquilibrium, ...]
    case_label: str            # "(i)" | "(ii)" | "(iii)" | "(iv)"
    c0_zero: bool = False
    disc_zero: bool = False

    def to_dict(self) -> dict:
        return {
            "dfe": {"s_h": self.dfe.s_h, "i_h": self.dfe.i_h,
                    "s_v": self.dfe.s_v, "i_v": self.dfe.i_v},
            "r0": self.r0,
            "case_label": self.case_label,
            "c0_zero": self.c0_zero,
            "disc_zero": self.disc_zero,
            "endemic": [e.to_dict() for e in self.endemic],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _positive_roots(q: QuadraticCoefficients, c0_zero: bool, disc_zero: bool
                    ) -> list[float]:
    """Positive roots of the quadratic via the cancellation-free formula."""
    if c0_zero:
        root = -q.b0 / q.a0
        return [root] if root > 0.0 else []
    if disc_zero:
        root = -q.b0 / (2.0 * q.a0)
        return [root] if root > 0.0 else []
    if q.disc < 0.0:
        return []
    sq = math.sqrt(q.disc)
    # larger-magnitude root first; the mate via c0/(a0*root) avoids cancellation
    qq = -0.5 * (q.b0 + math.copysign(sq, q.b0))
    r1 = qq / q.a0
    r2 = q.c0 / qq
    return sorted(r for r in (r1, r2) if r > 0.0)


def _back_substitute(params: ModelParams, lam_h: float) -> tuple[float, StateFull]:
    """Equilibrium components from the endemic force of infection lambda_h*."""
    beta = model.contact_rate(params)
    eta = model.mosquito_death_rate(params)
    alpha0 = params.alpha0
    s_h = alpha0 * params.lambda_h / ((params.alpha + params.mu) * lam_h
                                      + alpha0 * params.mu)
    i_h = lam_h * s_h / alpha0
    lam_v = params.pi_bias * params.p2 * beta * lam_h / (params.pi_bias * lam_h + alpha0)
    s_v = params.lambda_v / (eta + lam_v)
    i_v = lam_v * params.lambda_v / (eta * (eta + lam_v))
    return lam_v, StateFull(s_h, i_h, s_v, i_v)


def endemic_equilibria(params: ModelParams, residual_tol: float = 1e-10
                       ) -> EquilibriumSet:
    """Solve the endemic quadratic, classify, and verify every equilibrium.

    Each returned equilibrium is residual-checked against the full system
    right-hand side (failure raises, it is never returned silently) and
    carries a local stability verdict from the 4x4 Jacobian spectrum.
    """
    q = quadratic_coefficients(params)
    r0 = basic_reproduction_number(params)

    c0_zero = abs(1.0 - r0) <= _ZERO_TOL * (1.0 + r0)
    disc_zero = abs(q.disc) <= _ZERO_TOL * (q.b0 * q.b0 + abs(4.0 * q.a0 * q.c0))

    if q.c0 < 0.0 and not c0_zero:
        label = "(i)"
    elif q.b0 < 0.0 and (c0_zero or disc_zero):
        label = "(ii)"
    elif q.c0 > 0.0 and q.b0 < 0.0 and q.disc > 0.0 and not disc_zero:
        label = "(iii)"
    else:
        label = "(iv)"

    roots: list[float] = []
    if label != "(iv)":
        roots = _positive_roots(q, c0_zero and label == "(ii)",
                                disc_zero and not c0_zero)
        expected = {"(i)": 1, "(ii)": 1, "(iii)": 2}[label]
        if len(roots) != expected:
            raise InternalConsistencyError(
                f"case {label} expects {expected} positive root(s); solver found "
                f"{len(roots)} (coefficients {q})")

    endemic: list[EndemicEquilibrium] = []
    for lam_h in roots:
        lam_v, state = _back_substitute(params, lam_h)
        residual = model.equilibrium_residual(params, state)
        if residual > residual_tol:
            raise InternalConsistencyError(
                f"endemic equilibrium residual {residual:.3e} exceeds "
                f"{residual_tol:.1e}; lambda_h*={lam_h!r}")
        verdict = stability.classify(params, state, which="full")
        endemic.append(EndemicEquilibrium(
            lambda_h_star=lam_h, lambda_v_star=lam_v, state=state,
            residual=residual,
            locally_stable=verdict.classification == "asymptotically stable",
            dominant_eigenvalue=verdict.margin))

    return EquilibriumSet(dfe=disease_free_equilibrium(params), r0=r0,
                          endemic=tuple(endemic), case_label=label,
                          c0_zero=c0_zero, disc_zero=disc_zero)


def _two_roots_exist(params: ModelParams, p2: float) -> bool:
    """Sign conditions for two positive roots at a raw p2 value."""
    q = _quad_raw(params, p2)
    return q.c0 > 0.0 and q.b0 < 0.0 and q.disc > 0.0


def _p2_at_unit_r0(params: ModelParams) -> float:
    """The p2 value (as a free positive number) at which R0 = 1."""
    beta = model.contact_rate(params)
    if beta <= 0.0 or params.p1 <= 0.0:
        raise ParameterError(
            "R0 cannot reach 1 by varying p2 when beta(b) = 0 or p1 = 0")
    eta = model.mosquito_death_rate(params)
    return (params.lambda_h * eta * eta * params.alpha0
            / (params.pi_bias * params.p1 * params.mu * params.lambda_v * beta * beta))


def backward_window(params: ModelParams, r0_tol: float = 1e-10
                    ) -> Optional[tuple[float, float]]:
    """R0 interval on which two endemic equilibria coexist, sweeping p2.

    Returns (R_lower, 1.0) where R_lower is the saddle-node R0 located by
    bisection on the two-root sign conditions (tolerance ``r0_tol`` in R0),
    or None when the transition at R0 = 1 is forward (no sub-threshold
    window wider than about 1e-9 in R0).
    """
    p2_unit = _p2_at_unit_r0(params)

    hi = None
    for gap in (1e-3, 1e-6, 1e-9):
        cand = p2_unit * (1.0 - gap)
        if _two_roots_exist(params, cand):
            hi = cand
            break
    if hi is None:
        return None

    lo = hi
    while _two_roots_exist(params, lo):
        lo *= 0.5
        if lo < 1e-300:
            raise InternalConsistencyError("two-root window failed to close as p2 -> 0")
    # invariant: two roots at hi, none at lo
    while _r0_raw(params, hi) - _r0_raw(params, lo) > r0_tol:
        mid = 0.5 * (lo + hi)
        if _two_roots_exist(params, mid):
            hi = mid
        else:
            lo = mid
    p2_cross = 0.5 * (lo + hi)
    # The B0 < 0 condition cannot bind before the discriminant does (two roots
    # need |B0| > 2 sqrt(A0 C0) > 0), so the lower edge is the saddle node;
    # taking the max with R_a is defensive only.
    return (max(_r0_raw(params, p2_cross), _quad_raw(params, p2_cross).r_a), 1.0)
