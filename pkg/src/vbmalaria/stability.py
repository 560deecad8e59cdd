"""Local stability machinery and the trajectory-based global-stability
certificate.

The certificate estimates the time-averaged Lozinskii measure of
B = P_f P^-1 + P J2 P^-1 along reduced-system trajectories, where J2 is the
second additive compound of the 3x3 Jacobian and P = diag(1, I_h/I_v,
I_h/I_v). With the norm |(x, y, z)| = max(|x|, |y| + |z|) the measure is
bounded by sup(g1, g2) with

    g1 = I_h'/I_h - mu - p1 beta pi I_v (I_h + S_h) / (pi I_h + S_h)^2
    g2 = I_h'/I_h - mu - lambda_v
         - pi (pi - 1) p2 beta I_h^2 (V - I_v) / (I_v (pi I_h + S_h)^2)

both of which are <= I_h'/I_h - mu pointwise. A negative time average along
every trajectory rules out nontrivial attractors, certifying that the unique
endemic equilibrium is globally stable.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import model, simulate
from .errors import NotAnEquilibriumError, ParameterError
from .model import ModelParams, State, StateFull, StateReduced

HYPERBOLICITY_TOL = 1e-9  # |max real part| below this is judged nonhyperbolic


@dataclass
class StabilityVerdict:
    """Eigenvalue-based local stability classification of an equilibrium."""

    eigen_real_parts: list[float]
    classification: str  # "asymptotically stable" | "unstable" | "nonhyperbolic"
    margin: float        # max real part

    def to_dict(self) -> dict:
        return {"classification": self.classification, "margin": self.margin,
                "eigen_real_parts": self.eigen_real_parts}


def _partials(params: ModelParams, s_h: float, i_h: float, i_v: float):
    """Partial derivatives of the forces of infection (times nothing)."""
    beta = model.contact_rate(params)
    pi, p1, p2 = params.pi_bias, params.p1, params.p2
    denom = pi * i_h + s_h
    d2 = denom * denom
    dlh_dsh = -p1 * beta * i_v / d2
    dlh_dih = -p1 * pi * beta * i_v / d2
    dlh_div = p1 * beta / denom
    dlv_dsh = -pi * p2 * beta * i_h / d2
    dlv_dih = pi * p2 * beta * s_h / d2
    return dlh_dsh, dlh_dih, dlh_div, dlv_dsh, dlv_dih


def jacobian_full(params: ModelParams, state: StateFull) -> np.ndarray:
    """4x4 Jacobian of the full system at the given state."""
    s_h, i_h, s_v, i_v = state.s_h, state.i_h, state.s_v, state.i_v
    lam_h, lam_v = model.forces_of_infection(params, state)
    dlh_dsh, dlh_dih, dlh_div, dlv_dsh, dlv_dih = _partials(params, s_h, i_h, i_v)
    mu, delta, alpha0 = params.mu, params.delta, params.alpha0
    eta = model.mosquito_death_rate(params)
    return np.array([
        [-dlh_dsh * s_h - lam_h - mu, -dlh_dih * s_h + delta, 0.0, -dlh_div * s_h],
        [dlh_dsh * s_h + lam_h, dlh_dih * s_h - alpha0, 0.0, dlh_div * s_h],
        [-dlv_dsh * s_v, -dlv_dih * s_v, -lam_v - eta, 0.0],
        [dlv_dsh * s_v, dlv_dih * s_v, lam_v, -eta],
    ])


def jacobian_reduced(params: ModelParams, state: StateReduced) -> np.ndarray:
    """3x3 Jacobian of the reduced system at the given state."""
    s_h, i_h, i_v = state.s_h, state.i_h, state.i_v
    lam_h, lam_v = model.forces_of_infection(params, state)
    dlh_dsh, dlh_dih, dlh_div, dlv_dsh, dlv_dih = _partials(params, s_h, i_h, i_v)
    mu, delta, alpha0 = params.mu, params.delta, params.alpha0
    eta = model.mosquito_death_rate(params)
    sv = state.v_total - i_v
    return np.array([
        [-dlh_dsh * s_h - lam_h - mu, -dlh_dih * s_h + delta, -dlh_div * s_h],
        [dlh_dsh * s_h + lam_h, dlh_dih * s_h - alpha0, dlh_div * s_h],
        [dlv_dsh * sv, dlv_dih * sv, -lam_v - eta],
    ])


def classify(params: ModelParams, state: State, which: str = "full",
             residual_tol: float = 1e-8) -> StabilityVerdict:
    """Classify an equilibrium by the eigenvalues of its Jacobian.

    The state must actually be an equilibrium: its relative right-hand-side
    residual is checked against ``residual_tol`` first.
    """
    if which not in ("full", "reduced"):
        raise ParameterError(f"which must be 'full' or 'reduced'; got {which!r}")
    expected = StateFull if which == "full" else StateReduced
    if not isinstance(state, expected):
        raise ParameterError(f"{which} classification needs a {expected.__name__}")
    residual = model.equilibrium_residual(params, state)
    if residual > residual_tol:
        raise NotAnEquilibriumError(
            f"state has relative residual {residual:.3e} > {residual_tol:.1e}")
    jac = jacobian_full(params, state) if which == "full" else jacobian_reduced(params, state)
    eig = np.linalg.eigvals(jac)
    real_parts = sorted(float(x) for x in eig.real)
    margin = real_parts[-1]
    if abs(margin) <= HYPERBOLICITY_TOL:
        label = "nonhyperbolic"
    elif margin < 0.0:
        label = "asymptotically stable"
    else:
        label = "unstable"
    return StabilityVerdict(eigen_real_parts=real_parts, classification=label,
                            margin=margin)


def second_additive_compound(m: np.ndarray) -> np.ndarray:
    """Second additive compound of a 3x3 matrix.

    Its eigenvalues are the pairwise sums of the eigenvalues of ``m``.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3):
        raise ParameterError(f"second additive compound implemented for 3x3; got {m.shape}")
    return np.array([
        [m[0, 0] + m[1, 1], m[1, 2], -m[0, 2]],
        [m[2, 1], m[0, 0] + m[2, 2], m[0, 1]],
        [-m[2, 0], m[1, 0], m[1, 1] + m[2, 2]],
    ])


def _require_interior(state: StateReduced) -> None:
    if not (state.s_h > 0.0 and state.i_h > 0.0 and state.i_v > 0.0):
        raise ParameterError(
            f"Lozinskii terms need an interior state (all components > 0); "
            f"got ({state.s_h!r}, {state.i_h!r}, {state.i_v!r})")


def lozinskii_terms(params: ModelParams, state: StateReduced) -> tuple[float, float]:
    """The two column-measure bounds (g1, g2) at an interior reduced state.

    Closed forms equivalent to sigma_1(B11) + |B12| and sigma_1(B22) + |B21|
    for the weighted compound matrix B, with I_h'/I_h taken from the reduced
    right-hand side. See lozinskii_terms_direct for the assembled-matrix
    route; the two agree to roundoff.
    """
    _require_interior(state)
    s_h, i_h, i_v = state.s_h, state.i_h, state.i_v
    beta = model.contact_rate(params)
    pi, p1, p2 = params.pi_bias, params.p1, params.p2
    denom = pi * i_h + s_h
    d2 = denom * denom
    lam_v = pi * p2 * beta * i_h / denom
    ih_dot = float(model.rhs_reduced(params, state)[1])
    ratio = ih_dot / i_h
    g1 = ratio - params.mu - p1 * beta * pi * i_v * (i_h + s_h) / d2
    g2 = (ratio - params.mu - lam_v
          - pi * (pi - 1.0) * p2 * beta * i_h * i_h * (state.v_total - i_v) / (i_v * d2))
    return g1, g2


def lozinskii_terms_direct(params: ModelParams, state: StateReduced) -> tuple[float, float]:
    """(g1, g2) assembled literally from B = P_f P^-1 + P J2 P^-1.

    Uses the column-sum matrix norm |A| = max_k sum_j |a_jk| and the matching
    column measure mu(A) = max_k (a_kk + sum_{j != k} |a_jk|). Cross-check
    path for lozinskii_terms.
    """
    _require_interior(state)
    i_h, i_v = state.i_h, state.i_v
    j2 = second_additive_compound(jacobian_reduced(params, state))
    rhs = model.rhs_reduced(params, state)
    diag_rate = float(rhs[1]) / i_h - float(rhs[2]) / i_v
    p = np.diag([1.0, i_h / i_v, i_h / i_v])
    p_inv = np.diag([1.0, i_v / i_h, i_v / i_h])
    b = np.diag([0.0, diag_rate, diag_rate]) + p @ j2 @ p_inv
    b11 = b[0, 0]
    b12 = b[0:1, 1:3]
    b21 = b[1:3, 0:1]
    b22 = b[1:3, 1:3]
    norm_b12 = max(abs(b12[0, 0]), abs(b12[0, 1]))
    norm_b21 = abs(b21[0, 0]) + abs(b21[1, 0])
    sigma1_b22 = max(b22[0, 0] + abs(b22[1, 0]), b22[1, 1] + abs(b22[0, 1]))
    return float(b11 + norm_b12), float(sigma1_b22 + norm_b21)


def _g_series(params: ModelParams, states: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (g1, g2, I_h'/I_h - mu) over an array of reduced states."""
    s_h, i_h, i_v = states[:, 0], states[:, 1], states[:, 2]
    if np.any(s_h <= 0.0) or np.any(i_h <= 0.0) or np.any(i_v <= 0.0):
        raise ParameterError("sampled trajectory touched the boundary; "
                             "Lozinskii terms need interior states")
    beta = model.contact_rate(params)
    eta = model.mosquito_death_rate(params)
    pi, p1, p2 = params.pi_bias, params.p1, params.p2
    v_total = model.vector_capacity(params)
    denom = pi * i_h + s_h
    d2 = denom * denom
    lam_h = p1 * beta * i_v / denom
    lam_v = pi * p2 * beta * i_h / denom
    ih_dot = lam_h * s_h - params.alpha0 * i_h
    ratio = ih_dot / i_h
    g1 = ratio - params.mu - p1 * beta * pi * i_v * (i_h + s_h) / d2
    g2 = (ratio - params.mu - lam_v
          - pi * (pi - 1.0) * p2 * beta * i_h * i_h * (v_total - i_v) / (i_v * d2))
    return g1, g2, ratio - params.mu


@dataclass
class LozinskiiCertificate:
    """Finite-horizon evidence for the global-stability criterion.

    ``q_bar2_estimate`` is the worst (largest) per-trajectory time average of
    sup(g1, g2); the criterion asks for a negative value on every trajectory.
    ``pointwise_max_sigma_violation`` is the worst scaled excess of
    sup(g1, g2) over its analytic bound I_h'/I_h - mu, which is zero up to
    roundoff by construction.
    """

    q_bar2_estimate: float
    pointwise_max_sigma_violation: float
    horizon: float
    samples: int
    passed: bool
    per_trajectory_q: list[float] = field(default_factory=list)
    endpoints: list[np.ndarray] = field(default_factory=list)
    g_series: Optional[list[np.ndarray]] = None  # (t, g1, g2) per trajectory

    def to_dict(self) -> dict:
        return {
            "q_bar2_estimate": self.q_bar2_estimate,
            "pointwise_max_sigma_violation": self.pointwise_max_sigma_violation,
            "horizon": self.horizon,
            "samples": self.samples,
            "passed": self.passed,
            "per_trajectory_q": list(self.per_trajectory_q),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def certify_global_stability(params: ModelParams,
                             initial_conditions: Sequence[StateReduced],
                             horizon: float, sampling: float,
                             rel_tol: float = 1e-8, abs_tol: float = 1e-8,
                             keep_series: bool = False) -> LozinskiiCertificate:
    """Integrate reduced-system trajectories and average sup(g1, g2).

    Requires R0 > 1 and strictly interior initial conditions. Each trajectory
    is sampled on the uniform grid of step ``sampling``; the time average is
    the trapezoid rule over that grid divided by the horizon. The certificate
    passes when every per-trajectory average is negative and the pointwise
    bound sup(g1, g2) <= I_h'/I_h - mu holds at every sample within 1e-9
    (relative to the bound's magnitude, floored at 1).
    """
    from .equilibria import basic_reproduction_number  # local import; no cycle at module load

    r0 = basic_reproduction_number(params)
    if r0 <= 1.0:
        raise ParameterError(f"global-stability certificate requires R0 > 1; got R0={r0!r}")
    if not horizon > 0.0:
        raise ParameterError(f"horizon must be > 0; got {horizon!r}")
    if not 0.0 < sampling <= horizon:
        raise ParameterError(f"sampling step must lie in (0, horizon]; got {sampling!r}")
    if len(initial_conditions) == 0:
        raise ParameterError("need at least one initial condition")

    n_samples = int(round(horizon / sampling)) + 1
    grid = np.linspace(0.0, horizon, n_samples)

    per_q: list[float] = []
    endpoints: list[np.ndarray] = []
    series: list[np.ndarray] = [] if keep_series else None
    worst_violation = -np.inf
    for idx, ic in enumerate(initial_conditions):
        if not isinstance(ic, StateReduced):
            raise ParameterError(f"initial condition {idx} must be a StateReduced")
        if not (ic.s_h > 0.0 and ic.i_h > 0.0 and ic.i_v > 0.0 and ic.i_v < ic.v_total):
            raise ParameterError(
                f"initial condition {idx} must be strictly interior; got {ic}")
        traj = simulate.integrate(params, "reduced", ic, horizon,
                                  rel_tol=rel_tol, abs_tol=abs_tol,
                                  sample_times=grid)
        g1, g2, bound = _g_series(params, traj.states)
        gmax = np.maximum(g1, g2)
        q = float(np.trapezoid(gmax, traj.times) / horizon)
        per_q.append(q)
        endpoints.append(traj.final_state)
        violation = float(np.max((gmax - bound) / np.maximum(np.abs(bound), 1.0)))
        worst_violation = max(worst_violation, violation)
        if keep_series:
            series.append(np.column_stack([traj.times, g1, g2]))

    q_worst = max(per_q)
    passed = q_worst < 0.0 and worst_violation <= 1e-9
    return LozinskiiCertificate(
        q_bar2_estimate=q_worst,
        pointwise_max_sigma_violation=worst_violation,
        horizon=horizon,
        samples=n_samples,
        passed=passed,
        per_trajectory_q=per_q,
        endpoints=endpoints,
        g_series=series,
    )


def write_g_series_csv(cert: LozinskiiCertificate, path: str | Path) -> None:
    """CSV of the sampled g1/g2 time series: trajectory, t, g1, g2."""
    if cert.g_series is None:
        raise ParameterError("certificate was built without keep_series=True")
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trajectory", "t", "g1", "g2"])
        for traj_idx, block in enumerate(cert.g_series):
            for t, g1, g2 in block:
                writer.writerow([traj_idx, repr(float(t)), repr(float(g1)), repr(float(g2))])
