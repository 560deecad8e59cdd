"""Time integration of the full and reduced systems.

Uses a Dormand-Prince 5(4) embedded pair with PI step-size control and the
standard quartic continuous extension for dense output. The explicit pair is
adequate here: the fastest natural rates at realistic parameter values are a
few per day, and the step ceiling keeps the boundary-relaxation mode inside
the method's stability region.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import model
from .errors import ParameterError, RegionExitError, StepSizeUnderflowError
from .model import ModelParams, StateFull, StateReduced

# Dormand-Prince 5(4) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# Difference between the 5th-order weights and the embedded 4th-order weights.
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# Continuous-extension weights.
_D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
    -10690763975 / 1880347072, 701980252875 / 199316789632,
    -1453857185 / 822651844, 69997945 / 29380423,
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_BETA_PI = 0.04          # PI controller: integral exponent 1/5 - 0.75*beta
_EXPO = 0.2 - 0.75 * _BETA_PI
_H_FLOOR = 1e-12         # days; below this the step size has underflowed
_STABILITY_SPAN = 3.0    # max |eigenvalue|*h kept inside the DP5 stability region


@dataclass
class ConvergenceMatch:
    """Equilibrium candidate matched by a trajectory endpoint."""

    index: int
    equilibrium: np.ndarray
    distance: float  # sup-norm distance relative to the candidate's magnitude


@dataclass
class Trajectory:
    """Sampled solution of one initial-value run."""

    system: str                     # "full" or "reduced"
    times: np.ndarray               # strictly increasing, days
    states: np.ndarray              # shape (len(times), dim)
    steps_accepted: int
    steps_rejected: int
    v_total: Optional[float] = None  # reduced system only
    converged_to: Optional[ConvergenceMatch] = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def state_objects(self) -> list:
        if self.system == "full":
            return [StateFull.from_array(y) for y in self.states]
        return [StateReduced.from_array(y, self.v_total) for y in self.states]


def _interp(theta: float, y0: np.ndarray, h: float, k: np.ndarray,
            y1: np.ndarray) -> np.ndarray:
    """Quartic dense output on one accepted step; exact at both endpoints."""
    ydiff = y1 - y0
    bspl = h * k[0] - ydiff
    r4 = ydiff - h * k[6] - bspl
    r5 = h * (_D @ k)
    t1 = 1.0 - theta
    return y0 + theta * (ydiff + t1 * (bspl + theta * (r4 + t1 * r5)))


def integrate(params: ModelParams, system: str, ic, t_end: float,
              rel_tol: float = 1e-8, abs_tol: float = 1e-8,
              sample_times: Optional[Sequence[float]] = None,
              max_step: Optional[float] = None) -> Trajectory:
    """Integrate from ``ic`` to ``t_end`` and sample the solution.

    Args:
        params: model parameters.
        system: "full" (4 compartments) or "reduced" (3 compartments).
        ic: StateFull/StateReduced or a plain component array.
        t_end: horizon in days, > 0.
        rel_tol, abs_tol: local error control, each in (0, 1e-2]. Components
            that roundoff pushes below zero are clamped to 0 when above
            -abs_tol and are an error beyond that.
        sample_times: optional increasing times at which to record the state
            (dense output). Defaults to every accepted step. A leading 0 and
            trailing t_end are added if missing so the record spans the run.
        max_step: optional ceiling on the step size. Defaults to
            min(t_end/10, 3/eta(b)); the second term keeps the mosquito
            relaxation mode inside the stability region near equilibria.

    Returns:
        Trajectory with accepted/rejected step counts.

    Raises:
        RegionExitError: state left the feasible region beyond 1e-9 relative,
            or a component went below -abs_tol.
        StepSizeUnderflowError: step size fell below 1e-12 days.
    """
    if system not in ("full", "reduced"):
        raise ParameterError(f"system must be 'full' or 'reduced'; got {system!r}")
    if not t_end > 0.0:
        raise ParameterError(f"t_end must be > 0; got {t_end!r}")
    for name, tol in (("rel_tol", rel_tol), ("abs_tol", abs_tol)):
        if not 0.0 < tol <= 1e-2:
            raise ParameterError(f"{name} must lie in (0, 1e-2]; got {tol!r}")

    if system == "full":
        rhs = model.make_rhs_full(params)
        dim = 4
        v_total = None
        if isinstance(ic, StateFull):
            y = ic.as_array()
        else:
            y = np.asarray(ic, dtype=float).copy()
            if y.shape != (4,):
                raise ParameterError(f"full-system initial condition needs 4 components; got {y.shape}")
        state0 = StateFull.from_array(y)
    else:
        rhs = model.make_rhs_reduced(params)
        dim = 3
        v_total = model.vector_capacity(params)
        if isinstance(ic, StateReduced):
            y = ic.as_array()
        else:
            y = np.asarray(ic, dtype=float).copy()
            if y.shape != (3,):
                raise ParameterError(f"reduced-system initial condition needs 3 components; got {y.shape}")
        state0 = StateReduced.from_array(y, v_total)

    if not model.in_region(params, state0, rel_tol=1e-9):
        raise ParameterError(f"initial condition lies outside the feasible region: {y}")

    eta = model.mosquito_death_rate(params)
    h_cap = min(t_end / 10.0, _STABILITY_SPAN / eta)
    if max_step is not None:
        if not max_step > 0.0:
            raise ParameterError(f"max_step must be > 0; got {max_step!r}")
        h_cap = min(h_cap, max_step)

    if sample_times is not None:
        samples = np.asarray(sample_times, dtype=float)
        if samples.ndim != 1 or len(samples) == 0 or np.any(np.diff(samples) <= 0.0):
            raise ParameterError("sample_times must be a nonempty strictly increasing 1-D sequence")
        if samples[0] < 0.0 or samples[-1] > t_end * (1 + 1e-12):
            raise ParameterError("sample_times must lie within [0, t_end]")
        if samples[0] > 0.0:
            samples = np.concatenate(([0.0], samples))
        if samples[-1] < t_end:
            samples = np.concatenate((samples, [t_end]))
    else:
        samples = None

    def check_region(yv: np.ndarray, t: float) -> None:
        st = (StateFull.from_array(yv) if system == "full"
              else StateReduced.from_array(yv, v_total))
        if not model.in_region(params, st, rel_tol=1e-9):
            raise RegionExitError(
                f"trajectory left the feasible region at t={t:.6g}: state={yv}")

    def clamp(yv: np.ndarray, t: float) -> np.ndarray:
        low = yv.min()
        if low < 0.0:
            if low < -abs_tol:
                raise RegionExitError(
                    f"component fell below -abs_tol at t={t:.6g}: state={yv}")
            yv = np.maximum(yv, 0.0)
        return yv

    times_out = [0.0]
    states_out = [y.copy()]
    sample_idx = 1 if samples is not None else None  # samples[0] == 0 recorded

    t = 0.0
    h = min(1e-3, t_end, h_cap)
    f = rhs(y)
    k = np.empty((7, dim))
    err_prev = 1e-4
    accepted = 0
    rejected = 0

    while t < t_end:
        remaining = t_end - t
        h = min(h, remaining, h_cap)
        is_last = h >= remaining * (1.0 - 1e-12)
        if h < _H_FLOOR and not is_last:
            raise StepSizeUnderflowError(f"step size underflow at t={t:.6g} (h={h:.3g})")

        k[0] = f
        for i, a_row in enumerate(_A):
            yi = y + h * (a_row @ k[: i + 1])
            k[i + 1] = rhs(yi)
        y_new = y + h * (_B5 @ k)
        err_vec = h * (_E @ k)
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))

        if err <= 1.0:
            # snap the final step onto the horizon; t + (t_end - t) can land
            # an ulp short and strand the loop on a sliver step
            t_new = t_end if is_last else t + h
            y_new = clamp(y_new, t_new)
            check_region(y_new, t_new)
            if samples is None:
                times_out.append(t_new)
                states_out.append(y_new.copy())
            else:
                while (sample_idx < len(samples)
                       and samples[sample_idx] <= t_new * (1 + 1e-15)):
                    ts = min(samples[sample_idx], t_new)
                    theta = (ts - t) / h
                    ys = clamp(_interp(theta, y, h, k, y_new), ts)
                    check_region(ys, ts)
                    times_out.append(ts)
                    states_out.append(ys)
                    sample_idx += 1
            f = rhs(y_new)  # first-same-as-last would save this; keep it simple
            y, t = y_new, t_new
            accepted += 1
            err_floor = max(err, 1e-10)
            factor = _SAFETY * err_floor ** (-_EXPO) * err_prev ** _BETA_PI
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            err_prev = err_floor
        else:
            rejected += 1
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-_EXPO))

    times = np.array(times_out)
    states = np.array(states_out)
    return Trajectory(system=system, times=times, states=states,
                      steps_accepted=accepted, steps_rejected=rejected,
                      v_total=v_total)


def detect_convergence(traj: Trajectory, candidates: Sequence, tol: float
                       ) -> Optional[ConvergenceMatch]:
    """Match the trajectory endpoint against candidate equilibria.

    A candidate matches when the sup-norm distance of the final state from it
    is at most ``tol`` times the candidate's own sup-norm (floored at 1, so a
    candidate at the origin still has a meaningful scale). The closest match
    wins; distinct equilibria cannot tie for tol below half their separation.
    """
    if len(traj.times) == 0:
        raise ParameterError("trajectory is empty")
    y = traj.final_state
    best: Optional[ConvergenceMatch] = None
    for idx, cand in enumerate(candidates):
        c = cand.as_array() if hasattr(cand, "as_array") else np.asarray(cand, dtype=float)
        if c.shape != y.shape:
            raise ParameterError(
                f"candidate {idx} has shape {c.shape}, trajectory has {y.shape}")
        scale = max(float(np.max(np.abs(c))), 1.0)
        dist = float(np.max(np.abs(y - c))) / scale
        if dist <= tol and (best is None or dist < best.distance):
            best = ConvergenceMatch(index=idx, equilibrium=c, distance=dist)
    traj.converged_to = best
    return best


def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    """Write the sampled trajectory as CSV: t, s_h, i_h, s_v, i_v.

    The s_v column is blank for reduced-system runs.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "s_h", "i_h", "s_v", "i_v"])
        for t, y in zip(traj.times, traj.states):
            if traj.system == "full":
                writer.writerow([repr(float(t)), repr(float(y[0])), repr(float(y[1])),
                                 repr(float(y[2])), repr(float(y[3]))])
            else:
                writer.writerow([repr(float(t)), repr(float(y[0])), repr(float(y[1])),
                                 "", repr(float(y[2]))])
