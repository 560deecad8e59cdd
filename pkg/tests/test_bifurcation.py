"""Criticality locus, eigenvectors, centre-manifold coefficients, branch sweeps."""

import numpy as np
import pytest

from vbmalaria import (
    CriticalityError, TABLE1, basic_reproduction_number, bifurcation_report,
    centre_manifold_coefficients, critical_p2, eigenvectors_at_criticality,
    endemic_equilibria, saddle_node_r0, sweep_branch, theta, theta_derivatives,
)
from vbmalaria import bifurcation, equilibria, model
from vbmalaria.bifurcation import write_branch_csv

from conftest import sample_params, sample_params_at_criticality


# --- critical p2 -----------------------------------------------------------------

def test_critical_p2_baseline(baseline):
    # R0 is linear in p2, so the criticality is p2 / R0(p2); bisection agrees
    p2c = critical_p2(baseline)
    assert p2c == pytest.approx(1.0 / 3.072941433259797, rel=1e-12)
    assert p2c == pytest.approx(0.32542110603754437, rel=1e-12)
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if basic_reproduction_number(baseline.replace(p2=mid)) < 1.0:
            lo = mid
        else:
            hi = mid
    assert p2c == pytest.approx(0.5 * (lo + hi), abs=1e-12)


def test_critical_p2_round_trip(baseline):
    p2c = critical_p2(baseline)
    assert basic_reproduction_number(baseline.replace(p2=p2c)) == pytest.approx(1.0, rel=1e-12)


def test_critical_p2_round_trip_random():
    rng = np.random.default_rng(50)
    for _ in range(300):
        p = sample_params_at_criticality(rng)
        assert basic_reproduction_number(p) == pytest.approx(1.0, rel=1e-12)


def test_critical_p2_inverse_in_pi(baseline):
    assert (critical_p2(baseline.replace(pi=4.0))
            == pytest.approx(0.5 * critical_p2(baseline), rel=1e-12))


def test_critical_p2_requires_transmission(baseline):
    with pytest.raises(CriticalityError):
        critical_p2(baseline.replace(b=1.0))  # beta(1) = 0
    with pytest.raises(CriticalityError):
        critical_p2(baseline.replace(p1=0.0))


# --- eigenvectors ------------------------------------------------------------------

def test_eigenvectors_structure_and_residuals(baseline):
    p = baseline.replace(p2=critical_p2(baseline))
    v, w = eigenvectors_at_criticality(p)
    assert v[0] == 0.0 and v[2] == 0.0
    assert float(v @ w) == pytest.approx(1.0, abs=1e-12)
    from vbmalaria.stability import jacobian_full
    jac = jacobian_full(p, equilibria.disease_free_equilibrium(p))
    scale = np.abs(jac).max() * max(1.0, np.abs(w).max())
    assert np.abs(jac @ w).max() <= 1e-10 * scale
    assert np.abs(v @ jac).max() <= 1e-10 * scale


def test_eigenvectors_require_criticality(baseline):
    with pytest.raises(CriticalityError):
        eigenvectors_at_criticality(baseline)  # R0 ~ 3.07 here


# --- centre-manifold coefficients ----------------------------------------------------

def test_baseline_is_backward(baseline):
    rep = bifurcation_report(baseline)
    assert rep.direction == "backward"
    assert rep.coeff_a > 0.0
    assert rep.coeff_a == pytest.approx(0.0005530712154778942, rel=1e-10)
    assert rep.coeff_b_cm == pytest.approx(0.16187482419416768, rel=1e-10)
    assert rep.p2_crit == pytest.approx(0.32542110603754437, rel=1e-12)


def test_no_disease_mortality_is_forward(baseline):
    rep = bifurcation_report(baseline.replace(alpha=0.0))
    assert rep.direction == "forward"
    assert rep.coeff_a < 0.0


def test_coefficient_paths_agree_randomized():
    """The four-term derivative sum must match the closed form to 1e-10."""
    rng = np.random.default_rng(60)
    for _ in range(100):
        p = sample_params_at_criticality(rng)
        a, b_cm = centre_manifold_coefficients(p)  # raises on >1e-10 disagreement
        assert b_cm > 0.0
        th = theta(p)
        assert np.sign(a) == np.sign(th) or (a == 0.0 and th == 0.0)


def test_coefficient_matches_numeric_hessian(baseline):
    """Independent route: central-difference Hessian of the right-hand side,
    contracted with the null eigenvectors (same no-1/2 convention)."""
    p = baseline.replace(p2=critical_p2(baseline))
    v, w = eigenvectors_at_criticality(p)
    a, _ = centre_manifold_coefficients(p)
    rhs = model.make_rhs_full(p)
    e0 = equilibria.disease_free_equilibrium(p).as_array()
    scale = np.array([e0[0], e0[0], e0[2], e0[2]])
    total = 0.0
    for i in range(4):
        for j in range(4):
            hi, hj = 1e-5 * scale[i], 1e-5 * scale[j]
            ei = np.zeros(4)
            ej = np.zeros(4)
            ei[i], ej[j] = hi, hj
            d2 = (rhs(e0 + ei + ej) - rhs(e0 + ei - ej)
                  - rhs(e0 - ei + ej) + rhs(e0 - ei - ej)) / (4 * hi * hj)
            total += float(v @ d2) * w[i] * w[j]
    assert total == pytest.approx(a, rel=1e-4)


def test_coefficient_sign_invariant_under_eigenvector_rescaling(baseline):
    p = baseline.replace(p2=critical_p2(baseline))
    v, w = eigenvectors_at_criticality(p)
    beta = model.contact_rate(p)
    sh0 = model.human_capacity(p)
    sv0 = model.vector_capacity(p)
    pi, p1, p2 = p.pi_bias, p.p1, p.p2

    def cm_sum(vv, ww):
        return (2 * vv[1] * ww[1] * ww[3] * (-pi * p1 * beta / sh0)
                + 2 * vv[3] * ww[0] * ww[1] * (-pi * p2 * beta * sv0 / sh0 ** 2)
                + 2 * vv[3] * ww[1] * ww[2] * (pi * p2 * beta / sh0)
                + vv[3] * ww[1] ** 2 * (-2 * pi ** 2 * p2 * beta * sv0 / sh0 ** 2))

    base = cm_sum(v, w)
    for k in (0.5, 3.0):
        scaled = cm_sum(v / k, k * w)
        assert np.sign(scaled) == np.sign(base)
        assert scaled == pytest.approx(k * base, rel=1e-12)


# --- theta ---------------------------------------------------------------------------

def test_theta_baseline_terms(baseline):
    lh = baseline.lambda_h
    t1 = (baseline.alpha + baseline.mu) / lh
    t2 = -2 * baseline.pi_bias * baseline.mu / lh
    beta = model.contact_rate(baseline)
    eta = model.mosquito_death_rate(baseline)
    t3 = -baseline.alpha0 * eta / (beta * baseline.p1 * baseline.lambda_v)
    assert t1 == pytest.approx(0.026550, abs=1e-6)
    assert t2 == pytest.approx(-0.004, abs=1e-12)
    assert t3 == pytest.approx(-0.000586, abs=1e-6)
    assert theta(baseline) == pytest.approx(0.021964, abs=1e-6)
    assert theta(baseline) == pytest.approx(t1 + t2 + t3, rel=1e-14)


def test_theta_negative_without_disease_mortality():
    rng = np.random.default_rng(61)
    for _ in range(50):
        p = sample_params(rng).replace(alpha=0.0)
        assert theta(p) < 0.0


def test_theta_pi_derivative_value(baseline):
    dpi, _ = theta_derivatives(baseline)
    assert dpi == pytest.approx(-0.002, rel=1e-12)


def test_theta_rejects_zero_contact(baseline):
    with pytest.raises(CriticalityError):
        theta(baseline.replace(b=1.0))


# --- branch sweeps ---------------------------------------------------------------------

def test_sweep_window_structure(baseline):
    """Inside the bistability window: two roots, upper stable, lower unstable."""
    p2c = critical_p2(baseline)
    lo = saddle_node_r0(baseline)
    width = 1.0 - lo
    r0_grid = np.linspace(lo + 0.02 * width, 1.0 - 0.02 * width, 20)
    points = sweep_branch(baseline, r0_grid * p2c)
    for pt in points:
        assert len(pt.roots) == 2, f"expected two roots at r0={pt.r0}"
        assert pt.roots[0].i_v_star < pt.roots[1].i_v_star
        assert pt.roots[1].stable and not pt.roots[0].stable


def test_sweep_r0_increasing_along_grid(baseline):
    grid = np.linspace(0.05, 0.9, 30)
    points = sweep_branch(baseline, grid)
    r0s = [pt.r0 for pt in points]
    assert all(b > a for a, b in zip(r0s, r0s[1:]))


def test_sweep_supercritical_single_root(baseline):
    points = sweep_branch(baseline, [0.5, 0.8, 1.0])
    for pt in points:
        assert pt.r0 > 1.0
        assert len(pt.roots) == 1
        assert pt.roots[0].stable
        assert pt.i_v_low is None and pt.i_v_high is not None


def test_sweep_rejects_bad_grid(baseline):
    with pytest.raises(Exception):
        sweep_branch(baseline, [0.0, 0.5])
    with pytest.raises(Exception):
        sweep_branch(baseline, [1.5])


def test_saddle_node_forward_case_is_unity(baseline):
    assert saddle_node_r0(baseline.replace(alpha=0.0)) == 1.0


def test_branch_csv_layout(baseline, tmp_path):
    p2c = critical_p2(baseline)
    points = sweep_branch(baseline, [0.95 * p2c, 1.2 * p2c])
    out = tmp_path / "branch.csv"
    write_branch_csv(points, out)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "p2,r0,i_v_low,i_v_low_stable,i_v_high,i_v_high_stable"
    first = lines[1].split(",")
    assert first[2] != "" and first[3] == "false" and first[5] == "true"
    second = lines[2].split(",")
    assert second[2] == "" and second[3] == ""  # single root: high columns only
    assert second[4] != "" and second[5] == "true"
