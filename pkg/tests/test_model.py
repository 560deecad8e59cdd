"""Control functions, forces of infection, right-hand sides, region membership."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vbmalaria import (
    DegenerateStateError, StateFull, StateReduced, TABLE1,
    contact_rate, disease_free_equilibrium, endemic_equilibria,
    forces_of_infection, in_region, mosquito_death_rate, rhs_full,
    rhs_reduced, vector_capacity,
)
from vbmalaria import model

from conftest import random_interior_full, sample_params


# --- contact rate -----------------------------------------------------------

def test_contact_rate_no_nets_is_maximum():
    assert contact_rate(TABLE1.replace(b=0.0)) == 0.1


def test_contact_rate_full_coverage_attains_minimum():
    assert contact_rate(TABLE1.replace(b=1.0)) == 0.0


def test_contact_rate_partial_coverage():
    assert contact_rate(TABLE1.replace(b=0.4)) == pytest.approx(0.06, rel=1e-14)


# --- mosquito death rate ----------------------------------------------------

def test_death_rate_no_nets_is_natural():
    assert mosquito_death_rate(TABLE1.replace(b=0.0)) == pytest.approx(1 / 21, rel=1e-15)


def test_death_rate_full_coverage_sums_rates():
    assert mosquito_death_rate(TABLE1.replace(b=1.0)) == pytest.approx(2 / 21, rel=1e-15)


def test_death_rate_partial_coverage():
    assert mosquito_death_rate(TABLE1.replace(b=0.4)) == pytest.approx(1.4 / 21, rel=1e-14)


@given(b=st.floats(0.0, 1.0))
@settings(deadline=None)
def test_controls_affine_and_bounded(b):
    p = TABLE1.replace(b=b)
    beta = contact_rate(p)
    eta = mosquito_death_rate(p)
    assert p.beta_min <= beta <= p.beta_max
    assert p.eta_nat <= eta <= p.eta_nat + p.eta_bn + 1e-18
    # affine in b
    assert beta == pytest.approx(p.beta_max * (1 - b) + p.beta_min * b, rel=1e-12, abs=1e-15)


# --- forces of infection ----------------------------------------------------

def test_forces_vanish_without_infectives(baseline):
    f = forces_of_infection(baseline, StateFull(500.0, 0.0, 100.0, 0.0))
    assert f.lambda_h == 0.0 and f.lambda_v == 0.0


def test_forces_unbiased_collapse_to_population_share():
    p = TABLE1.replace(b=0.4, pi=1.0)
    f = forces_of_infection(p, StateFull(500.0, 500.0, 0.0, 100.0))
    assert f.lambda_h == pytest.approx(0.06 * 100 / 1000, rel=1e-12)


def test_forces_biased_hand_value():
    p = TABLE1.replace(b=0.4, pi=2.0)
    f = forces_of_infection(p, StateFull(800.0, 100.0, 0.0, 50.0))
    assert f.lambda_h == pytest.approx(0.003, rel=1e-12)
    assert f.lambda_v == pytest.approx(0.012, rel=1e-12)


def test_forces_origin_corner_convention(baseline):
    f = forces_of_infection(baseline, StateFull(0.0, 0.0, 50.0, 0.0))
    assert f == (0.0, 0.0)


def test_forces_degenerate_denominator_raises(baseline):
    with pytest.raises(DegenerateStateError):
        forces_of_infection(baseline, StateFull(0.0, 0.0, 0.0, 5.0))


@given(k=st.floats(1e-3, 1e3), i_h=st.floats(1.0, 500.0), i_v=st.floats(0.0, 5000.0))
@settings(deadline=None)
def test_forces_scale_invariance(k, i_h, i_v):
    """Scaling every compartment leaves both forces unchanged."""
    p = TABLE1.replace(b=0.4, pi=2.0)
    a = forces_of_infection(p, StateFull(700.0, i_h, 0.0, i_v))
    b = forces_of_infection(p, StateFull(700.0 * k, i_h * k, 0.0, i_v * k))
    assert b.lambda_h == pytest.approx(a.lambda_h, rel=1e-9)
    assert b.lambda_v == pytest.approx(a.lambda_v, rel=1e-9)


# --- right-hand sides -------------------------------------------------------

def test_rhs_full_zero_at_disease_free(baseline):
    dfe = disease_free_equilibrium(baseline)
    scale = model.rhs_scale_full(baseline, dfe)
    assert np.all(np.abs(rhs_full(baseline, dfe)) <= 1e-14 * np.maximum(scale, 1.0))


def test_total_population_identities(baseline):
    rng = np.random.default_rng(5)
    for _ in range(50):
        st_ = random_interior_full(baseline, rng)
        f = rhs_full(baseline, st_)
        eta = mosquito_death_rate(baseline)
        nv_rhs = baseline.lambda_v - eta * st_.n_v
        nh_rhs = baseline.lambda_h - baseline.mu * st_.n_h - baseline.alpha * st_.i_h
        # roundoff lives at the scale of the summands, which the infection
        # terms inflate before they cancel
        scale_v = baseline.lambda_v + eta * st_.n_v + abs(f[2]) + abs(f[3])
        scale_h = (baseline.lambda_h + baseline.mu * st_.n_h
                   + baseline.alpha * st_.i_h + abs(f[0]) + abs(f[1]))
        assert abs((f[2] + f[3]) - nv_rhs) <= 1e-13 * scale_v
        assert abs((f[0] + f[1]) - nh_rhs) <= 1e-13 * scale_h


def test_rhs_full_zero_at_endemic_equilibrium(baseline):
    eq = endemic_equilibria(baseline)
    state = eq.endemic[0].state
    assert model.equilibrium_residual(baseline, state) < 1e-10


def test_rhs_reduced_matches_full_on_the_slice(baseline):
    """Reduced components equal full components 1, 2, 4 at s_v = V - i_v."""
    rng = np.random.default_rng(11)
    v_total = vector_capacity(baseline)
    for _ in range(25):
        s_h = rng.uniform(1, 900)
        i_h = rng.uniform(0.1, 90)
        i_v = rng.uniform(0.1, 0.9) * v_total
        red = StateReduced(s_h, i_h, i_v, v_total)
        full = StateFull(s_h, i_h, v_total - i_v, i_v)
        fr = rhs_reduced(baseline, red)
        ff = rhs_full(baseline, full)
        assert fr[0] == pytest.approx(ff[0], rel=1e-12, abs=1e-15)
        assert fr[1] == pytest.approx(ff[1], rel=1e-12, abs=1e-15)
        assert fr[2] == pytest.approx(ff[3], rel=1e-12, abs=1e-12)


def test_rhs_reduced_disease_free_is_stationary(baseline):
    red = model.reduced_state(baseline, model.human_capacity(baseline), 0.0, 0.0)
    assert np.allclose(rhs_reduced(baseline, red), 0.0, atol=1e-12)


def test_rhs_reduced_saturated_vectors_decay(baseline):
    v_total = vector_capacity(baseline)
    red = model.reduced_state(baseline, 500.0, 0.0, v_total)
    f = rhs_reduced(baseline, red)
    eta = mosquito_death_rate(baseline)
    assert f[2] == pytest.approx(-eta * v_total, rel=1e-12)


def test_rhs_reduced_endemic_projection_is_stationary(baseline):
    eq = endemic_equilibria(baseline)
    e = eq.endemic[0].state
    red = model.reduced_state(baseline, e.s_h, e.i_h, e.i_v)
    assert model.equilibrium_residual(baseline, red) < 1e-10


# --- region membership ------------------------------------------------------

def test_dfe_in_region(baseline):
    assert in_region(baseline, disease_free_equilibrium(baseline))


def test_human_overflow_out_of_region(baseline):
    s = StateFull(2 * model.human_capacity(baseline), 0.0, 0.0, 0.0)
    assert not in_region(baseline, s)


def test_endemic_equilibrium_in_region(baseline):
    eq = endemic_equilibria(baseline)
    assert in_region(baseline, eq.endemic[0].state)
    e = eq.endemic[0].state
    assert in_region(baseline, model.reduced_state(baseline, e.s_h, e.i_h, e.i_v))


def test_region_tolerance_is_relative(baseline):
    cap_h = model.human_capacity(baseline)
    assert in_region(baseline, StateFull(cap_h * (1 + 5e-10), 0.0, 0.0, 0.0))
    assert not in_region(baseline, StateFull(cap_h * (1 + 5e-9), 0.0, 0.0, 0.0))


def test_negative_components_rejected_at_construction():
    with pytest.raises(Exception):
        StateFull(-1.0, 0.0, 0.0, 0.0)


def test_random_params_smoke():
    rng = np.random.default_rng(99)
    for _ in range(200):
        p = sample_params(rng)
        assert contact_rate(p) >= 0.0
        assert mosquito_death_rate(p) > 0.0
