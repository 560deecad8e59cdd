"""Shared fixtures and random-parameter samplers."""

from __future__ import annotations

import numpy as np
import pytest

from vbmalaria import ModelParams, TABLE1
from vbmalaria import equilibria, model


@pytest.fixture
def baseline() -> ModelParams:
    """Table-1 values at the study point b = 0.4, pi = 2."""
    return TABLE1.replace(b=0.4, pi=2.0)


def sample_params(rng: np.random.Generator, allow_zero_alpha: bool = True) -> ModelParams:
    """A random valid, numerically tame parameter set."""
    lambda_h = 10.0 ** rng.uniform(-3.0, 1.0)
    mu = 10.0 ** rng.uniform(-5.0, -2.0)
    lambda_v = 10.0 ** rng.uniform(0.0, 4.0)
    eta_nat = 10.0 ** rng.uniform(-2.5, -0.3)
    eta_bn = 0.0 if rng.random() < 0.25 else 10.0 ** rng.uniform(-3.0, -0.5)
    if allow_zero_alpha and rng.random() < 0.25:
        alpha = 0.0
    else:
        alpha = 10.0 ** rng.uniform(-4.0, -1.5)
    delta = 10.0 ** rng.uniform(-2.0, 0.0)
    beta_max = 10.0 ** rng.uniform(-2.0, 0.0)
    beta_min = rng.uniform(0.0, 0.5) * beta_max
    return ModelParams(
        lambda_h=lambda_h, lambda_v=lambda_v, mu=mu, eta_nat=eta_nat,
        eta_bn=eta_bn, alpha=alpha, p1=rng.uniform(0.05, 1.0),
        p2=rng.uniform(0.05, 1.0), beta_max=beta_max, beta_min=beta_min,
        delta=delta, pi_bias=rng.uniform(1.0, 5.0), bednet=rng.uniform(0.0, 1.0))


def sample_params_at_criticality(rng: np.random.Generator,
                                 zero_alpha: bool = False) -> ModelParams:
    """Random valid parameters with p2 set exactly to the criticality value.

    lambda_v is rescaled so that p2_crit lands inside (0.1, 0.9), keeping the
    p2 in [0, 1] invariant intact.
    """
    p = sample_params(rng)
    if zero_alpha:
        p = p.replace(alpha=0.0)
    target = rng.uniform(0.1, 0.9)
    beta = model.contact_rate(p)
    eta = model.mosquito_death_rate(p)
    lambda_v = (p.lambda_h * eta * eta * p.alpha0
                / (p.pi_bias * p.p1 * p.mu * beta * beta * target))
    p = p.replace(lambda_v=lambda_v)
    return p.replace(p2=equilibria._p2_at_unit_r0(p))


def random_interior_reduced(params: ModelParams, rng: np.random.Generator):
    """A strictly interior reduced-system state."""
    cap_h = model.human_capacity(params)
    v_total = model.vector_capacity(params)
    u = rng.uniform(0.01, 0.99, 3)
    s_h = u[0] * cap_h
    i_h = u[1] * (cap_h - s_h)
    i_v = u[2] * v_total
    return model.reduced_state(params, s_h, i_h, i_v)


def random_interior_full(params: ModelParams, rng: np.random.Generator):
    """A strictly interior full-system state."""
    cap_h = model.human_capacity(params)
    cap_v = model.vector_capacity(params)
    n_h = rng.uniform(0.05, 0.99) * cap_h
    s_h = rng.uniform(0.05, 0.95) * n_h
    n_v = rng.uniform(0.05, 0.99) * cap_v
    s_v = rng.uniform(0.05, 0.95) * n_v
    return model.StateFull(s_h, n_h - s_h, s_v, n_v - s_v)
