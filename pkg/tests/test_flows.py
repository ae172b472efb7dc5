"""RK4 time-one flows, flow-vs-map errors, optimal-order selection."""

import math

import numpy as np
import pytest

from discavg.errors import DomainError
from discavg.flows import (
    C0,
    IntegratorConfig,
    flow_error,
    flow_time_one,
    flow_time_one_with_estimate,
    optimal_order_select,
)
from discavg.interpolation import forward_scheme, symmetric_scheme
from discavg.maps import exp_scalar_model, henon_model, identity_model, iterated_map


def test_zero_and_constant_fields():
    cfg = IntegratorConfig(16)
    x = np.array([0.3, -0.7])
    assert np.array_equal(flow_time_one(lambda p: np.zeros(2), x, cfg), x)
    v = np.array([0.25, -1.5])
    out = flow_time_one(lambda p: v, x, cfg)
    assert np.max(np.abs(out - (x + v))) <= 1e-13


def test_linear_field_matches_exponential():
    s = 0.1
    out = flow_time_one(lambda p: s * p, np.array([1.0]), IntegratorConfig(64))
    assert abs(out[0] - math.exp(s)) <= 1e-13


def test_rk4_order_from_step_halving():
    s = 0.5
    field = lambda p: s * p
    exact = math.exp(s)
    e4 = abs(flow_time_one(field, [1.0], IntegratorConfig(4))[0] - exact)
    e8 = abs(flow_time_one(field, [1.0], IntegratorConfig(8))[0] - exact)
    assert e4 / e8 >= 14.0  # order >= 3.8


def test_estimate_bounds_substep_doubling():
    s = 0.3
    field = lambda p: s * p
    for substeps in (8, 16, 64):
        cfg = IntegratorConfig(substeps)
        out, est = flow_time_one_with_estimate(field, [1.0], cfg)
        doubled = flow_time_one(field, [1.0], IntegratorConfig(2 * substeps))
        assert abs(doubled[0] - out[0]) <= 16.0 * est


def test_default_substeps_meet_error_budget():
    _, est = flow_time_one_with_estimate(lambda p: 0.1 * p, [1.0], IntegratorConfig(64))
    assert est <= 1e-13


def test_flow_error_identity_map_is_zero():
    rep = flow_error(identity_model(2), [0.4, 0.2], symmetric_scheme(2))
    assert rep.error == 0.0


def test_flow_error_exp_scalar_closed_form():
    # oracle: lambda_2 = sum p_k e^{ks} over {0,1,2}; error = |e^lambda2 - e^s|
    s = 0.1
    lam = 2.0 * math.exp(s) - 0.5 * math.exp(2 * s) - 1.5
    oracle = abs(math.exp(lam) - math.exp(s))
    rep = flow_error(exp_scalar_model(s), [1.0], forward_scheme(2), IntegratorConfig(64))
    assert rep.m == 2
    assert abs(rep.error - oracle) <= 1e-12
    assert not rep.integrator_limited


def test_flow_error_monotone_decay_pre_optimum():
    cfg = IntegratorConfig(64)
    errs = [
        flow_error(exp_scalar_model(0.05), [1.0], forward_scheme(m), cfg).error
        for m in range(1, 7)
    ]
    assert all(errs[i + 1] < errs[i] for i in range(5))


def test_flow_error_first_order_scales_quadratically():
    # |Phi^1_{X_1} - F_eps| = O(eps^2): log-log slope >= 1.8
    from discavg.diagnostics import loglog_slope

    cfg = IntegratorConfig(64)
    eps = [1e-3, 1e-2, 1e-1]
    errs = [flow_error(exp_scalar_model(e), [1.0], forward_scheme(1), cfg).error for e in eps]
    assert loglog_slope(eps, errs) >= 1.8


def test_flow_error_henon_decreases_toward_optimum():
    cfg = IntegratorConfig(64)
    system = iterated_map(henon_model(eps=1e-3), 4)
    errs = [
        flow_error(system, [0.3, 0.1], symmetric_scheme(m), cfg).error
        for m in range(1, 5)
    ]
    assert all(errs[i + 1] < errs[i] for i in range(3))


def test_optimal_decay_fits_negative_slope_against_inverse_s():
    # error at the bound-optimal order shrinks as the map nears the identity
    cfg = IntegratorConfig(64)
    xs, ys = [], []
    for s in (0.02, 0.05, 0.1):
        m = optimal_order_select(s)
        rep = flow_error(exp_scalar_model(s), [1.0], forward_scheme(m), cfg)
        xs.append(1.0 / s)
        ys.append(math.log(rep.error))
    slope = np.polyfit(xs, ys, 1)[0]
    assert slope < 0


def test_optimal_order_select_values():
    assert optimal_order_select(C0) == 2
    assert optimal_order_select(C0 / 10) == 11
    assert optimal_order_select(1.0) == 1
    with pytest.raises(DomainError):
        optimal_order_select(0.0)


def test_integrator_config_validation():
    with pytest.raises(DomainError):
        IntegratorConfig(0)
