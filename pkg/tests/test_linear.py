import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm as scipy_expm

from pathtransport.errors import DomainError
from pathtransport.linear import (
    AlongPathConnection,
    ChartConnection,
    ConnectionTransport,
    FrameFunction,
    IntegratorConfig,
    coefficients_from_frame,
    constant_connection,
    derivation,
    flat_connection,
    integrate_trajectory,
    reparam_coefficients,
    transport_from_frame,
    transport_matrix,
)
from pathtransport.paths import UNIT, circle_arc, cubic, line_segment, polyline, reparameterize
from pathtransport.transport import check_groupoid


def varying_connection():
    """Non-commuting, position-dependent coefficients on the plane."""

    def comps(x):
        out = np.zeros((x.shape[0], 2, 2, 2))
        out[:, 0, 0, 1] = 1.0 + x[:, 1]
        out[:, 0, 1, 0] = -0.5
        out[:, 1, 0, 0] = np.sin(x[:, 0])
        out[:, 1, 1, 1] = 0.3 * x[:, 0] * x[:, 1]
        return out

    return ChartConnection(comps, 2, 2, name="varying")


def ode_oracle(conn, path, s, t):
    n = conn.fibre_dim

    def rhs(u, y):
        G = conn.at(path, u)
        return (-G @ y.reshape(n, n)).ravel()

    sol = solve_ivp(rhs, (s, t), np.eye(n).ravel(), rtol=1e-12, atol=1e-13, method="DOP853")
    return sol.y[:, -1].reshape(n, n)


def test_matches_ode_solver_on_varying_connection():
    conn = varying_connection()
    path = circle_arc([0.3, 0.1], 0.8)
    H = transport_matrix(conn, path, 0.4, 5.0, IntegratorConfig(steps=20000))
    np.testing.assert_allclose(H, ode_oracle(conn, path, 0.4, 5.0), atol=1e-8)


def test_backward_transport_is_inverse_for_both_reverse_modes():
    conn = varying_connection()
    path = circle_arc()
    fwd = transport_matrix(conn, path, 1.0, 3.0)
    for mode in ("invert", "direct"):
        back = transport_matrix(conn, path, 3.0, 1.0, IntegratorConfig(reverse=mode))
        np.testing.assert_allclose(back @ fwd, np.eye(2), atol=1e-6 if mode == "direct" else 1e-12)


def test_nilpotent_constant_coefficient_is_exact():
    G0 = np.array([[0.0, 1.5], [0.0, 0.0]])
    H = transport_matrix(constant_connection(G0), line_segment([0.0], [2.0]), 0.0, 1.0, IntegratorConfig(steps=3))
    np.testing.assert_allclose(H, [[1.0, -3.0], [0.0, 1.0]], atol=1e-14)


@given(d1=st.floats(-2, 2), d2=st.floats(-2, 2), s=st.floats(0, 1), t=st.floats(0, 1))
def test_diagonal_constant_coefficient_closed_form(d1, d2, s, t):
    conn = constant_connection(np.diag([d1, d2]))
    H = transport_matrix(conn, line_segment([0.0], [1.0]), s, t, IntegratorConfig(steps=7))
    want = np.diag(np.exp(-(t - s) * np.array([d1, d2])))
    np.testing.assert_allclose(H, want, rtol=1e-12, atol=1e-14)


def test_general_constant_coefficient_matches_scipy():
    G0 = np.array([[0.3, -1.1], [0.7, -0.2]])
    H = transport_matrix(constant_connection(G0), line_segment([0.0], [1.0]), 0.0, 1.0)
    np.testing.assert_allclose(H, scipy_expm(-G0), atol=1e-12)


def test_flat_connection_gives_identity():
    H = transport_matrix(flat_connection(3, 2), circle_arc(), 0.0, 6.0)
    np.testing.assert_array_equal(H, np.eye(3))


def test_second_order_convergence_on_varying_connection():
    conn = varying_connection()
    path = circle_arc([0.3, 0.1], 0.8)
    ref = ode_oracle(conn, path, 0.0, 2 * math.pi)
    errs = [np.linalg.norm(transport_matrix(conn, path, 0.0, 2 * math.pi, IntegratorConfig(steps=n)) - ref)
            for n in (100, 200, 400)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 2.0) < 0.3)


def test_trajectory_ends_at_transport():
    conn = varying_connection()
    path = circle_arc()
    grid, mats = integrate_trajectory(conn, path, 0.0, 2.0, IntegratorConfig(steps=200))
    np.testing.assert_allclose(mats[-1], transport_matrix(conn, path, 0.0, 2.0, IntegratorConfig(steps=200)),
                               atol=1e-12)
    np.testing.assert_allclose(mats[0], np.eye(2))
    assert grid[0] == 0.0 and grid[-1] == 2.0


def test_breakpoints_are_respected():
    # piecewise-constant coefficients: exact whatever the step count
    G0 = np.array([[0.0, 1.0], [-1.0, 0.2]])
    conn = ChartConnection(lambda x: np.broadcast_to(np.stack([G0, G0.T]), (x.shape[0], 2, 2, 2)), 2, 2)
    path = polyline([[0, 0], [1, 0], [1, 1]])
    H = transport_matrix(conn, path, 0.0, 1.0, IntegratorConfig(steps=2))
    np.testing.assert_allclose(H, scipy_expm(-G0.T) @ scipy_expm(-G0), atol=1e-13)


def test_reparam_coefficients_rule():
    conn = varying_connection()
    path = circle_arc()
    tau = cubic(UNIT, path.domain, weight=0.5)
    moved = reparameterize(path, tau)
    s = np.linspace(0.05, 0.95, 7)
    direct = conn.coefficients(moved, s)
    want = tau.derivative(s)[:, None, None] * conn.coefficients(path, tau(s))
    np.testing.assert_allclose(direct, want, atol=1e-12)
    np.testing.assert_allclose(reparam_coefficients(conn, path, tau).coefficients(moved, s), want, atol=1e-12)


def test_frame_transport_and_coefficients():
    def fn(u):
        c, s_ = np.cos(u), np.sin(u)
        return np.stack([np.stack([c, -s_ * np.exp(u)], -1), np.stack([s_, c * np.exp(u)], -1)], -2)

    F = FrameFunction(fn, 2)
    path = line_segment([0.0], [1.0])
    H = transport_from_frame(F, path, 0.2, 0.7).matrix
    np.testing.assert_allclose(H, np.linalg.inv(fn(np.array([0.7]))[0]) @ fn(np.array([0.2]))[0])
    u = np.array([0.0, 0.5, 1.0])
    h = 1e-6
    dF = (fn(u + h) - fn(u - h)) / (2 * h)
    want = np.linalg.inv(fn(u)) @ dF
    np.testing.assert_allclose(coefficients_from_frame(F, path, u), want, atol=1e-7)
    # integrating the extracted coefficients reproduces the frame transport
    conn = AlongPathConnection(lambda _p, s: coefficients_from_frame(F, path, s, h=1e-5), 2)
    np.testing.assert_allclose(transport_matrix(conn, path, 0.2, 0.7, IntegratorConfig(steps=4000)), H, atol=1e-6)


def test_derivation_methods_agree():
    conn = varying_connection()
    path = circle_arc()

    def sigma(u):
        return np.column_stack([np.sin(u), np.cos(2 * u)])

    for s in (0.0, 1.3, 2 * math.pi):
        a = derivation(conn, path, sigma, s)
        b = derivation(conn, path, sigma, s, method="closed")
        np.testing.assert_allclose(a, b, atol=1e-6)


def test_derivation_of_sampled_section():
    conn = constant_connection(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    path = line_segment([0.0], [1.0])
    u = np.linspace(0, 1, 101)
    vals = np.column_stack([u**2, u])
    d = derivation(conn, path, (u, vals), 0.5, method="closed")
    np.testing.assert_allclose(d, [1.0 + 0.5, -0.25 + 1.0], atol=1e-6)


def test_derivation_rejects_tiny_step():
    with pytest.raises(ValueError):
        derivation(flat_connection(), line_segment([0.0], [1.0]), lambda u: np.ones((len(u), 2)), 0.5, h=1e-9)


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(steps=0)
    with pytest.raises(ValueError):
        IntegratorConfig(scheme="euler")
    with pytest.raises(ValueError):
        IntegratorConfig(reverse="sideways")


def test_out_of_domain_parameters_rejected():
    with pytest.raises(DomainError):
        transport_matrix(flat_connection(), line_segment([0.0], [1.0]), 0.0, 2.0)


def test_cached_family_matches_uncached():
    conn = varying_connection()
    path = circle_arc()
    cached = ConnectionTransport(conn, IntegratorConfig(steps=500))
    plain = ConnectionTransport(conn, IntegratorConfig(steps=500), cache_size=0)
    for s, t in [(0.0, 2.0), (2.0, 0.0), (0.0, 2.0), (1.0, 1.0)]:
        np.testing.assert_array_equal(cached.matrix(path, s, t), plain.matrix(path, s, t)) if s <= t else \
            np.testing.assert_allclose(cached.matrix(path, s, t), plain.matrix(path, s, t), atol=1e-12)
    # callers cannot corrupt the cache
    m = cached.matrix(path, 0.0, 2.0)
    m[:] = 0.0
    assert np.linalg.norm(cached.matrix(path, 0.0, 2.0)) > 0


def test_groupoid_residual_on_varying_connection_is_discretisation_error():
    # Each (s, t) pair gets its own step grid, so composition only holds up
    # to the second-order integrator error: ten times the steps, a hundredth
    # of the residual.
    res = [check_groupoid(ConnectionTransport(varying_connection(), IntegratorConfig(steps=n)), circle_arc()).residual()
           for n in (2000, 20000)]
    assert 80 < res[0] / res[1] < 120
