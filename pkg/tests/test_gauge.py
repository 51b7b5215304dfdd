import math

import numpy as np
import pytest
from scipy.integrate import quad

from pathtransport.errors import GroupInvariantError, LoopError
from pathtransport.gauge import (
    GaugePotential,
    GroupElement,
    check_group_laws,
    group_transport,
    infinitesimal_check,
    infinitesimal_deviation,
    rebase_loop,
    su2_algebra,
    su2_constant_potential,
    u1_uniform_potential,
    wilson_loop,
)
from pathtransport.linear import IntegratorConfig
from pathtransport.paths import UNIT, circle_arc, cubic, line_segment, polyline, reparameterize

SQUARE = polyline([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]])


def test_zero_potentials_give_identity():
    assert np.allclose(group_transport(u1_uniform_potential(0.0), circle_arc()).matrix, 1.0)
    g = group_transport(su2_constant_potential(np.zeros((2, 3))), SQUARE)
    np.testing.assert_allclose(g.matrix, np.eye(2), atol=1e-15)


def test_u1_matches_quadrature_on_curved_path():
    B = 1.7
    base = circle_arc([0.4, -0.3], 0.9, domain=circle_arc().domain)
    path = reparameterize(base, cubic(UNIT, base.domain, weight=0.6))

    def integrand(u):
        x, y = path(u)
        dx, dy = path.velocity(u)
        return x * dy - y * dx

    integral, _ = quad(integrand, 0.0, 1.0, epsabs=1e-13, limit=200)
    g = group_transport(u1_uniform_potential(B), path, IntegratorConfig(steps=20000))
    assert abs(g.matrix[0, 0] - np.exp(0.5j * B * integral)) < 1e-8


def test_u1_wilson_phase_equals_enclosed_flux():
    B, r = 0.8, 1.3
    g = wilson_loop(u1_uniform_potential(B), circle_arc([0.0, 0.0], r))
    diff = (g.phase - B * math.pi * r * r + math.pi) % (2 * math.pi) - math.pi
    assert abs(diff) < 1e-10


def test_wilson_loop_requires_closed_path():
    with pytest.raises(LoopError):
        wilson_loop(u1_uniform_potential(1.0), line_segment([0, 0], [1, 0]))


def test_group_invariant_violation_raises():
    with pytest.raises(GroupInvariantError):
        GroupElement("SU2", 2 * np.eye(2)).check()
    with pytest.raises(GroupInvariantError):
        GroupElement("U1", np.array([[1.1]])).check()


def test_algebra_validation():
    good = su2_constant_potential([[0.1, 0.2, 0.3], [0.0, 1.0, 0.0]])
    assert good.check_algebra(np.zeros((3, 2))) < 1e-15
    bad = GaugePotential("SU2", lambda x: np.broadcast_to(np.eye(2), (x.shape[0], 1, 2, 2)), 1)
    with pytest.raises(GroupInvariantError):
        bad.check_algebra(np.zeros((2, 1)))


def test_su2_algebra_is_traceless_antihermitian():
    X = su2_algebra([[0.3, -0.2, 0.9]])[0]
    assert abs(np.trace(X)) < 1e-15
    np.testing.assert_allclose(X + X.conj().T, 0.0, atol=1e-15)


def test_group_laws_for_su2():
    A = su2_constant_potential([[0.9, 0.0, 0.0], [0.0, 1.3, 0.0]])
    g1 = line_segment([0, 0], [1, 0])
    g2 = line_segment([1, 0], [1, 1])
    rep = check_group_laws(A, g1, g2, cubic(UNIT, UNIT), cfg=IntegratorConfig(steps=20000))
    assert rep.passed, rep.failing_laws()
    assert rep.residual("group_product_swapped") > 0.1


def test_rebased_loop_is_conjugate():
    A = su2_constant_potential([[0.9, 0.0, 0.0], [0.0, 1.3, 0.0]])
    W = wilson_loop(A, SQUARE).matrix
    moved = wilson_loop(A, rebase_loop(SQUARE, 0.3)).matrix
    assert abs(np.trace(W) - np.trace(moved)) < 1e-12
    with pytest.raises(ValueError):
        rebase_loop(SQUARE, 0.0)


def test_infinitesimal_expansion_is_second_order():
    A = su2_constant_potential([[0.9, 0.1, 0.0], [0.0, 1.3, 0.4]])
    d1 = infinitesimal_deviation(A, [0.3, -0.2], [1e-3, 0.0])
    d2 = infinitesimal_deviation(A, [0.3, -0.2], [5e-4, 0.0])
    assert 3.5 < d1 / d2 < 4.5
    rep = infinitesimal_check(A, [0.3, -0.2], [1e-4, 2e-4])
    assert rep.passed


def test_infinitesimal_zero_deviation_counts_as_pass():
    rep = infinitesimal_check(u1_uniform_potential(0.0), [0.1, 0.1], [1e-4, 0.0])
    assert rep.passed


def test_reunitarize_projects():
    A = su2_constant_potential([[0.9, 0.0, 0.0], [0.0, 1.3, 0.0]])
    g = group_transport(A, SQUARE, IntegratorConfig(steps=50, reunitarize=True))
    assert g.defect() < 1e-13
