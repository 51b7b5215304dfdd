import numpy as np
from scipy.linalg import expm as scipy_expm

from pathtransport.mocks import (
    DEFAULT_G0,
    PathGlobalTransport,
    path_global_rule,
    speed_blind_rule,
    speed_blind_transport,
)
from pathtransport.parallel import AxiomSuite, check_axioms
from pathtransport.linear import IntegratorConfig
from pathtransport.paths import Interval, line_segment
from pathtransport.suites import locality_suite
from pathtransport.transport import check_groupoid

PATHS = [line_segment([0.0], [1.0]), line_segment([-0.5], [1.5], Interval(-1.0, 2.0))]


def test_path_global_closed_form():
    I = PathGlobalTransport()
    np.testing.assert_allclose(I.matrix(PATHS[1], 0.0, 1.0), scipy_expm(-3.0 * DEFAULT_G0))


def test_mocks_pass_groupoid_laws():
    # the speed-blind coefficients vary along the path, so the step count
    # must push the integrator error below the tolerance
    for I in (PathGlobalTransport(), speed_blind_transport(cfg=IntegratorConfig(steps=20000))):
        for p in PATHS:
            assert check_groupoid(I, p).passed


def test_path_global_fails_restriction_and_reparametrization():
    rep = locality_suite(PathGlobalTransport(), PATHS)
    assert not rep.passed_law("restriction")
    assert not rep.passed_law("reparametrization")


def test_speed_blind_fails_reparametrization_only():
    rep = locality_suite(speed_blind_transport(), PATHS)
    assert rep.passed_law("restriction")
    assert not rep.passed_law("reparametrization")


def test_mock_rules_fail_reparam_invariance():
    for rule in (path_global_rule(), speed_blind_rule()):
        rep = check_axioms(rule, AxiomSuite(PATHS))
        assert not rep.passed_law("reparam_invariance")
