import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathtransport.errors import DomainError
from pathtransport.parallel import (
    AxiomSuite,
    ParallelMap,
    ReconstructedTransport,
    SegmentSign,
    check_axioms,
    check_reconstruction,
    check_segment_law,
    initial_segment,
    roundtrip_transport,
    rule_from_transport,
    segment_form,
    to_transport,
)
from pathtransport.paths import Interval, circle_arc, line_segment, polyline
from pathtransport.suites import frame_example, frame_field
from pathtransport.transport import SingularMatrixError, check_groupoid

PATH = circle_arc([0.2, -0.1], 0.7)
PHI = rule_from_transport(frame_example())


def test_rule_value_is_whole_path_transport():
    want = np.linalg.inv(frame_field(PATH(PATH.domain.b))[0]) @ frame_field(PATH(PATH.domain.a))[0]
    np.testing.assert_allclose(PHI.matrix(PATH), want, atol=1e-12)


def test_parallel_map_must_be_invertible():
    with pytest.raises(SingularMatrixError):
        ParallelMap(PATH, np.zeros((2, 2)))


@given(s=st.floats(-3, 3), d=st.floats(-3, 3))
def test_segment_sign(s, d):
    sign = SegmentSign(s, s + d)
    assert sign.epsilon == (1 if s <= s + d else -1)


def test_segment_sign_on_equal_parameters_is_plus_one():
    assert SegmentSign(0.3, 0.3).epsilon == 1


def test_initial_segment_variants_share_endpoints():
    for via in ("restriction", "affine", "cubic"):
        seg = initial_segment(PATH, 2.0, via)
        np.testing.assert_allclose(seg(seg.domain.b), PATH(2.0), atol=1e-12)
        np.testing.assert_allclose(seg(seg.domain.a), PATH(0.0), atol=1e-12)
    assert initial_segment(PATH, 0.0).domain.degenerate
    assert initial_segment(PATH, 2.0) is initial_segment(PATH, 2.0)
    with pytest.raises(DomainError):
        initial_segment(PATH, 10.0)
    with pytest.raises(ValueError):
        initial_segment(PATH, 1.0, "spline")


def test_reconstruction_forms_agree_on_frame_rule():
    rep = check_reconstruction(PHI, PATH, tol=1e-12)
    assert rep.passed, rep.failing_laws()


def test_reconstructed_family_equals_original():
    I = frame_example()
    R = ReconstructedTransport(PHI)
    for s, t in [(0.0, 1.0), (3.0, 1.0), (2.0, 2.0)]:
        np.testing.assert_allclose(R.matrix(PATH, s, t), I.matrix(PATH, s, t), atol=1e-12)
        np.testing.assert_allclose(segment_form(PHI, PATH, s, t).matrix, to_transport(PHI, PATH, s, t).matrix,
                                   atol=1e-12)
    assert check_groupoid(R, PATH, tol=1e-12).passed


def test_axioms_hold_for_frame_rule():
    a = line_segment([0.0, 0.0], [1.0, 0.0])
    b = line_segment([1.0, 0.0], [1.0, 1.0])
    rep = check_axioms(PHI, AxiomSuite([PATH, a, polyline([[0, 0], [1, 0], [1, 1]])], pairs=[(a, b)]), tol=1e-12)
    assert rep.passed, rep.failing_laws()
    assert {"reparam_invariance", "reversal", "point_path", "product", "reversed_product"} <= set(rep.laws)


def test_product_order_detects_nonabelian_swap():
    # the frame rule is nonabelian across a corner, so only one order holds
    a = line_segment([0.0, 0.0], [1.0, 0.0])
    b = line_segment([1.0, 0.0], [1.0, 1.0])
    rep = check_axioms(PHI, AxiomSuite([], pairs=[(a, b)]), tol=1e-12)
    assert rep.passed_law("product")
    assert rep.residual("product_swapped") > 1e-2


def test_segment_law_and_ordering_guard():
    rep = check_segment_law(PHI, PATH, 0.5, 1.5, 4.0, tol=1e-12)
    assert rep.passed
    with pytest.raises(DomainError):
        check_segment_law(PHI, PATH, 2.0, 1.0, 3.0)


def test_roundtrip_frame():
    rep = roundtrip_transport(frame_example(), PATH, tol=1e-12)
    assert rep.passed
    assert set(rep.laws) == {"roundtrip_transport", "roundtrip_parallel"}


def test_restriction_is_what_a_rule_sees():
    seg = initial_segment(PATH, 1.0)
    assert seg.domain == Interval(0.0, 1.0)
