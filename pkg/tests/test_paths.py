import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathtransport.errors import DomainError, JunctionError
from pathtransport.paths import (
    UNIT,
    Interval,
    affine,
    canonicalize,
    circle_arc,
    compose_reparams,
    concat_canonical,
    cubic,
    latitude_arc,
    line_segment,
    point_path,
    polyline,
    reparameterize,
    restrict,
    reverse_canonical,
    sampled,
)

finite = st.floats(-5, 5, allow_nan=False)


def test_interval_rejects_reversed_and_nonfinite():
    with pytest.raises(DomainError):
        Interval(1.0, 0.0)
    with pytest.raises(DomainError):
        Interval(0.0, math.inf)


def test_line_segment_points_and_velocity():
    p = line_segment([0.0, 1.0], [2.0, 3.0], Interval(0.0, 2.0))
    np.testing.assert_allclose(p(1.0), [1.0, 2.0])
    np.testing.assert_allclose(p.velocity(0.5), [1.0, 1.0])
    assert p(np.array([0.0, 2.0])).shape == (2, 2)


def test_parameter_outside_domain_raises():
    p = line_segment([0.0], [1.0])
    with pytest.raises(DomainError):
        p(1.5)


def test_circle_is_closed_and_unit_speed():
    c = circle_arc([0.2, -0.1], 0.7)
    assert c.is_closed
    np.testing.assert_allclose(np.linalg.norm(c.velocity(np.linspace(0, 6, 7)), axis=1), 0.7)


def test_latitude_arc_stays_on_latitude():
    p = latitude_arc(1.0)
    np.testing.assert_allclose(p(np.linspace(0, 2 * math.pi, 5))[:, 0], 1.0)


def test_polyline_breakpoints_and_corners():
    p = polyline([[0, 0], [1, 0], [1, 1]])
    assert p.breakpoints == (0.5,)
    np.testing.assert_allclose(p(0.5), [1.0, 0.0])
    np.testing.assert_allclose(p(0.75), [1.0, 0.5])


def test_restrict_keeps_points():
    p = circle_arc()
    r = restrict(p, Interval(1.0, 2.0))
    assert r.domain == Interval(1.0, 2.0)
    np.testing.assert_allclose(r(1.5), p(1.5))
    with pytest.raises(DomainError):
        restrict(p, Interval(-1.0, 1.0))


def test_reverse_canonical_runs_backwards():
    p = canonicalize(line_segment([0.0, 0.0], [1.0, 2.0]))
    r = reverse_canonical(p)
    np.testing.assert_allclose(r(0.25), p(0.75))
    np.testing.assert_allclose(r.velocity(0.25), -p.velocity(0.75))


def test_concat_requires_matching_endpoints():
    a = canonicalize(line_segment([0.0, 0.0], [1.0, 0.0]))
    b = canonicalize(line_segment([1.0, 0.0], [1.0, 1.0]))
    ab = concat_canonical(a, b)
    np.testing.assert_allclose(ab(0.25), [0.5, 0.0])
    np.testing.assert_allclose(ab(0.75), [1.0, 0.5])
    np.testing.assert_allclose(ab.velocity(0.25), [2.0, 0.0])
    assert 0.5 in ab.breakpoints
    with pytest.raises(JunctionError):
        concat_canonical(b, b)
    with pytest.raises(DomainError):
        concat_canonical(line_segment([0.0], [1.0], Interval(0, 2)), canonicalize(line_segment([1.0], [0.0])))


def test_point_path_is_constant():
    p = point_path([1.0, 2.0], 0.5)
    assert p.domain.degenerate
    np.testing.assert_allclose(p(0.5), [1.0, 2.0])


@given(a=finite, length=st.floats(0.1, 5), c=finite, d_len=st.floats(0.1, 5), reverse=st.booleans())
def test_affine_maps_endpoints(a, length, c, d_len, reverse):
    src, tgt = Interval(a, a + length), Interval(c, c + d_len)
    tau = affine(src, tgt, reverse=reverse)
    ends = tau(np.array([src.a, src.b]))
    want = [tgt.b, tgt.a] if reverse else [tgt.a, tgt.b]
    np.testing.assert_allclose(ends, want, atol=1e-12)
    assert tau.orientation == ("reversing" if reverse else "preserving")


@given(weight=st.floats(0.0, 0.9), u=st.floats(0.0, 1.0))
def test_cubic_is_monotone_and_invertible(weight, u):
    tau = cubic(Interval(2.0, 2.5), Interval(0.0, 1.0), weight=weight)
    s = np.linspace(2.0, 2.5, 101)
    assert np.all(np.diff(tau(s)) > 0)
    assert np.all(tau.derivative(s) > 0)
    back = tau.invert(np.array([u]))
    np.testing.assert_allclose(tau(back), [u], atol=1e-10)


def test_cubic_derivative_matches_finite_difference():
    tau = cubic(UNIT, Interval(-1.0, 3.0), weight=0.5)
    s = np.linspace(0.1, 0.9, 9)
    h = 1e-6
    fd = (tau(s + h) - tau(s - h)) / (2 * h)
    np.testing.assert_allclose(tau.derivative(s), fd, rtol=1e-7)


def test_reparameterize_chain_rule():
    p = circle_arc()
    tau = cubic(UNIT, p.domain, weight=0.4)
    q = reparameterize(p, tau)
    s = np.linspace(0, 1, 11)
    np.testing.assert_allclose(q(s), p(tau(s)), atol=1e-12)
    np.testing.assert_allclose(q.velocity(s), p.velocity(tau(s)) * tau.derivative(s)[:, None], atol=1e-12)


def test_reparameterize_rejects_wrong_target():
    p = circle_arc()
    with pytest.raises(DomainError):
        reparameterize(p, affine(UNIT, UNIT))


def test_compose_reparams():
    inner = affine(Interval(0, 2), UNIT)
    outer = cubic(UNIT, Interval(0, 4))
    both = compose_reparams(outer, inner)
    s = np.linspace(0, 2, 5)
    np.testing.assert_allclose(both(s), outer(inner(s)), atol=1e-12)


def test_sampled_path_interpolates():
    s = np.linspace(0, 1, 21)
    table = np.column_stack([s, np.sin(s), s**2])
    p = sampled(table)
    np.testing.assert_allclose(p(0.37), [math.sin(0.37), 0.37**2], atol=1e-5)
    np.testing.assert_allclose(p.velocity(0.5), [math.cos(0.5), 1.0], atol=1e-4)
    lin = sampled(table, "linear")
    np.testing.assert_allclose(lin(s[3]), table[3, 1:])


def test_non_monotone_reparameterization_rejected():
    from pathtransport.paths import Reparameterization

    with pytest.raises(DomainError):
        Reparameterization(UNIT, UNIT, lambda s: 4 * s * (1 - s), lambda s: 4 - 8 * s)
    with pytest.raises(DomainError):
        cubic(UNIT, UNIT, weight=1.0)
