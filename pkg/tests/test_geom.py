import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steinersym import geom, verify
from steinersym.errors import InvalidInput
from steinersym.geom import Polygon

from shapes import stars

UNIT = Polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def test_unit_square_measures():
    assert geom.area(UNIT) == 1.0
    assert geom.perimeter(UNIT) == 4.0
    assert geom.diameter(UNIT) == pytest.approx(np.sqrt(2), abs=1e-15)


def test_rectangle_measures():
    r = Polygon.rectangle(0, 0, 2, 1)
    assert geom.perimeter(r) == pytest.approx(6.0)
    assert geom.diameter(r) == pytest.approx(np.sqrt(5))


def test_regular_polygon_closed_forms():
    p = Polygon.regular(64, 1.0)
    assert geom.area(p) == pytest.approx(64 * np.sin(2 * np.pi / 64) / 2, rel=1e-14)
    assert geom.diameter(p) == pytest.approx(2.0, abs=1e-14)


def test_clockwise_input_is_reoriented():
    cw = Polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert geom.area(cw) == 1.0


def test_self_intersecting_rejected():
    with pytest.raises(InvalidInput):
        Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_too_few_vertices_rejected():
    with pytest.raises(InvalidInput):
        Polygon([(0, 0), (1, 0)])


def test_finger_area_monte_carlo():
    p = verify.finger_polygon()
    rng = np.random.default_rng(1)
    x0, y0 = p.vertices.min(0)
    x1, y1 = p.vertices.max(0)
    n = 1_000_000
    pts = rng.uniform(x0, x1, n) + 1j * rng.uniform(y0, y1, n)
    est = geom.contains(p, pts).mean() * (x1 - x0) * (y1 - y0)
    assert est == pytest.approx(geom.area(p), rel=5e-3)


def test_rotate_square_quarter_turn_is_same_set():
    sq = Polygon.rectangle(-1, -1, 1, 1)
    r = geom.rotate(sq, np.pi / 2)
    a = {(round(x, 12) + 0.0, round(y, 12) + 0.0) for x, y in sq.vertices}
    b = {(round(x, 12) + 0.0, round(y, 12) + 0.0) for x, y in r.vertices}
    assert a == b
    assert np.array_equal(geom.rotate(sq, 0.0).vertices, sq.vertices)


def test_scale_examples():
    assert geom.area(geom.scale(UNIT, 2)) == pytest.approx(4.0)
    back = geom.scale(geom.scale(UNIT, 0.5), 2)
    assert np.allclose(back.vertices, UNIT.vertices, atol=1e-15)
    with pytest.raises(InvalidInput):
        geom.scale(UNIT, 0)


def test_slices_of_square_and_triangle():
    s = geom.vertical_slices(UNIT)
    assert np.allclose(s(np.array([0.1, 0.5, 0.9])), 1.0)
    assert np.allclose(s(np.array([-0.5, 1.5])), 0.0)
    tri = Polygon([(0, 0), (1, 0), (0, 1)])
    t = np.linspace(0.05, 0.95, 19)
    assert np.allclose(geom.vertical_slices(tri)(t), 1 - t, atol=1e-14)


def test_finger_slice_integral_matches_area():
    p = verify.finger_polygon()
    assert geom.vertical_slices(p).integral() == pytest.approx(geom.area(p), rel=1e-9)


def test_angular_measure_full_and_half_circle():
    disk = Polygon.regular(256, 1.0)
    assert geom.angular_measure(disk, 0.5) == pytest.approx(2 * np.pi, abs=1e-6)
    t = np.linspace(0, np.pi, 129)
    half = Polygon.from_complex(np.exp(1j * t))
    assert geom.angular_measure(half, 0.5) == pytest.approx(np.pi, abs=1e-3)


def test_angular_measure_through_vertex():
    # circle passes exactly through the rectangle's corners
    r = Polygon.rectangle(-1, -0.5, 1, 0.5)
    t = abs(1 + 0.5j)
    assert geom.angular_measure(r, t) == pytest.approx(0.0, abs=1e-9)
    # tangent to the short sides: only the arcs inside remain
    m = geom.angular_measure(r, 1.0)
    assert m == pytest.approx(4 * np.arcsin(0.5), abs=1e-9)


def test_radial_quadrature_recovers_area():
    p = Polygon.rectangle(-1, -0.5, 1, 0.5)
    t = np.linspace(0, abs(1 + 0.5j), 4001)
    m = np.array([geom.angular_measure(p, x) for x in t])
    assert np.trapezoid(t * m, t) == pytest.approx(2.0, rel=1e-3)


def test_hausdorff_examples():
    sq = Polygon.rectangle(0, 0, 1, 1)
    assert geom.boundary_hausdorff(sq, sq) == 0.0
    big = geom.translate(geom.scale(geom.translate(sq, -0.5 - 0.5j), 1.1), 0.5 + 0.5j)
    assert geom.boundary_hausdorff(sq, big) == pytest.approx(0.05 * np.sqrt(2), abs=2e-3)
    assert geom.boundary_hausdorff(sq, geom.rotate(geom.translate(sq, -0.5 - 0.5j), np.pi / 2)
                                   ) == pytest.approx(geom.boundary_hausdorff(
                                       sq, geom.translate(sq, -0.5 - 0.5j)), abs=1e-12)


def test_digest_and_json_round_trip():
    p = verify.star_polygon()
    q = Polygon.from_json(p.to_json())
    assert q.digest() == p.digest()
    assert np.array_equal(q.vertices, p.vertices)


@settings(max_examples=40, deadline=None)
@given(stars)
def test_isoperimetric_property(p):
    assert geom.perimeter(p) ** 2 >= 4 * np.pi * geom.area(p)


@settings(max_examples=40, deadline=None)
@given(stars, st.floats(-np.pi, np.pi))
def test_rotation_round_trip_and_invariance(p, phi):
    q = geom.rotate(geom.rotate(p, phi), -phi)
    assert np.abs(q.vertices - p.vertices).max() < 1e-12
    assert geom.area(geom.rotate(p, phi)) == pytest.approx(geom.area(p), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(stars, st.floats(0.1, 10))
def test_scaling_law(p, c):
    q = geom.scale(p, c)
    assert geom.area(q) == pytest.approx(c * c * geom.area(p), rel=1e-12)
    assert geom.perimeter(q) == pytest.approx(c * geom.perimeter(p), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(stars)
def test_slice_integral_equals_area(p):
    assert geom.vertical_slices(p).integral() == pytest.approx(geom.area(p), rel=1e-9)
