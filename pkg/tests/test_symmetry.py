import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steinersym import geom, symmetry, verify
from steinersym.errors import PreconditionViolation
from steinersym.geom import Polygon

from shapes import random_star, stars


def same_set(a: Polygon, b: Polygon, tol=1e-12):
    return geom.boundary_hausdorff(a, b) < tol or geom.boundary_hausdorff(a, b) == 0.0


def test_rectangle_recentred():
    S = symmetry.steiner_symmetrize(Polygon.rectangle(0, 0, 2, 1))
    want = Polygon.rectangle(0, -0.5, 2, 0.5)
    assert geom.boundary_hausdorff(S, want) < 1e-12
    assert geom.area(S) == pytest.approx(2.0, rel=1e-14)


def test_triangle_becomes_rhombus_half():
    S = symmetry.steiner_symmetrize(Polygon([(0, 0), (1, 0), (0, 1)]))
    want = Polygon([(0, -0.5), (1, 0), (0, 0.5)])
    assert geom.boundary_hausdorff(S, want) < 1e-12


@pytest.mark.parametrize("name", ["disk256", "square_diag", "square_axis", "rect_2x1"])
def test_symmetric_fixture_is_fixed_point(fixtures, name):
    p = fixtures[name].polygon
    S = symmetry.steiner_symmetrize(p)
    assert geom.boundary_hausdorff(S, p) < 1e-12
    assert symmetry.is_steiner_symmetric(S)


def test_corpus_exactness(fixtures):
    for fx in fixtures.values():
        p = fx.polygon
        S = symmetry.steiner_symmetrize(p)
        assert abs(geom.area(S) - geom.area(p)) <= 1e-9 * geom.area(p), fx.name
        assert geom.perimeter(S) <= geom.perimeter(p) + 1e-9, fx.name
        assert geom.diameter(S) <= geom.diameter(p) + 1e-9, fx.name


def test_circular_disk_fixed():
    d = Polygon.regular(256, 1.0)
    C = symmetry.circular_symmetrize(d)
    assert geom.boundary_hausdorff(C, d) < 2e-2


def test_circular_half_disk_rotates_to_right_half():
    t = np.linspace(0, np.pi, 257)
    half = Polygon.from_complex(np.exp(1j * t))
    C = symmetry.circular_symmetrize(half)
    right = Polygon.from_complex(np.exp(1j * (t - np.pi / 2)))
    assert geom.boundary_hausdorff(C, right) < 2e-2


def test_circular_square_area_within_one_percent():
    sq = Polygon.rectangle(-1, -1, 1, 1)
    C = symmetry.circular_symmetrize(sq, 512)
    assert abs(geom.area(C) - 4) / 4 < 1e-2


def test_circular_rectangle_perimeter_not_inflated():
    # regression: arcs through vertices and tangencies once inflated this to 6.76
    r = Polygon.rectangle(-1, -0.5, 1, 0.5)
    C = symmetry.circular_symmetrize(r, 128, 128)
    assert geom.perimeter(C) <= 6.0


def test_exp_of_rectangle_is_annular_sector():
    E = symmetry.exp_domain(Polygon.rectangle(0, -1, 1, 1))
    t = np.linspace(-1, 1, 400)
    ring = np.concatenate([np.exp(1j * t), np.e * np.exp(1j * t[::-1])])
    want = Polygon.from_complex(ring)
    assert geom.boundary_hausdorff(E, want) < 1e-2


def test_exp_of_offaxis_rectangle():
    E = symmetry.exp_domain(Polygon.rectangle(0, 2, 1, 4))
    z = E.z
    ang = np.mod(np.angle(z), 2 * np.pi)
    assert ang.min() == pytest.approx(2.0, abs=1e-9)
    assert ang.max() == pytest.approx(4.0, abs=1e-9)
    assert np.abs(z).max() == pytest.approx(np.e, rel=1e-9)
    assert np.abs(z).min() == pytest.approx(1.0, rel=1e-9)


def test_exp_rejects_tall_rectangle():
    with pytest.raises(PreconditionViolation):
        symmetry.exp_domain(Polygon.rectangle(0, 0, 1, 2 * np.pi + 0.1))


@settings(max_examples=40, deadline=None)
@given(stars)
def test_steiner_invariants(p):
    S = symmetry.steiner_symmetrize(p)
    assert abs(geom.area(S) - geom.area(p)) <= 1e-9 * geom.area(p)
    assert geom.perimeter(S) <= geom.perimeter(p) + 1e-9
    assert geom.diameter(S) <= geom.diameter(p) + 1e-9
    assert symmetry.is_steiner_symmetric(S)


@settings(max_examples=25, deadline=None)
@given(stars)
def test_steiner_idempotent(p):
    S = symmetry.steiner_symmetrize(p)
    assert geom.boundary_hausdorff(symmetry.steiner_symmetrize(S), S) < 1e-9


@settings(max_examples=25, deadline=None)
@given(stars, st.floats(-3, 3))
def test_steiner_commutes_with_horizontal_translation(p, dx):
    a = symmetry.steiner_symmetrize(geom.translate(p, dx))
    b = geom.translate(symmetry.steiner_symmetrize(p), dx)
    assert geom.boundary_hausdorff(a, b) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(5, 20))
def test_circular_area_and_perimeter(seed, n):
    p = random_star(seed, n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        C = symmetry.circular_symmetrize(p, 256, 256)
    assert abs(geom.area(C) - geom.area(p)) <= 2e-2 * geom.area(p)
    sag = geom.diameter(p) * (1 - np.cos(np.pi / 256))
    assert geom.perimeter(C) <= geom.perimeter(p) * (1 + 1e-2) + sag
