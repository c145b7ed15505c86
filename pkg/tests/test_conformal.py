import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.special import gamma

from steinersym import conformal as cf, geom
from steinersym.conformal import ConformalMap, MeanFunctional
from steinersym.errors import InvalidInput, PreconditionViolation
from steinersym.geom import Polygon


def square_radius_oracle():
    val, _ = quad(lambda t: (1 - t ** 4) ** -0.5, 0, 1, limit=200)
    return 1 / val


@pytest.fixture(scope="module")
def sq(store, diamond):
    return store.get(diamond, 0j)


@pytest.fixture(scope="module")
def disk(store):
    return store.get(Polygon.regular(256, 1.0), 0j)


def test_square_conformal_radius(sq):
    oracle = square_radius_oracle()
    assert oracle == pytest.approx(4 * gamma(0.75) / (gamma(0.25) * gamma(0.5)), rel=1e-10)
    assert sq.fprime0 == pytest.approx(oracle, abs=1e-3)


def test_disk_polygon_radius_brackets():
    R = 2.0
    m = cf.build_map(Polygon.regular(256, R), 0j, 1e-6)
    fine = cf.build_map(Polygon.regular(1024, R), 0j, 1e-6)
    assert R * 0.999 <= m.fprime0 <= R
    assert m.fprime0 <= fine.fprime0 <= R


def test_normalization(sq, store, fixtures):
    assert sq.eval(0) == 0
    for name in ("triangle", "half_disk", "disk_translated"):
        fx = fixtures[name]
        for w0 in (0j,) + tuple(fx.alt_w0):
            m = store.fixture_map(fx, w0)
            assert m.eval(0) == w0
            d = m.deriv(0)
            assert d.real > 0 and abs(d.imag) <= 1e-12 * d.real


def test_w0_outside_rejected(diamond):
    with pytest.raises(PreconditionViolation):
        cf.build_map(diamond, 2.0)
    with pytest.raises(InvalidInput):
        cf.build_map(diamond, 0j, tol=1.0)


def test_derivative_finite_difference(store, fixtures):
    m = store.fixture_map(fixtures["L_shape"])
    rng = np.random.default_rng(7)
    z = 0.9 * np.sqrt(rng.uniform(0, 1, 100)) * np.exp(2j * np.pi * rng.uniform(0, 1, 100))
    h = 1e-5
    fd = (m.eval(z + h) - m.eval(z - h)) / (2 * h)
    d = m.deriv(z)
    assert np.max(np.abs(fd - d) / np.abs(d)) < 1e-4


def test_eval_outside_disk_rejected(sq):
    with pytest.raises(Exception):
        sq.eval(1.2)


def test_disk_coefficients():
    m = ConformalMap.linear(1.7)
    a = cf.taylor_coefficients(m, 64).a
    assert a[1] == pytest.approx(1.7, abs=1e-12)
    assert np.abs(np.delete(a, 1)).max() < 1e-8


def test_disk_polygon_coefficients_close_to_linear(disk):
    a = cf.taylor_coefficients(disk, 32).a
    assert abs(a[0]) < 1e-8
    assert np.abs(a[2:]).max() < 1e-2  # 256-fold symmetry kills low terms


def test_square_coefficient_area(sq):
    partial, tail = cf.area_from_coefficients(sq)
    assert partial + tail == pytest.approx(2.0, rel=1e-2)
    a = cf.taylor_coefficients(sq, 64).a
    n = np.arange(len(a))
    # only n = 1 mod 4 survives by the fourfold symmetry
    assert np.abs(a[(n % 4) != 1]).max() < 1e-8


def test_image_area_matches_series(sq):
    r = 0.9
    a = sq.series()
    n = np.arange(len(a))
    series = np.pi * np.sum(n * np.abs(a) ** 2 * r ** (2 * n))
    area, _ = cf.image_area(sq, r)
    assert area == pytest.approx(series, rel=1e-10)


@pytest.mark.parametrize("name", ["thin_rect", "tall_rect", "L_shape", "finger"])
def test_area_identity_crowded(store, fixtures, name):
    fx = fixtures[name]
    partial, tail = cf.area_from_coefficients(store.fixture_map(fx))
    assert partial + tail == pytest.approx(geom.area(fx.polygon), rel=1e-2)


def test_linear_means_and_norms():
    m = ConformalMap.linear(2.5)
    for p in (2.0, 3.0, 7.5, np.inf):
        assert cf.hardy_mean(m, 0.4, p).value == pytest.approx(1.0, rel=1e-12)
        N = cf.hardy_norm(m, p)
        assert N.lo == N.hi == 2.5


def test_parseval_at_p2(sq):
    r = 0.9
    a = sq.series()
    n = np.arange(len(a))
    parseval = np.sqrt(np.sum(np.abs(a) ** 2 * r ** (2 * n)))
    assert cf.hardy_mean(sq, r, 2.0).value == pytest.approx(parseval, rel=1e-6)


def test_means_monotone_in_r(sq):
    for p in (2.0, 5.0, np.inf):
        assert cf.hardy_mean(sq, 0.5, p).value <= cf.hardy_mean(sq, 0.9, p).value


def test_sup_norm_of_square(sq):
    N = cf.hardy_norm(sq, np.inf)
    assert N.mid == pytest.approx(1.0, abs=1e-3)
    assert N.lo <= 1.0 <= N.hi


def test_h2_norm_interval_contains_coefficient_value(sq):
    a = sq.series()
    coeff = np.sqrt(np.sum(np.abs(a) ** 2))
    N = cf.hardy_norm(sq, 2.0)
    assert N.lo - 1e-6 <= coeff <= N.hi + 1e-6


def test_boundary_derivative_integral(sq):
    assert cf.boundary_derivative_integral(sq) == pytest.approx(4 * np.sqrt(2), rel=1e-14)
    m = ConformalMap.linear(1.3)
    assert cf.boundary_derivative_integral(m) == pytest.approx(2 * np.pi * 1.3, rel=1e-3)
    disk = cf.build_map(Polygon.regular(256, 1.3), 0j, 1e-6)
    assert cf.boundary_derivative_integral(disk) == pytest.approx(2 * np.pi * 1.3, rel=1e-3)


@pytest.mark.parametrize("name", ["square_axis", "triangle", "half_disk"])
def test_derivative_length_limit_is_perimeter(store, fixtures, name):
    m = store.fixture_map(fixtures[name])
    L, _ = cf.derivative_length_limit(m)
    assert L == pytest.approx(cf.boundary_derivative_integral(m), rel=1e-2)


def test_plus_power_mean_of_identity():
    m = ConformalMap.linear(1.0)
    val = cf.real_part_mean(m, 0.5, MeanFunctional("plus-power", 2.0)).value
    # (1/2pi) int (0.5 cos t)_+^2 dt = 0.25 * 1/4
    assert val == pytest.approx(0.0625, rel=1e-8)


def test_exp0_is_one(sq):
    assert cf.real_part_mean(sq, 0.7, MeanFunctional("exp", 0.0)).value == pytest.approx(1.0)


def test_exp_mean_self_convergent(sq):
    r = 0.9
    phi = MeanFunctional("exp", 1.0)
    v = cf.real_part_mean(sq, r, phi)
    k = v.nodes
    fine = np.exp(sq.circle_values(r, 2 * k).real).mean()
    assert abs(fine - v.value) / v.value < 1e-8


def test_mean_functional_guards():
    with pytest.raises(InvalidInput):
        MeanFunctional("plus-power", 0.5)
    with pytest.raises(InvalidInput):
        MeanFunctional("entire-series", 1.0, [-1.0])
    with pytest.raises(InvalidInput):
        MeanFunctional("cosh")


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["exp", "plus-power", "exp-plus-power"]), st.floats(1, 4),
       st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 1))
def test_mean_functionals_convex_nondecreasing(kind, p, x, y, lam):
    phi = MeanFunctional(kind, p)
    lo, hi = min(x, y), max(x, y)
    assert phi(lo) <= phi(hi) + 1e-12
    mid = lam * x + (1 - lam) * y
    assert phi(mid) <= lam * phi(x) + (1 - lam) * phi(y) + 1e-9 * (1 + abs(phi(x)) + abs(phi(y)))


def test_moebius_identity(sq):
    assert cf.poisson_mass(0.5) == pytest.approx(2 * np.pi, rel=1e-8)
    assert cf.moebius_identity_check(sq, 0j, 2.0) < 1e-10
    assert cf.moebius_identity_check(sq, 0.3, 2.0) < 1e-4


def test_map_round_trip(tmp_path, sq):
    path = tmp_path / "sq.json"
    sq.save(path)
    back = ConformalMap.load(path)
    z = np.array([0.1 + 0.2j, -0.5j, 0.7])
    assert np.array_equal(back.eval(z), sq.eval(z))
    d = json.loads(path.read_text())
    assert d["format"] == cf.CACHE_FORMAT


def test_store_cache_reuse(tmp_path, diamond):
    from steinersym.verify import MapStore
    a = MapStore(1e-4, tmp_path)
    m1 = a.get(diamond)
    b = MapStore(1e-4, tmp_path)
    m2 = b.get(diamond)
    assert a.built == 1 and b.built == 0
    assert m2.fprime0 == m1.fprime0


@settings(max_examples=6, deadline=None)
@given(st.floats(0.3, 4.0))
def test_scaling_covariance(diamond, c):
    m = cf.build_map(diamond, 0j, 1e-6)
    mc = cf.build_map(geom.scale(diamond, c), 0j, 1e-6)
    assert mc.fprime0 == pytest.approx(c * m.fprime0, rel=1e-6)
