"""Steiner and circular symmetrization of polygons, and the exponential image.

Steiner symmetrization is exact on polygons: the slice profile l(t) is
piecewise linear, so its symmetrized domain {|y| < l(t)/2} is again a polygon
whose vertices sit at the slice breakpoints.  Circular symmetrization produces
curved boundaries and is returned as a polygonal approximation.
"""
from __future__ import annotations

import logging
import warnings

import numpy as np

from . import geom
from .errors import ApproximationDegraded, InvalidInput, PreconditionViolation
from .geom import Polygon

log = logging.getLogger(__name__)

PINCH_WIDTH = 1e-9
_COLLINEAR_TOL = 1e-14


def clean_ring(z: np.ndarray) -> np.ndarray:
    """Drop repeated and collinear vertices from a closed ring of points."""
    z = np.asarray(z, dtype=complex)
    if len(z) == 0:
        return z
    eps = 1e-12 * float(np.abs(z - z.mean()).max())
    for _ in range(3):
        keep = np.abs(z - np.roll(z, -1)) > eps
        z = z[keep]
        if len(z) < 3:
            return z
        d1 = z - np.roll(z, 1)
        d2 = np.roll(z, -1) - z
        cross = (d1.conj() * d2).imag
        dot = (d1.conj() * d2).real
        coll = (np.abs(cross) <= _COLLINEAR_TOL * np.abs(d1) * np.abs(d2)) & (dot > 0)
        if not coll.any():
            break
        z = z[~coll]
    return z


def polygon_from_profile(bp: np.ndarray, left: np.ndarray, right: np.ndarray) -> Polygon:
    """Polygon {(t, y): |y| < l(t)/2} for a piecewise-linear slice profile."""
    bp = np.asarray(bp, float)
    left = np.array(left, float)
    right = np.array(right, float)
    if len(bp) < 2 or not (np.any(left > 0) or np.any(right > 0)):
        raise InvalidInput("empty slice support")
    jump_tol = 1e-12 * max(left.max(), right.max())
    for arr in (left, right):
        for j in (0, -1):
            if arr[j] <= jump_tol:
                arr[j] = 0.0
    inner = slice(1, len(bp) - 1)
    left[inner] = np.maximum(left[inner], PINCH_WIDTH)
    right[inner] = np.maximum(right[inner], PINCH_WIDTH)
    pts = []
    for t, lv, rv in zip(bp, left, right):
        pts.append(complex(t, lv / 2))
        if abs(rv - lv) > jump_tol:
            pts.append(complex(t, rv / 2))
    upper = np.array(pts)
    lower = upper.conj()
    ring = np.concatenate([lower, upper[::-1]])
    return Polygon.from_complex(clean_ring(ring), check_simple=False)


def steiner_symmetrize(p: Polygon) -> Polygon:
    """Steiner symmetrization about the real axis."""
    prof = geom.vertical_slices(p)
    return polygon_from_profile(prof.breakpoints, prof.left, prof.right)


def is_steiner_symmetric(p: Polygon, tol: float = 1e-9) -> bool:
    q = steiner_symmetrize(p)
    return geom.boundary_hausdorff(p, q) <= tol * max(1.0, geom.diameter(p))


def resample_symmetric(p: Polygon, budget: int) -> Polygon:
    """Area-conserving resampling of a Steiner-symmetric polygon.

    The slice profile is sampled at ``budget // 2`` Chebyshev-spaced abscissae
    (dense near the ends of the support, where the profile is steep) and the
    slice lengths are rescaled by one common factor so the enclosed area is
    unchanged.  Polygons already within budget are returned as is.
    """
    if len(p) <= budget:
        return p
    prof = geom.vertical_slices(p)
    a, b = prof.support
    m = max(8, budget // 2)
    t = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.pi * np.arange(m) / (m - 1))
    t[0], t[-1] = a, b
    vals = prof(t)
    vals[0] = prof.right[0]
    vals[-1] = prof.left[-1]
    approx = 0.5 * ((vals[:-1] + vals[1:]) * np.diff(t)).sum()
    vals *= prof.integral() / approx
    left = vals.copy()
    right = vals.copy()
    left[0] = 0.0
    right[-1] = 0.0
    return polygon_from_profile(t, left, right)


def _polar_path(t0, a0, t1, a1, dtheta):
    """Points from (t0, a0) to (t1, a1) linear in polar coordinates, end excluded."""
    k = max(1, int(np.ceil(abs(a1 - a0) / dtheta)))
    s = np.arange(k) / k
    return (t0 + (t1 - t0) * s) * np.exp(1j * (a0 + (a1 - a0) * s))


def circular_symmetrize(p: Polygon, radial_budget: int = 512,
                        vertex_budget: int = geom.DEFAULT_VERTEX_BUDGET) -> Polygon:
    """Polygonal approximation of the circular (Polya) symmetrization.

    Radii are sampled uniformly (``radial_budget`` points) plus every vertex
    radius and every edge's closest approach to the origin, where arcs appear
    or vanish.  Between samples the boundary follows a straight line in polar
    coordinates, subdivided to angular steps of 2*pi/vertex_budget.  If a full
    circle reappears beyond a partial one the output is not simple; an
    :class:`ApproximationDegraded` warning is issued and the ring is returned
    without the simplicity check.
    """
    if radial_budget < 64:
        raise InvalidInput("radial_budget must be at least 64")
    radii = geom.radial_grid(p, radial_budget)
    prof = geom.radial_slices(p, radii)
    t, m = prof.breakpoints, prof.values.copy()
    has0 = bool(geom.contains(p, [0j])[0]) and geom.distance_to_boundary(p, [0j])[0] > 0
    two_pi = 2 * np.pi
    degraded = False
    if has0:
        # radii up to dist(0, boundary) are full circles
        rin = geom.distance_to_boundary(p, [0j])[0]
        keep = t > rin * (1 + 1e-12)
        t = np.concatenate([[rin], t[keep]])
        m = np.concatenate([[two_pi], m[keep]])
        if (m[1:] >= two_pi - 1e-12).any():
            degraded = True
    else:
        nz = np.nonzero(m > 0)[0]
        if nz.size == 0:
            raise InvalidInput("polygon has empty radial profile")
        lo = max(nz[0] - 1, 0)
        t, m = t[lo:], m[lo:]
        if (m[1:] >= two_pi - 1e-12).any():
            degraded = True
    m[1:-1] = np.maximum(m[1:-1], PINCH_WIDTH)
    for j in (0, -1):
        if m[j] <= 1e-12 * two_pi:
            m[j] = 0.0
    half = 0.5 * m
    dth = two_pi / vertex_budget

    upper = [_polar_path(t[j], half[j], t[j + 1], half[j + 1], dth) for j in range(len(t) - 1)]
    upper.append(np.array([t[-1] * np.exp(1j * half[-1])]))
    upper = np.concatenate(upper)
    lower = upper.conj()
    ring = [lower[1:]] if has0 else [lower]
    if half[-1] > 0:
        ring.append(_polar_path(t[-1], -half[-1], t[-1], half[-1], dth)[1:])
    ring.append(upper[::-1][:-1] if has0 else upper[::-1])
    if has0:
        ring.append(np.array([-t[0] + 0j]))
    elif half[0] > 0:
        ring.append(_polar_path(t[0], half[0], t[0], -half[0], dth)[1:])
    z = clean_ring(np.concatenate(ring))
    if degraded:
        warnings.warn("circular symmetrization contains full annular bands beyond a partial "
                      "arc; output may not be a simple polygon", ApproximationDegraded)
        return Polygon.from_complex(z, check_simple=False)
    return Polygon.from_complex(z)


def exp_domain(p: Polygon, boundary_budget: int = 4096, step: float = 1e-2) -> Polygon:
    """Polygonal image of the polygon under w -> exp(w).

    Requires every vertical slice to be shorter than 2*pi; otherwise the image
    wraps and :class:`PreconditionViolation` is raised.
    """
    lmax = geom.vertical_slices(p).max()
    if lmax >= 2 * np.pi:
        raise PreconditionViolation(
            f"exp_domain requires l(a) < 2*pi for every a; max slice is {lmax:.6g}")
    h = min(step, geom.perimeter(p) / boundary_budget)
    w = geom.densify(p, h)
    return Polygon.from_complex(clean_ring(np.exp(w)))
