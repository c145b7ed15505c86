"""Computational geometry on Jordan polygons.

A :class:`Polygon` is an immutable, counterclockwise, simple polygon.  All
measures here are exact up to floating point, except
:func:`boundary_hausdorff` which works on a densified boundary.
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.spatial import ConvexHull

from .errors import InvalidInput

log = logging.getLogger(__name__)

#: default vertex budget for polygonal approximations of curved boundaries
DEFAULT_VERTEX_BUDGET = 512
#: Hausdorff densification step, as a fraction of the larger diameter
HAUSDORFF_STEP = 1e-3


def _as_points(vertices) -> np.ndarray:
    arr = np.asarray(vertices)
    if np.iscomplexobj(arr):
        arr = np.column_stack([arr.real, arr.imag])
    arr = np.array(arr, dtype=float, copy=True)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInput(f"expected an (n, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("polygon vertices must be finite")
    return arr


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def self_intersections(pts: np.ndarray, limit: int = 1) -> list[tuple[int, int]]:
    """Return up to ``limit`` pairs of edge indices that intersect illegally.

    Edge ``i`` joins vertex ``i`` to vertex ``i+1``.  Adjacent edges may only
    share their common vertex; any other contact counts as an intersection.
    """
    n = len(pts)
    a = pts
    b = np.roll(pts, -1, axis=0)
    found: list[tuple[int, int]] = []
    # adjacent edges folding back onto each other
    d1 = b - a
    d2 = np.roll(d1, -1, axis=0)
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    dot = (d1 * d2).sum(axis=1)
    for i in np.nonzero((cross == 0) & (dot < 0))[0]:
        found.append((int(i), int((i + 1) % n)))
        if len(found) >= limit:
            return found

    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    chunk = max(1, 4_000_000 // max(n, 1))
    for start in range(0, n, chunk):
        i = np.arange(start, min(n, start + chunk))[:, None]
        j = np.arange(n)[None, :]
        # only j > i + 1, and skip the wrap-around neighbour pair (0, n-1)
        mask = (j > i + 1) & ~((i == 0) & (j == n - 1))
        # bounding-box rejection
        mask &= (lo[i, 0] <= hi[j, 0]) & (lo[j, 0] <= hi[i, 0])
        mask &= (lo[i, 1] <= hi[j, 1]) & (lo[j, 1] <= hi[i, 1])
        ii, jj = np.nonzero(mask)
        if ii.size == 0:
            continue
        ii = ii + start
        p1, p2, q1, q2 = a[ii], b[ii], a[jj], b[jj]
        o1 = _orient(p1[:, 0], p1[:, 1], p2[:, 0], p2[:, 1], q1[:, 0], q1[:, 1])
        o2 = _orient(p1[:, 0], p1[:, 1], p2[:, 0], p2[:, 1], q2[:, 0], q2[:, 1])
        o3 = _orient(q1[:, 0], q1[:, 1], q2[:, 0], q2[:, 1], p1[:, 0], p1[:, 1])
        o4 = _orient(q1[:, 0], q1[:, 1], q2[:, 0], q2[:, 1], p2[:, 0], p2[:, 1])
        hit = (np.sign(o1) * np.sign(o2) <= 0) & (np.sign(o3) * np.sign(o4) <= 0)
        # collinear pairs need an explicit overlap test (bbox already overlaps)
        coll = (o1 == 0) & (o2 == 0)
        hit &= ~coll | _collinear_overlap(p1, p2, q1, q2)
        for k in np.nonzero(hit)[0]:
            found.append((int(ii[k]), int(jj[k])))
            if len(found) >= limit:
                return found
    return found


def _collinear_overlap(p1, p2, q1, q2):
    d = p2 - p1
    t1 = ((q1 - p1) * d).sum(axis=1)
    t2 = ((q2 - p1) * d).sum(axis=1)
    L = (d * d).sum(axis=1)
    return (np.maximum(t1, t2) >= 0) & (np.minimum(t1, t2) <= L)


class Polygon:
    """Counterclockwise simple polygon; the closing edge is implicit.

    Clockwise input is reversed (and logged).  A repeated closing vertex is
    dropped.  Construction raises :class:`InvalidInput` for fewer than three
    vertices, repeated consecutive vertices, zero area or self-intersections.
    """

    __slots__ = ("_v", "_hash")

    def __init__(self, vertices, *, check_simple: bool = True):
        pts = _as_points(vertices)
        if len(pts) >= 2 and np.array_equal(pts[0], pts[-1]):
            pts = pts[:-1]
        if len(pts) < 3:
            raise InvalidInput("a polygon needs at least 3 vertices")
        if np.any(np.all(pts == np.roll(pts, -1, axis=0), axis=1)):
            raise InvalidInput("consecutive vertices must be distinct")
        sa = _signed_area(pts)
        if sa == 0 or not np.isfinite(sa):
            raise InvalidInput("degenerate polygon (zero area)")
        if sa < 0:
            log.info("reversing clockwise polygon with %d vertices", len(pts))
            pts = pts[::-1].copy()
        if check_simple:
            bad = self_intersections(pts)
            if bad:
                raise InvalidInput(f"polygon is not simple: edges {bad[0]} intersect")
        pts.flags.writeable = False
        self._v = pts
        self._hash = None

    # construction helpers -------------------------------------------------
    @classmethod
    def from_complex(cls, z, **kw) -> "Polygon":
        z = np.asarray(z, dtype=complex)
        return cls(np.column_stack([z.real, z.imag]), **kw)

    @classmethod
    def regular(cls, n: int, radius: float = 1.0, center: complex = 0.0, phase: float = 0.0) -> "Polygon":
        t = phase + 2 * np.pi * np.arange(n) / n
        return cls.from_complex(center + radius * np.exp(1j * t), check_simple=False)

    @classmethod
    def rectangle(cls, x0, y0, x1, y1) -> "Polygon":
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    # accessors -------------------------------------------------------------
    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def z(self) -> np.ndarray:
        return self._v[:, 0] + 1j * self._v[:, 1]

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self._v, np.roll(self._v, -1, axis=0)

    def __len__(self) -> int:
        return len(self._v)

    def __repr__(self) -> str:
        return f"Polygon(n={len(self)}, area={area(self):.6g})"

    def digest(self) -> str:
        """Stable content hash (sha256 of the vertex bytes)."""
        if self._hash is None:
            self._hash = hashlib.sha256(np.ascontiguousarray(self._v).tobytes()).hexdigest()
        return self._hash

    def to_json(self) -> str:
        return json.dumps([[float(x), float(y)] for x, y in self._v])

    @classmethod
    def from_json(cls, text: str) -> "Polygon":
        data = json.loads(text)
        if not isinstance(data, list):
            raise InvalidInput("polygon JSON must be an array of [x, y] pairs")
        return cls(data)


# measures ------------------------------------------------------------------

def area(p: Polygon) -> float:
    a = _signed_area(p.vertices)
    if a <= 0:
        raise InvalidInput("degenerate polygon")
    return a


def perimeter(p: Polygon) -> float:
    a, b = p.edges
    return float(np.hypot(*(b - a).T).sum())


def diameter(p: Polygon) -> float:
    pts = p.vertices
    if len(pts) > 8:
        try:
            pts = pts[ConvexHull(pts).vertices]
        except Exception:  # collinear or tiny input, fall back to all vertices
            pass
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d * d).sum(axis=2).max()))


def centroid(p: Polygon) -> complex:
    x, y = p.vertices.T
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    c = x * yn - xn * y
    A = 0.5 * c.sum()
    return complex(((x + xn) * c).sum() / (6 * A), ((y + yn) * c).sum() / (6 * A))


# transforms ------------------------------------------------------------------

def rotate(p: Polygon, phi: float) -> Polygon:
    return Polygon.from_complex(p.z * np.exp(1j * phi), check_simple=False)


def scale(p: Polygon, c: float) -> Polygon:
    if not c > 0:
        raise InvalidInput(f"scale factor must be positive, got {c}")
    return Polygon(p.vertices * c, check_simple=False)


def translate(p: Polygon, shift: complex) -> Polygon:
    return Polygon.from_complex(p.z + shift, check_simple=False)


# point queries ---------------------------------------------------------------

def contains(p: Polygon, points) -> np.ndarray:
    """Even-odd point-in-polygon test for an array of complex points.

    Points on the boundary give an unspecified answer.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    x, y = pts.real[:, None], pts.imag[:, None]
    a, b = p.edges
    ax, ay, bx, by = a[:, 0], a[:, 1], b[:, 0], b[:, 1]
    inside = np.zeros(pts.shape, dtype=bool)
    chunk = max(1, 2_000_000 // len(a))
    for s in range(0, len(pts), chunk):
        xs, ys = x[s:s + chunk], y[s:s + chunk]
        straddle = (ay > ys) != (by > ys)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = ax + (ys - ay) * (bx - ax) / (by - ay)
        crossings = (straddle & (xs < xint)).sum(axis=1)
        inside[s:s + chunk] = crossings % 2 == 1
    return inside


def distance_to_boundary(p: Polygon, points) -> np.ndarray:
    pts = np.atleast_1d(np.asarray(points, dtype=complex))
    a, b = p.edges
    az = a[:, 0] + 1j * a[:, 1]
    bz = b[:, 0] + 1j * b[:, 1]
    return _point_segment_distance(pts, az, bz)


def _point_segment_distance(pts, az, bz):
    d = bz - az
    L2 = np.abs(d) ** 2
    out = np.empty(len(pts))
    chunk = max(1, 4_000_000 // len(az))
    for s in range(0, len(pts), chunk):
        w = pts[s:s + chunk, None] - az[None, :]
        t = np.clip((w * d.conj()).real / L2, 0.0, 1.0)
        out[s:s + chunk] = np.abs(w - t * d).min(axis=1)
    return out


def densify(p: Polygon, max_step: float) -> np.ndarray:
    """Boundary points (complex) with consecutive spacing at most ``max_step``."""
    az = p.z
    bz = np.roll(az, -1)
    counts = np.maximum(1, np.ceil(np.abs(bz - az) / max_step).astype(int))
    out = [az[i] + (bz[i] - az[i]) * np.arange(k) / k for i, k in enumerate(counts)]
    return np.concatenate(out)


def boundary_hausdorff(a: Polygon, b: Polygon, step: float | None = None) -> float:
    """Symmetric Hausdorff distance between the two boundary curves.

    Each boundary is densified with spacing ``HAUSDORFF_STEP`` times the larger
    diameter and distances are taken from sample points to the other boundary's
    segments, so the sampling error is at most half a step.
    """
    if step is None:
        step = HAUSDORFF_STEP * max(diameter(a), diameter(b))
    da = distance_to_boundary(b, densify(a, step)).max()
    db = distance_to_boundary(a, densify(b, step)).max()
    return float(max(da, db))


# slices ----------------------------------------------------------------------

@dataclass(frozen=True)
class SliceProfile:
    """Slice measure as a function of abscissa (vertical) or radius (angular).

    For the vertical kind the profile is piecewise linear with possible jumps
    at breakpoints (vertical edges); ``left`` and ``right`` hold the one-sided
    limits.  For the angular kind both arrays hold the sampled values.
    """

    kind: str
    breakpoints: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return 0.5 * (self.left + self.right)

    @property
    def support(self) -> tuple[float, float]:
        return float(self.breakpoints[0]), float(self.breakpoints[-1])

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        bp = self.breakpoints
        if self.kind != "vertical-length":
            return np.interp(t, bp, self.values, left=0.0, right=0.0)
        k = np.clip(np.searchsorted(bp, t, side="right") - 1, 0, len(bp) - 2)
        h = bp[k + 1] - bp[k]
        s = np.where(h > 0, (t - bp[k]) / np.where(h > 0, h, 1), 0.0)
        val = self.right[k] + s * (self.left[k + 1] - self.right[k])
        val = np.where((t < bp[0]) | (t > bp[-1]), 0.0, val)
        exact = np.searchsorted(bp, t)
        hit = (exact < len(bp)) & (bp[np.minimum(exact, len(bp) - 1)] == t)
        return np.where(hit, self.values[np.minimum(exact, len(bp) - 1)], val)

    def integral(self) -> float:
        """Area enclosed: trapezoid rule (exact for the vertical kind)."""
        bp = self.breakpoints
        if self.kind == "vertical-length":
            return float(0.5 * ((self.right[:-1] + self.left[1:]) * np.diff(bp)).sum())
        g = bp * self.values
        return float(0.5 * ((g[:-1] + g[1:]) * np.diff(bp)).sum())

    def max(self) -> float:
        return float(max(self.left.max(), self.right.max()))


def vertical_slices(p: Polygon, merge_tol: float = 1e-12) -> SliceProfile:
    """Exact slice-length profile l(t) of the polygon's vertical sections."""
    a, b = p.edges
    bp = np.unique(p.vertices[:, 0])
    # abscissae equal up to rounding (mirror-image vertices) count as one
    width = bp[-1] - bp[0]
    if len(bp) > 2:
        close = np.diff(bp) <= merge_tol * width
        if close.any():
            groups = np.concatenate([[0], np.cumsum(~close)])
            bp = np.bincount(groups, bp) / np.bincount(groups)
            bp[0], bp[-1] = p.vertices[:, 0].min(), p.vertices[:, 0].max()
    x0, x1 = a[:, 0], b[:, 0]
    dx = x1 - x0
    moving = dx != 0
    # upper boundary edges run leftwards (+y), lower ones rightwards (-y)
    sgn = np.where(dx < 0, 1.0, -1.0)[moving]
    ex0, ey0, ex1, ey1 = x0[moving], a[moving, 1], x1[moving], b[moving, 1]
    lo, hi = np.minimum(ex0, ex1), np.maximum(ex0, ex1)
    slope = (ey1 - ey0) / (ex1 - ex0)

    t0, t1 = bp[:-1], bp[1:]
    tm = 0.5 * (t0 + t1)
    spans = (lo[None, :] < tm[:, None]) & (hi[None, :] > tm[:, None])
    y_at = lambda t: ey0[None, :] + slope[None, :] * (t[:, None] - ex0[None, :])
    right = np.where(spans, sgn * y_at(t0), 0.0).sum(axis=1)
    left = np.where(spans, sgn * y_at(t1), 0.0).sum(axis=1)
    right = np.maximum(right, 0.0)
    left = np.maximum(left, 0.0)
    L = np.concatenate([[0.0], left])
    R = np.concatenate([right, [0.0]])
    return SliceProfile("vertical-length", bp, L, R)


def edge_min_radii(p: Polygon) -> np.ndarray:
    """Distance from the origin to each edge (closest point on the segment)."""
    az = p.z
    d = np.roll(az, -1) - az
    s = np.clip((-az * d.conj()).real / np.abs(d) ** 2, 0.0, 1.0)
    return np.abs(az + s * d)


def angular_measure(p: Polygon, t: float) -> float:
    """Measure of {theta : t e^{i theta} inside p} by exact circle clipping."""
    if t <= 0:
        return 2 * np.pi if bool(contains(p, [0j])[0]) else 0.0
    az = p.z
    bz = np.roll(az, -1)
    d = bz - az
    # |a + s d|^2 = t^2  ->  |d|^2 s^2 + 2 Re(a conj d) s + |a|^2 - t^2 = 0
    A = np.abs(d) ** 2
    B = 2 * (az * d.conj()).real
    C = np.abs(az) ** 2 - t * t
    disc = B * B - 4 * A * C
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    angles = []
    for sgn in (-1.0, 1.0):
        s = (-B + sgn * sq) / (2 * A)
        # closed range: a crossing through a vertex must not be lost to rounding;
        # near-duplicate angles only create negligible extra gaps
        m = ok & (s >= -1e-12) & (s <= 1 + 1e-12)
        angles.append(np.angle(az[m] + s[m] * d[m]))
    ang = np.sort(np.mod(np.concatenate(angles), 2 * np.pi))
    if ang.size == 0:
        inside = bool(contains(p, [complex(t, 0.0)])[0])
        return 2 * np.pi if inside else 0.0
    ang = np.unique(ang)
    nxt = np.concatenate([ang[1:], [ang[0] + 2 * np.pi]])
    gaps = nxt - ang
    keep = gaps > 0
    # two probes per gap: a single midpoint can land on a tangency point
    mids = t * np.exp(1j * (ang + 0.5 * gaps))
    alts = t * np.exp(1j * (ang + 0.381966 * gaps))
    inside = contains(p, mids) | contains(p, alts)
    return float(gaps[keep & inside].sum())


def radial_slices(p: Polygon, radii: Iterable[float]) -> SliceProfile:
    """Angular measure |D(t)| of the circle sections at the given radii."""
    r = np.sort(np.asarray(list(radii), dtype=float))
    vals = np.array([angular_measure(p, t) for t in r])
    vals = np.clip(vals, 0.0, 2 * np.pi)
    return SliceProfile("angular-measure", r, vals, vals)


def radial_grid(p: Polygon, budget: int, margin: float = 0.0) -> np.ndarray:
    """Uniform radius grid plus every radius where |D(t)| can kink."""
    rv = np.abs(p.z)
    re = edge_min_radii(p)
    rmin = min(rv.min(), re.min())
    rmax = rv.max()
    lo = max(0.0, rmin - margin)
    grid = np.linspace(lo, rmax + margin, budget)
    r = np.unique(np.concatenate([grid, rv, re]))
    # radii equal up to rounding (e.g. congruent edges) are merged
    keep = np.concatenate([[True], np.diff(r) > 1e-12 * r[-1]])
    return r[keep]
