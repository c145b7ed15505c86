"""Conformal maps of the unit disk onto polygons and integral functionals of them.

Maps are Schwarz-Christoffel maps normalized by f(0) = w0 and f'(0) > 0.
Point values come from path quadrature; circle means use a Taylor series
obtained once per map by FFT of the closed-form derivative.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from . import geom, sc
from .errors import (CoefficientPrecisionFailure, ConstructionFailure, EvaluationOutOfRange,
                     InvalidInput, PrecisionFailure, PreconditionViolation)
from .geom import Polygon

log = logging.getLogger(__name__)

CACHE_FORMAT = "steinersym-map"
CACHE_VERSION = 1
BOUNDARY_SAMPLES = 4096
SERIES_SAMPLES = 2 ** 17
MAX_RADIUS = 0.999
EVAL_LIMIT = 1 - 1e-6
RICHARDSON_RADII = (0.99, 0.995, 0.999)


@dataclass(frozen=True)
class MeanResult:
    value: float
    error: float
    nodes: int
    log_value: float | None = None

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class NormInterval:
    lo: float
    hi: float
    mid: float
    spread: float
    wide: bool
    samples: tuple = ()

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


class ConformalMap:
    """f(z) = w0 + C int_0^z prod (1 - t/z_k)^beta_k dt with C > 0.

    With no prevertices the map is the dilation z -> w0 + C z.
    """

    def __init__(self, target: Polygon, w0: complex, C: float, theta, beta,
                 eps_b: float = 0.0, diagnostics: dict | None = None):
        self.target = target
        self.w0 = complex(w0)
        self.C = float(C)
        self.theta = np.asarray(theta, float)
        self.beta = np.asarray(beta, float)
        self.zv = np.exp(1j * self.theta)
        self.eps_b = float(eps_b)
        self.diagnostics = dict(diagnostics or {})
        self._series = None

    @classmethod
    def linear(cls, R: float, w0: complex = 0j, n: int = 256) -> "ConformalMap":
        """The dilation z -> w0 + R z, with a regular n-gon standing in for its image."""
        if R <= 0:
            raise InvalidInput("R must be positive")
        target = Polygon.regular(n, R, center=w0)
        eps = R * (1 - np.cos(np.pi / n))
        return cls(target, w0, R, [], [], eps_b=eps, diagnostics={"kind": "linear"})

    @property
    def is_linear(self) -> bool:
        return len(self.theta) == 0

    @property
    def fprime0(self) -> float:
        return self.C

    def __repr__(self):
        return (f"ConformalMap(n={len(self.theta)}, w0={self.w0:.6g}, "
                f"f'(0)={self.C:.10g}, eps_b={self.eps_b:.2e})")

    # --- point evaluation -------------------------------------------------
    def _check(self, z, limit=EVAL_LIMIT):
        z = np.asarray(z, complex)
        if np.any(np.abs(z) > limit):
            raise EvaluationOutOfRange(f"|z| must not exceed {limit}")
        return z

    def eval(self, z):
        z = self._check(z)
        return self._eval(z)

    def _eval(self, z):
        shape = np.shape(z)
        flat = np.atleast_1d(z).ravel()
        if self.is_linear:
            out = self.w0 + self.C * flat
        else:
            out = self.w0 + self.C * sc.integrate_from_zero(self.zv, self.beta, flat)
        return out.reshape(shape) if shape else out[0]

    def deriv(self, z):
        z = self._check(z)
        if self.is_linear:
            return np.full(np.shape(z), self.C, complex) if np.ndim(z) else complex(self.C)
        return self.C * np.exp(sc.log_integrand(z, self.zv, self.beta))

    def boundary_points(self, m: int = BOUNDARY_SAMPLES):
        """f on the unit circle at m equally spaced angles (integrated from the prevertices)."""
        t = 2 * np.pi * np.arange(m) / m
        if self.is_linear:
            return self.w0 + self.C * np.exp(1j * t)
        return self._boundary_at(t)

    def _boundary_at(self, t):
        t = np.mod(np.asarray(t, float), 2 * np.pi)
        z = np.exp(1j * t)
        k = np.searchsorted(self.theta, t, side="right") - 1
        k = np.mod(k, len(self.theta))
        vimg = self.vertex_images()
        on = np.abs(z - self.zv[k]) < 1e-15
        out = vimg[k].astype(complex)
        idx = np.nonzero(~on)[0]
        if idx.size:
            vals = sc.integrate_paths(self.zv, self.beta, self.zv[k[idx]], k[idx], z[idx],
                                      np.full(idx.size, -1))
            out[idx] = vimg[k[idx]] + self.C * vals
        return out

    def vertex_images(self):
        if "_vimg" not in self.__dict__:
            self._vimg = self.w0 + self.C * sc.integrate_from_zero(self.zv, self.beta, self.zv)
        return self._vimg

    # --- Taylor series ----------------------------------------------------
    def _derivative_on_circle(self, rho, m):
        z = rho * np.exp(2j * np.pi * np.arange(m) / m)
        if self.is_linear:
            return np.full(m, self.C, complex)
        return self.C * np.exp(sc.log_integrand(z, self.zv, self.beta))

    def series(self) -> np.ndarray:
        """Taylor coefficients a_0..a_K, K = SERIES_SAMPLES/2, enough for |z| <= 0.999."""
        if self._series is None:
            if self.is_linear:
                a = np.zeros(2, complex)
                a[0], a[1] = self.w0, self.C
            else:
                n = SERIES_SAMPLES
                rho = 1 - 32.0 / n
                c = np.fft.fft(self._derivative_on_circle(rho, n)) / n
                k = n // 2
                m = np.arange(k)
                with np.errstate(under="ignore"):
                    a = np.empty(k + 1, complex)
                    a[0] = self.w0
                    a[1:] = c[:k] / ((m + 1) * rho ** m.astype(float))
            self._series = a
        return self._series

    def circle_values(self, r: float, m: int) -> np.ndarray:
        """f(r e^{2 pi i j/m}), j < m, summed exactly from the series by folding."""
        a = self.series()
        n = np.arange(len(a))
        with np.errstate(under="ignore"):
            b = a * r ** n.astype(float)
        folded = np.zeros(m, complex)
        np.add.at(folded, n % m, b)
        return np.fft.ifft(folded) * m

    # --- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "format": CACHE_FORMAT,
            "version": CACHE_VERSION,
            "polygon_sha256": self.target.digest(),
            "polygon": json.loads(self.target.to_json()),
            "w0": [self.w0.real, self.w0.imag],
            "C": self.C,
            "theta": self.theta.tolist(),
            "beta": self.beta.tolist(),
            "eps_b": self.eps_b,
            "tol": self.diagnostics.get("tol"),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConformalMap":
        if d.get("format") != CACHE_FORMAT or d.get("version") != CACHE_VERSION:
            raise InvalidInput("unrecognized map cache header")
        target = Polygon.from_json(json.dumps(d["polygon"]))
        if target.digest() != d["polygon_sha256"]:
            raise InvalidInput("map cache polygon hash mismatch")
        return cls(target, complex(*d["w0"]), d["C"], d["theta"], d["beta"], d["eps_b"],
                   {"tol": d.get("tol"), "source": "cache"})

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "ConformalMap":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _strip_straight(w: np.ndarray) -> np.ndarray:
    beta = sc.turning_exponents(w)
    return w[np.abs(beta) > 1e-10]


def boundary_check(m: ConformalMap, samples: int = BOUNDARY_SAMPLES):
    """(max distance of boundary images to the target boundary, ordering ok)."""
    pts = m.boundary_points(samples)
    v = m.target.z
    err_v = float(np.abs(m.vertex_images() - v[m.diagnostics["vertex_index"]]).max()) \
        if not m.is_linear else 0.0
    dist = geom.distance_to_boundary(m.target, pts)
    # arclength parameter of the nearest boundary point must advance once around
    s = _arclength_param(m.target, pts)
    P = geom.perimeter(m.target)
    step = np.mod(np.diff(np.concatenate([s, s[:1]])), P)
    ordered = bool(np.all(step < 0.5 * P)) and abs(step.sum() - P) < 1e-6 * P
    return max(err_v, float(dist.max())), ordered


def _arclength_param(p: Polygon, pts):
    z = p.z
    a = z
    d = np.roll(z, -1) - z
    L = np.abs(d)
    cum = np.concatenate([[0.0], np.cumsum(L)[:-1]])
    best = np.full(len(pts), np.inf)
    out = np.zeros(len(pts))
    for k in range(len(z)):
        t = np.clip(((pts - a[k]) * np.conj(d[k])).real / L[k] ** 2, 0, 1)
        dist = np.abs(pts - (a[k] + t * d[k]))
        better = dist < best
        best[better] = dist[better]
        out[better] = cum[k] + t[better] * L[k]
    return out


def build_map(target: Polygon, w0: complex = 0j, tol: float = 1e-4) -> ConformalMap:
    """Conformal map of the unit disk onto ``target`` with f(0) = w0, f'(0) > 0."""
    if not (1e-8 <= tol <= 1e-2):
        raise InvalidInput("tol must lie in [1e-8, 1e-2]")
    w0 = complex(w0)
    if not geom.contains(target, [w0])[0] or geom.distance_to_boundary(target, [w0])[0] <= 0:
        raise PreconditionViolation("w0 must lie strictly inside the target polygon")
    w_full = target.z
    beta_full = sc.turning_exponents(w_full)
    keep = np.nonzero(np.abs(beta_full) > 1e-10)[0]
    w = w_full[keep]
    theta, C, beta, info = sc.solve(w, w0, tol=min(1e-8, 1e-3 * tol))
    rot = np.angle(C)
    theta = np.mod(theta + rot, 2 * np.pi)
    order = np.argsort(theta, kind="stable")
    # rotating the disk variable keeps the vertex order cyclic; re-sort to start low
    theta, beta, keep = theta[order], beta[order], keep[order]
    diag = {"tol": tol, "residual": info["residual"], "evals": info["evals"],
            "solver": info["methods"], "vertex_index": keep}
    m = ConformalMap(target, w0, abs(C), theta, beta, 0.0, diag)
    eps, ordered = boundary_check(m)
    m.eps_b = eps
    m.diagnostics.update(eps_b=eps, ordered=ordered)
    if not np.isfinite(eps) or eps > tol or not ordered:
        raise ConstructionFailure(
            f"map construction reached eps_b={eps:.3g} (tol {tol:.1g}), ordered={ordered}",
            m.diagnostics)
    return m


# --- coefficients ---------------------------------------------------------

@dataclass(frozen=True)
class Coefficients:
    a: np.ndarray
    error: np.ndarray
    rho: float
    samples: int


def _coefficients_at(m: ConformalMap, N: int, rho: float, samples: int) -> Coefficients:
    d = m._derivative_on_circle(rho, samples)
    c = np.fft.fft(d) / samples
    n = np.arange(1, N + 1)
    a = np.empty(N + 1, complex)
    a[0] = m.w0
    a[1:] = c[:N] / (n * rho ** (n - 1.0))
    # aliasing level read off the top half of the band, plus rounding
    top = np.abs(c[samples // 4: samples // 2]).max() if samples >= 8 else 0.0
    err = np.empty(N + 1)
    err[0] = 0.0
    err[1:] = (2 * top + 1e-14 * np.abs(d).max()) / (n * rho ** (n - 1.0))
    return Coefficients(a, err, rho, samples)


def taylor_coefficients(m: ConformalMap, N: int = 256, rho: float = 0.9,
                        samples: int | None = None) -> Coefficients:
    """a_0..a_N from samples of f' on |z| = rho, cross-checked at rho - 0.05."""
    if not (0.5 <= rho <= MAX_RADIUS):
        raise InvalidInput("rho must lie in [0.5, 0.999]")
    samples = samples or max(4 * N, 4096)
    if N > samples // 4:
        raise InvalidInput("N must not exceed samples/4")
    first = _coefficients_at(m, N, rho, samples)
    second = _coefficients_at(m, N, rho - 0.05, samples)
    gap = np.abs(first.a - second.a)
    bound = first.error + second.error + 1e-13 * max(1.0, abs(m.C))
    if np.any(gap > bound):
        k = int(np.argmax(gap - bound))
        raise CoefficientPrecisionFailure(
            f"a_{k} differs by {gap[k]:.3g} between radii (bound {bound[k]:.3g})")
    return first


def area_from_coefficients(m: ConformalMap, N: int = 512):
    """(pi sum_{n<=N} n|a_n|^2, tail).

    The tail pi sum_{n>N} n|a_n|^2 is not summed term by term: crowded maps
    need millions of coefficients.  It is the limit of the full weighted sum
    at radius r (the area inside f(|z| = r)) minus the partial sum.
    """
    a = m.series()[:N + 1]
    n = np.arange(len(a))
    partial = float(np.pi * (n * np.abs(a) ** 2).sum())
    total, _ = dirichlet_area_limit(m)
    return partial, float(total - partial)


# --- means ------------------------------------------------------------------

class MeanFunctional:
    """Convex non-decreasing Phi on the real line.

    kinds: ``power`` and ``plus-power`` give max(x, 0)**p (p >= 1), ``exp`` gives
    exp(p x), ``exp-plus-power`` gives exp(max(x, 0)**p), ``entire-series``
    gives sum_n c_n max(x, 0)**(p n) with c_n >= 0.
    """

    KINDS = ("power", "exp", "plus-power", "exp-plus-power", "entire-series")

    def __init__(self, kind: str, p: float = 1.0, coeffs=None):
        if kind not in self.KINDS:
            raise InvalidInput(f"unknown mean functional kind {kind!r}")
        if kind == "exp":
            if p < 0:
                raise InvalidInput("exp-p needs p >= 0")
        elif p < 1:
            raise InvalidInput(f"{kind} needs p >= 1 for convexity")
        if kind == "entire-series":
            coeffs = np.asarray(coeffs if coeffs is not None else [], float)
            if coeffs.size == 0 or np.any(coeffs < 0):
                raise InvalidInput("entire-series coefficients must be non-empty and >= 0")
        self.kind, self.p, self.coeffs = kind, float(p), coeffs

    @classmethod
    def exponential_series(cls, p: float = 2.0, terms: int = 30):
        c = np.ones(terms)
        c[1:] = 1.0 / np.cumprod(np.arange(1, terms, dtype=float))
        return cls("entire-series", p, c)

    @property
    def name(self) -> str:
        return f"{self.kind}-{self.p:g}"

    def __repr__(self):
        return f"MeanFunctional({self.name})"

    def log_terms(self, x):
        """log Phi(x) where Phi > 0, -inf elsewhere (exp kinds only)."""
        x = np.asarray(x, float)
        if self.kind == "exp":
            return self.p * x
        if self.kind == "exp-plus-power":
            return np.maximum(x, 0) ** self.p
        raise ValueError("log form only for exponential kinds")

    def __call__(self, x):
        x = np.asarray(x, float)
        xp = np.maximum(x, 0.0)
        if self.kind in ("power", "plus-power"):
            return xp ** self.p
        if self.kind in ("exp", "exp-plus-power"):
            with np.errstate(over="ignore"):
                return np.exp(self.log_terms(x))
        y = xp ** self.p
        out = np.zeros_like(y)
        for c in self.coeffs[::-1]:
            out = out * y + c
        return out


def _adaptive_circle_mean(values_fn, reducer, rel=1e-8, m0=256, m_max=2 ** 18):
    m = m0
    prev = reducer(values_fn(m))
    while m < m_max:
        m *= 2
        cur = reducer(values_fn(m))
        scale = max(abs(cur), 1e-300)
        if abs(cur - prev) <= rel * scale:
            return cur, abs(cur - prev), m
        prev = cur
    raise PrecisionFailure(f"circle quadrature did not settle within {m_max} nodes")


def _check_r(r):
    if not (0 <= r <= MAX_RADIUS):
        raise InvalidInput("r must lie in [0, 0.999]")


def hardy_mean(m: ConformalMap, r: float, p: float) -> MeanResult:
    """(1/2pi int |f(r e^{it})|^p dt)^{1/p}; p = inf gives the max modulus."""
    _check_r(r)
    if not p > 0:
        raise InvalidInput("p must be positive")
    if r == 0:
        return MeanResult(abs(m.w0), 0.0, 1)
    if np.isinf(p):
        val, err, nodes = _adaptive_circle_mean(lambda k: m.circle_values(r, k),
                                                lambda v: float(np.abs(v).max()))
        return MeanResult(val, err, nodes)

    def red(v):
        a = np.abs(v)
        with np.errstate(divide="ignore"):
            lse = logsumexp(p * np.log(a)) - np.log(len(a))
        return float(np.exp(lse / p))

    val, err, nodes = _adaptive_circle_mean(lambda k: m.circle_values(r, k), red)
    return MeanResult(val, err, nodes)


def sup_modulus(p: Polygon) -> float:
    return float(np.abs(p.z).max())


def hardy_norm(m: ConformalMap, p: float) -> NormInterval:
    """Interval for the H^p norm from means at r in {0.99, 0.995, 0.999}."""
    sup = sup_modulus(m.target)
    if m.is_linear:
        return NormInterval(m.C, m.C, m.C, 0.0, False, ())
    if np.isinf(p):
        lo = hardy_mean(m, RICHARDSON_RADII[-1], p).value
        return NormInterval(lo, sup, sup, sup - lo, (sup - lo) > 0.01 * sup, (lo,))
    rs = np.array(RICHARDSON_RADII)
    M = np.array([hardy_mean(m, r, p).value for r in rs])
    h = 1 - rs
    # linear extrapolation in h = 1 - r from the two outermost pairs
    L_fine = (M[2] * h[1] - M[1] * h[2]) / (h[1] - h[2])
    L_coarse = (M[1] * h[0] - M[0] * h[1]) / (h[0] - h[1])
    spread = abs(L_fine - L_coarse)
    lo = M[-1]
    hi = min(sup, max(L_fine, lo) + spread)
    hi = max(hi, lo)
    mid = float(np.clip(L_fine, lo, hi))
    return NormInterval(float(lo), float(hi), mid, float(spread),
                        bool((hi - lo) > 0.01 * max(mid, 1e-300)), tuple(M))


def boundary_derivative_integral(m: ConformalMap) -> float:
    """int_0^{2pi} |f'(e^{it})| dt, which for a polygon image is its perimeter."""
    if m.is_linear:
        return 2 * np.pi * m.C
    return geom.perimeter(m.target)


def _graded_panels(theta, h, ratio=0.15):
    """Panel endpoints on [theta_0, theta_0 + 2 pi], shrinking geometrically toward each prevertex."""
    edges = np.concatenate([theta, [theta[0] + 2 * np.pi]])
    los, his = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        L = b - a
        if L <= 0:
            continue
        s = [0.5 * L]
        while s[-1] > 0.1 * h:
            s.append(s[-1] * ratio)
        s = np.array(s[::-1])
        bps = np.unique(np.concatenate([[a], a + s, b - s[::-1], [b]]))
        los.append(bps[:-1])
        his.append(bps[1:])
    return np.concatenate(los), np.concatenate(his)


@lru_cache(maxsize=8)
def _gauss_cumulative(q):
    """Gauss-Legendre nodes, weights and the matrix S with (S v)_i = int_{-1}^{x_i} of the interpolant of v."""
    L = np.polynomial.legendre
    x, w = L.leggauss(q)
    V = L.legvander(x, q - 1)
    Q = np.column_stack([L.legval(x, L.legint(np.eye(q)[k], lbnd=-1)) for k in range(q)])
    return x, w, Q @ np.linalg.inv(V)


def image_area(m: ConformalMap, r: float, q: int = 16) -> tuple[float, float]:
    """Area enclosed by f(|z| = r), which equals pi sum n |a_n|^2 r^(2n).

    The image curve is rebuilt by integrating f' panel by panel on a graded rule,
    so no truncated series is involved.  Returns (area, closure error).
    """
    if not (0 < r < 1):
        raise InvalidInput("r must lie in (0, 1)")
    if m.is_linear:
        return float(np.pi * (m.C * r) ** 2), 0.0
    lo, hi = _graded_panels(m.theta, 1 - r)
    x, w, S = _gauss_cumulative(q)
    half = 0.5 * (hi - lo)[:, None]
    t = half * (x + 1) + lo[:, None]
    z = r * np.exp(1j * t)
    d = m.C * np.exp(sc.log_integrand(z.ravel(), m.zv, m.beta)).reshape(z.shape) * 1j * z
    totals = (half * d) @ w
    start = m._eval(r * np.exp(1j * lo[0])) + np.concatenate([[0], np.cumsum(totals)[:-1]])
    wn = start[:, None] + (half * d) @ S.T
    area = 0.5 * float((half * w * (np.conj(wn) * d).imag).sum())
    closure = abs(totals.sum())
    return area, float(closure * np.abs(wn).max())


def dirichlet_area_limit(m: ConformalMap, rel: float = 1e-6, kmax: int = 9):
    """lim_{r->1} of pi sum n |a_n|^2 r^(2n) by Aitken acceleration over r = 1 - 10^-k.

    Returns (estimate, list of (r, area, closure error)).
    """
    if m.is_linear:
        return float(np.pi * m.C ** 2), [(1.0, float(np.pi * m.C ** 2), 0.0)]
    seq, est = [], []
    for k in range(2, kmax + 1):
        r = 1 - 10.0 ** -k
        a, e = image_area(m, r)
        seq.append((r, a, e))
        if len(seq) >= 3:
            A0, A1, A2 = (v for _, v, _ in seq[-3:])
            den = (A2 - A1) - (A1 - A0)
            est.append(A2 - (A2 - A1) ** 2 / den if den != 0 and (A2 - A1) * (A1 - A0) > 0 else A2)
            if len(est) >= 2 and abs(est[-1] - est[-2]) <= rel * abs(est[-1]):
                break
    return (est[-1] if est else seq[-1][1]), seq


def _graded_arc_rule(theta, h, q=16, ratio=0.15):
    """Composite Gauss-Legendre nodes on the circle, graded toward each prevertex angle."""
    x, w = np.polynomial.legendre.leggauss(q)
    edges = np.concatenate([theta, [theta[0] + 2 * np.pi]])
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        L = b - a
        if L <= 0:
            continue
        # breakpoints a + s and b - s with s shrinking geometrically to about h/10
        s = [0.5 * L]
        while s[-1] > 0.1 * h:
            s.append(s[-1] * ratio)
        s = np.array(s[::-1])
        bps = np.unique(np.concatenate([[a], a + s, b - s[::-1], [b]]))
        lo, hi = bps[:-1], bps[1:]
        nodes.append((0.5 * (hi - lo)[:, None] * (x + 1) + lo[:, None]).ravel())
        weights.append((0.5 * (hi - lo)[:, None] * w).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def interior_derivative_integral(m: ConformalMap, r: float = MAX_RADIUS) -> float:
    """r int |f'(r e^{it})| dt, the length of the image of |z| = r."""
    if not (0 <= r < 1):
        raise InvalidInput("r must lie in [0, 1)")
    if m.is_linear:
        return 2 * np.pi * r * m.C
    t, w = _graded_arc_rule(m.theta, 1 - r)
    d = m.C * np.exp(sc.log_integrand(r * np.exp(1j * t), m.zv, m.beta).real)
    return float(r * (w * d).sum())


def derivative_length_limit(m: ConformalMap, rel: float = 1e-4, kmax: int = 10):
    """Limit of r int |f'(re^{it})| dt as r -> 1 by Aitken acceleration over r = 1 - 10^-k.

    Returns (estimate, list of (r, length)).
    """
    if m.is_linear:
        return 2 * np.pi * m.C, [(1.0, 2 * np.pi * m.C)]
    seq, est = [], []
    for k in range(2, kmax + 1):
        r = 1 - 10.0 ** -k
        seq.append((r, interior_derivative_integral(m, r)))
        if len(seq) >= 3:
            L0, L1, L2 = (v for _, v in seq[-3:])
            den = (L2 - L1) - (L1 - L0)
            a = L2 - (L2 - L1) ** 2 / den if den != 0 and (L2 - L1) * (L1 - L0) > 0 else L2
            est.append(a)
            if len(est) >= 2 and abs(est[-1] - est[-2]) <= rel * abs(est[-1]):
                return est[-1], seq
    return (est[-1] if est else seq[-1][1]), seq


def real_part_mean(m: ConformalMap, r: float, phi: MeanFunctional) -> MeanResult:
    """(1/2pi) int Phi(Re f(r e^{it})) dt."""
    _check_r(r)
    if phi.kind in ("exp", "exp-plus-power"):
        def red(v):
            return float(logsumexp(phi.log_terms(v.real)) - np.log(len(v)))
        if r == 0:
            lv = float(phi.log_terms(np.array([m.w0.real]))[0])
            return MeanResult(float(np.exp(min(lv, 700))) if lv <= 700 else np.inf, 0.0, 1, lv)
        lv, err, nodes = _adaptive_circle_mean(lambda k: m.circle_values(r, k), red, rel=1e-10)
        with np.errstate(over="ignore"):
            val = float(np.exp(lv))
        return MeanResult(val, val * err, nodes, lv)
    if r == 0:
        return MeanResult(float(phi(m.w0.real)), 0.0, 1)
    val, err, nodes = _adaptive_circle_mean(lambda k: m.circle_values(r, k),
                                            lambda v: float(phi(v.real).mean()))
    return MeanResult(val, err, nodes)


def poisson_mass(a: complex, nodes: int = 4096) -> float:
    t = 2 * np.pi * np.arange(nodes) / nodes
    return float(((1 - abs(a) ** 2) / np.abs(np.exp(1j * t) - a) ** 2).mean() * 2 * np.pi)


def moebius_identity_check(m: ConformalMap, a: complex, p: float, r: float = MAX_RADIUS,
                           rel: float = 1e-9) -> float:
    """Relative gap between the two sides of the Moebius change of variables.

    With g(z) = f(r z), F(z) = g((z + a)/(1 + conj(a) z)) - g(a):
        int |F(e^{is})|^p ds  =  int |g(e^{it}) - g(a)|^p (1-|a|^2)/|e^{it}-a|^2 dt.
    """
    a = complex(a)
    if abs(a) > 0.9:
        raise InvalidInput("|a| must not exceed 0.9")
    ga = m.eval(r * a)

    def lhs(k):
        s = 2 * np.pi * np.arange(k) / k
        e = np.exp(1j * s)
        z = r * (e + a) / (1 + np.conj(a) * e)
        return 2 * np.pi * float((np.abs(m._eval(z) - ga) ** p).mean())

    def rhs(k):
        t = 2 * np.pi * np.arange(k) / k
        v = m.circle_values(r, k)
        ker = (1 - abs(a) ** 2) / np.abs(np.exp(1j * t) - a) ** 2
        return 2 * np.pi * float((np.abs(v - ga) ** p * ker).mean())

    left, _, _ = _adaptive_circle_mean(lhs, lambda x: x, rel=rel, m0=512, m_max=2 ** 15)
    right, _, _ = _adaptive_circle_mean(rhs, lambda x: x, rel=rel, m0=512, m_max=2 ** 16)
    return abs(left - right) / max(abs(left), abs(right), 1e-300)
