"""Inequality harness: comparison theorems run over a fixture corpus.

Every check returns a list of :class:`Verdict` rows.  A row passes when
``lhs <= rhs + budget``; it is a violation only when the shortfall exceeds
three budgets, and anything in between is inconclusive.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from . import conformal, dynamics, geom, symmetry
from .conformal import ConformalMap, MeanFunctional
from .errors import (CoefficientPrecisionFailure, ConstructionFailure, InvalidInput,
                     PreconditionViolation)
from .geom import Polygon

log = logging.getLogger(__name__)

R_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99)
P_GRID = (2.0, 3.0, 4.0, 8.0, 16.0, 32.0, 64.0, np.inf)
VIOLATION_FACTOR = 3.0
SHARP_REL = 1e-6

PASS, INCONCLUSIVE, VIOLATION, SKIPPED = "pass", "inconclusive", "violation-found", "skipped"


# --- fixtures ---------------------------------------------------------------

@dataclass(frozen=True)
class Fixture:
    name: str
    polygon: Polygon
    tags: tuple = ()
    note: str = ""
    alt_w0: tuple = ()       # extra interior base points for w0-dependent checks
    linear: float | None = None  # exact dilation z -> linear*z stands in for the map

    def __post_init__(self):
        p = self.polygon
        if not (geom.contains(p, [0j])[0] and geom.distance_to_boundary(p, [0j])[0] > 0):
            raise InvalidInput(f"fixture {self.name}: 0 must lie strictly inside")
        for w in self.alt_w0:
            if not geom.contains(p, [w])[0]:
                raise InvalidInput(f"fixture {self.name}: base point {w} outside")

    @property
    def digest(self) -> str:
        return self.polygon.digest()


def _arc(n, radius=1.0, center=0j, t0=0.0, t1=2 * np.pi, endpoint=False):
    t = np.linspace(t0, t1, n, endpoint=endpoint)
    return center + radius * np.exp(1j * t)


def finger_polygon(width: float = 0.8, height: float = 1.0, x0: float = 0.3,
                   n: int = 64) -> Polygon:
    """Regular n-gon on the unit circle with a vertical spike over [x0-w/2, x0+w/2]."""
    z = _arc(n)
    a, b = x0 - width / 2, x0 + width / 2
    if not (-1 < a < b < 1):
        raise InvalidInput("spike must sit over (-1, 1)")
    ya, yb = np.sqrt(1 - a * a), np.sqrt(1 - b * b)
    under = (z.real > a) & (z.real < b) & (z.imag > 0)
    pts = []
    for k in range(n):
        if under[k]:
            continue
        pts.append(z[k])
        nxt = z[(k + 1) % n]
        if z[k].imag >= 0 and z[k].real >= b and (under[(k + 1) % n] or nxt.real <= a):
            pts += [complex(b, yb), complex(b, yb + height), complex(a, ya + height), complex(a, ya)]
    return Polygon.from_complex(np.array(pts))


def star_polygon(points: int = 5, inner: float = 0.5, outer: float = 1.0, phase: float = 0.1):
    k = np.arange(2 * points)
    rad = np.where(k % 2 == 0, outer, inner)
    return Polygon.from_complex(rad * np.exp(1j * (np.pi * k / points + phase)))


def corpus() -> list[Fixture]:
    """The standard fixture set; each contains 0 strictly inside."""
    half = np.concatenate([_arc(65, 1.0, 0j, 0, np.pi, endpoint=True)]) - 0.4j
    ell = _arc(64)
    ell = (1.2 * ell.real + 0.6j * ell.imag) * np.exp(0.5j)
    L = [complex(-0.5, -0.5), complex(1.5, -0.5), complex(1.5, 0.5), complex(0.5, 0.5),
         complex(0.5, 1.5), complex(-0.5, 1.5)]
    return [
        Fixture("disk256", Polygon.regular(256, 1.0), ("symmetric", "circular", "disk-like"),
                "regular 256-gon inscribed in the unit circle", (0.3 + 0.2j,)),
        Fixture("square_diag", Polygon.regular(4, 1.0), ("symmetric", "square"),
                "square with vertices +-1, +-i"),
        Fixture("square_axis", Polygon.rectangle(-1, -1, 1, 1), ("symmetric", "square", "rect"),
                "axis-aligned square of side 2", (0.4 - 0.3j,)),
        Fixture("rect_2x1", Polygon.rectangle(-1, -0.5, 1, 0.5), ("symmetric", "rect"),
                "translate of (0,2)x(0,1) centred at 0", (0.5 + 0.1j,)),
        Fixture("rect_offaxis", Polygon.rectangle(-1, -0.2, 1, 0.8), ("rect",),
                "rectangle shifted off the real axis"),
        Fixture("triangle", Polygon.from_complex([1.2 - 0.3j, -0.6 + 0.9j, -0.7 - 0.8j]), (),
                "scalene triangle", (0.2 - 0.1j,)),
        Fixture("half_disk", Polygon.from_complex(half), ("disk-like",),
                "upper half disk shifted down by 0.4"),
        Fixture("disk_translated", Polygon.regular(128, 1.0, center=0.5),
                ("symmetric", "disk-like"), "disk B(0.5, 1) as a 128-gon", (0.5 + 0j, 0.3 + 0.2j)),
        Fixture("disk_offaxis", Polygon.regular(128, 0.8, center=0.2 + 0.4j), ("disk-like",),
                "disk B(0.2+0.4i, 0.8) as a 128-gon"),
        Fixture("finger", finger_polygon(), ("finger",),
                "64-gon disk with a spike of width 0.8, height 1 over x=0.3"),
        Fixture("thin_rect", Polygon.rectangle(-0.5, -0.05, 0.5, 0.05), ("symmetric", "thin", "rect"),
                "1 x 0.1 rectangle"),
        Fixture("L_shape", Polygon.from_complex(L), (), "L-shaped hexagon"),
        Fixture("tall_rect", Polygon.rectangle(-0.5, -4, 0.5, 4), ("symmetric", "rect", "tall"),
                "1 x 8 rectangle, slices longer than 2 pi"),
        Fixture("star", star_polygon(), (), "five-point star, slightly rotated"),
        Fixture("ellipse64", Polygon.from_complex(ell), ("disk-like",),
                "rotated ellipse with semi-axes 1.2, 0.6 as a 64-gon", (0.3 + 0.1j,)),
    ]


def linear_fixture(alpha: float = 1.5) -> Fixture:
    """f(z) = alpha z, the extremal function of the norm chain."""
    return Fixture("alpha_z", Polygon.regular(256, alpha), ("symmetric", "circular", "linear"),
                   f"exact dilation by {alpha:g}", (), alpha)


def get_fixtures(names: Iterable[str] | None = None) -> list[Fixture]:
    pool = {f.name: f for f in corpus()}
    pool["alpha_z"] = linear_fixture()
    if names is None:
        return corpus()
    out = []
    for n in names:
        if n not in pool:
            raise InvalidInput(f"unknown fixture {n!r}; known: {', '.join(sorted(pool))}")
        out.append(pool[n])
    return out


# --- configuration, verdicts ---------------------------------------------------

@dataclass(frozen=True)
class HarnessConfig:
    tol_map: float = 1e-4
    tol_quadrature: float = 1e-8
    budget_multiplier: float = 1.0
    seed: int = 0
    r_grid: tuple = R_GRID
    p_grid: tuple = P_GRID
    circ_radial: int = 128
    circ_vertices: int = 128
    pmax: float = 200.0
    p0_radius: float = 0.9

    def as_dict(self) -> dict:
        d = self.__dict__.copy()
        d["p_grid"] = [("inf" if np.isinf(p) else p) for p in self.p_grid]
        d["r_grid"] = list(self.r_grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "HarnessConfig":
        d = dict(d)
        if "p_grid" in d:
            d["p_grid"] = tuple(np.inf if p == "inf" else float(p) for p in d["p_grid"])
        if "r_grid" in d:
            d["r_grid"] = tuple(float(r) for r in d["r_grid"])
        return cls(**d)


@dataclass(frozen=True)
class Verdict:
    theorem: str
    fixture: str
    params: dict
    lhs: float
    rhs: float
    margin: float
    budget: float
    status: str
    flag: str = ""
    hard: bool = True

    @property
    def ok(self) -> bool:
        return self.status != VIOLATION


def judge(theorem, fixture, params, lhs, rhs, budget, mult=1.0, flag="", hard=True,
          sharp_rel=None) -> Verdict:
    lhs, rhs = float(lhs), float(rhs)
    budget = float(mult * budget)
    margin = rhs - lhs
    if margin >= -budget:
        status = PASS
    elif margin < -VIOLATION_FACTOR * budget:
        status = VIOLATION
    else:
        status = INCONCLUSIVE
    if sharp_rel is not None and abs(margin) <= sharp_rel * max(abs(rhs), 1e-300):
        flag = "sharp"
    return Verdict(theorem, fixture, dict(params), lhs, rhs, margin, budget, status, flag, hard)


def skipped(theorem, fixture, params, reason) -> Verdict:
    return Verdict(theorem, fixture, dict(params), np.nan, np.nan, np.nan, np.nan, SKIPPED,
                   reason, False)


def _fmt(x) -> str:
    if isinstance(x, float):
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _params_str(params: dict) -> str:
    return ";".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items()))


CSV_FIELDS = ("theorem", "fixture", "params", "lhs", "rhs", "margin", "budget", "status", "flag")


def verdicts_to_csv(verdicts: Sequence[Verdict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for v in verdicts:
        w.writerow([v.theorem, v.fixture, _params_str(v.params), _fmt(v.lhs), _fmt(v.rhs),
                    _fmt(v.margin), _fmt(v.budget), v.status, v.flag])
    return buf.getvalue()


def write_csv(verdicts: Sequence[Verdict], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(verdicts_to_csv(verdicts))


def summarize(verdicts: Sequence[Verdict]) -> dict:
    by = {}
    for v in verdicts:
        d = by.setdefault(v.theorem, {PASS: 0, INCONCLUSIVE: 0, VIOLATION: 0, SKIPPED: 0})
        d[v.status] += 1
    hard_fail = [v for v in verdicts if v.hard and v.status == VIOLATION]
    return {
        "total": len(verdicts),
        "by_theorem": dict(sorted(by.items())),
        "hard_violations": len(hard_fail),
        "violations": [{"theorem": v.theorem, "fixture": v.fixture, "params": _params_str(v.params),
                        "margin": v.margin, "budget": v.budget} for v in hard_fail],
        "findings": [{"theorem": v.theorem, "fixture": v.fixture, "params": _params_str(v.params)}
                     for v in verdicts if not v.hard and v.status == VIOLATION],
    }


def write_summary(verdicts: Sequence[Verdict], path, extra: dict | None = None) -> dict:
    s = summarize(verdicts)
    if extra:
        s.update(extra)
    with open(path, "w") as fh:
        json.dump(s, fh, indent=2, sort_keys=True, default=str)
    return s


# --- map store --------------------------------------------------------------------

class MapStore:
    """Builds conformal maps once per (polygon, w0, tol) and optionally caches them on disk."""

    def __init__(self, tol: float = 1e-4, cache_dir=None):
        self.tol = tol
        self.cache_dir = cache_dir
        self._mem: dict = {}
        self.built = 0
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)

    def _key(self, p: Polygon, w0: complex):
        w0 = complex(w0)
        return f"{p.digest()[:24]}_{w0.real!r}_{w0.imag!r}_{self.tol!r}"

    def get(self, p: Polygon, w0: complex = 0j, linear: float | None = None) -> ConformalMap:
        if linear is not None:
            return ConformalMap.linear(linear, w0)
        key = self._key(p, w0)
        if key in self._mem:
            return self._mem[key]
        path = os.path.join(self.cache_dir, key.replace("-", "m") + ".json") if self.cache_dir else None
        m = None
        if path and os.path.exists(path):
            try:
                m = ConformalMap.load(path)
            except (InvalidInput, ValueError, KeyError):
                m = None
        if m is None:
            m = conformal.build_map(p, w0, self.tol)
            self.built += 1
            if path:
                tmp = path + ".tmp"
                m.save(tmp)
                os.replace(tmp, path)
        self._mem[key] = m
        return m

    def fixture_map(self, fx: Fixture, w0: complex = 0j) -> ConformalMap:
        return self.get(fx.polygon, w0, fx.linear if w0 == 0 else None)


def circular_of(fx: Fixture, cfg: HarnessConfig) -> Polygon:
    return symmetry.circular_symmetrize(fx.polygon, cfg.circ_radial, cfg.circ_vertices)


def _circ_slack(p: Polygon, cfg: HarnessConfig) -> float:
    """Chord sag of the polygonal circular symmetrization (absolute distance)."""
    return conformal.sup_modulus(p) * (1 - np.cos(np.pi / cfg.circ_vertices))


def _mean_pair(f: ConformalMap, g: ConformalMap, r: float, p: float):
    a = conformal.hardy_mean(f, r, p)
    b = conformal.hardy_mean(g, r, p)
    return a, b


# --- Steiner mean comparison at p = 2 ------------------------------------------

def check_steiner_p2(fx: Fixture, store: MapStore, cfg: HarnessConfig = HarnessConfig(),
                     r_grid: Sequence[float] | None = None) -> list[Verdict]:
    """Integral means of |f|^2 never exceed those of the Steiner-symmetrized map."""
    f = store.fixture_map(fx)
    G = store.get(symmetry.steiner_symmetrize(fx.polygon))
    out = []
    for r in r_grid or cfg.r_grid:
        a, b = _mean_pair(f, G, r, 2.0)
        budget = a.error + b.error + f.eps_b + G.eps_b + 1e-12 * max(a.value, b.value)
        out.append(judge("thm2.7-p2", fx.name, {"r": r}, a.value, b.value, budget,
                         cfg.budget_multiplier))
    return out


# --- search for the critical exponent ----------------------------------------------

@dataclass
class P0Result:
    fixture: str
    r: float
    p_star: float | None
    bracket: tuple | None
    grid: list = field(default_factory=list)  # (p, log-mean gap, log budget)
    nodes: int = 0

    def verdict(self, mult: float = 1.0) -> Verdict:
        params = {"r": self.r, "pmax": self.grid[-1][0] if self.grid else np.nan}
        if self.p_star is None:
            gap = max(g for _, g, _ in self.grid) if self.grid else np.nan
            return Verdict("p0-search", self.fixture, params, gap, 0.0, -gap, np.nan, PASS,
                           "no-violation", False)
        lo, hi = self.bracket
        gap = next(g for p, g, _ in self.grid if p >= hi) if self.grid else np.nan
        b = next(bb for p, _, bb in self.grid if p >= hi) if self.grid else np.nan
        params["p_star"] = self.p_star
        return Verdict("p0-search", self.fixture, params, gap, 0.0, -gap, b, VIOLATION,
                       f"bracket=[{lo:.6g},{hi:.6g}]", False)


def _log_means(v: np.ndarray, p: float) -> float:
    with np.errstate(divide="ignore"):
        la = np.log(np.abs(v))
    if np.isinf(p):
        return float(la.max())
    return float((logsumexp(p * la) - np.log(len(v))) / p)


def search_p0(fx: Fixture, store: MapStore, cfg: HarnessConfig = HarnessConfig(),
              r: float | None = None, pmax: float | None = None, ptol: float = 1e-2,
              grid_points: int = 48) -> P0Result:
    """Smallest p with M_p(r, f) > M_p(r, G) beyond three error budgets.

    Compares log-means, so the test is scale free in p.  The grid is geometric
    in p from 2 to pmax; a crossing found on the grid is refined by bisection.
    """
    r = cfg.p0_radius if r is None else r
    pmax = cfg.pmax if pmax is None else pmax
    if not (0.5 <= r <= 0.99):
        raise InvalidInput("r must lie in [0.5, 0.99]")
    if pmax <= 2:
        raise InvalidInput("pmax must exceed 2")
    f = store.fixture_map(fx)
    G = store.get(symmetry.steiner_symmetrize(fx.polygon))
    m = 4096
    vf, vg = f.circle_values(r, m), G.circle_values(r, m)
    vf2, vg2 = f.circle_values(r, 2 * m), G.circle_values(r, 2 * m)

    def gap_and_budget(p):
        d1 = _log_means(vf, p) - _log_means(vg, p)
        d2 = _log_means(vf2, p) - _log_means(vg2, p)
        lo = min(_log_means(vf2, p), _log_means(vg2, p))
        scale = np.exp(lo)
        b = abs(d2 - d1) + (f.eps_b + G.eps_b) / scale + 1e-12
        return d2, cfg.budget_multiplier * b

    def violates(p):
        d, b = gap_and_budget(p)
        return d > VIOLATION_FACTOR * b

    ps = np.unique(np.concatenate([np.geomspace(2.0, pmax, grid_points), [2.0, pmax]]))
    grid = []
    first = None
    for p in ps:
        d, b = gap_and_budget(float(p))
        grid.append((float(p), float(d), float(b)))
        if first is None and d > VIOLATION_FACTOR * b:
            first = len(grid) - 1
    if first is None:
        return P0Result(fx.name, r, None, None, grid, 2 * m)
    if first == 0:
        # violation already at p = 2 would contradict the p = 2 theorem; report as such
        return P0Result(fx.name, r, 2.0, (2.0, 2.0), grid, 2 * m)
    lo, hi = grid[first - 1][0], grid[first][0]
    while hi - lo > ptol:
        mid = 0.5 * (lo + hi)
        if violates(mid):
            hi = mid
        else:
            lo = mid
    return P0Result(fx.name, r, hi, (lo, hi), grid, 2 * m)


# --- perimeter and exactness --------------------------------------------------

def perimeter_verdicts(name: str, p: Polygon, cfg: HarnessConfig = HarnessConfig()) -> list[Verdict]:
    S = symmetry.steiner_symmetrize(p)
    P0, A0, D0 = geom.perimeter(p), geom.area(p), geom.diameter(p)
    out = [
        judge("thm2.5-steiner-perimeter", name, {}, geom.perimeter(S), P0, 1e-9),
        judge("steiner-area", name, {}, abs(geom.area(S) - A0), 1e-9 * A0, 0.0),
        judge("steiner-diameter", name, {}, geom.diameter(S), D0, 1e-9 * D0),
    ]
    if abs(out[0].margin) <= 1e-9:
        out[0] = replace(out[0], flag="equal")
    if geom.contains(p, [0j])[0]:
        C = symmetry.circular_symmetrize(p, cfg.circ_radial, cfg.circ_vertices)
        out.append(judge("thm2.5-circular-perimeter", name, {}, geom.perimeter(C), 1.01 * P0, 0.0))
    return out


def check_perimeter_reduction(fx: Fixture, cfg: HarnessConfig = HarnessConfig()) -> list[Verdict]:
    """Symmetrization never lengthens the boundary; Steiner also keeps area and diameter in check."""
    return perimeter_verdicts(fx.name, fx.polygon, cfg)


# --- conformal radius under symmetrization ------------------------------------

def _inside(p: Polygon, w: complex) -> bool:
    return bool(geom.contains(p, [w])[0]) and geom.distance_to_boundary(p, [w])[0] > 0


def check_hayman_derivative(fx: Fixture, store: MapStore,
                            cfg: HarnessConfig = HarnessConfig()) -> list[Verdict]:
    """f'(0) <= F'(0) for circular symmetrization (F(0) = |f(0)|), and the Steiner analogue."""
    out = []
    C = circular_of(fx, cfg)
    slack = _circ_slack(fx.polygon, cfg)
    for w0 in (0j,) + tuple(fx.alt_w0):
        params = {"w0": f"{complex(w0):.6g}"}
        W0 = abs(w0) + 0j
        if not _inside(C, W0):
            out.append(skipped("hayman-circular", fx.name, params, "base point not inside"))
            continue
        f = store.fixture_map(fx, w0)
        F = store.get(C, W0)
        d = geom.distance_to_boundary(C, [W0])[0]
        budget = F.fprime0 * (slack + f.eps_b + F.eps_b) / d
        out.append(judge("hayman-circular", fx.name, params, f.fprime0,
                         F.fprime0 * (1 + 1e-3), budget, cfg.budget_multiplier))
    f = store.fixture_map(fx)
    g = store.get(symmetry.steiner_symmetrize(fx.polygon))
    d = geom.distance_to_boundary(fx.polygon, [0j])[0]
    out.append(judge("hayman-steiner", fx.name, {"w0": "0"}, f.fprime0, g.fprime0,
                     g.fprime0 * (f.eps_b + g.eps_b) / d + 1e-12, cfg.budget_multiplier))
    return out


# --- coefficient dichotomy ------------------------------------------------------

@dataclass(frozen=True)
class Dichotomy:
    branch: str  # all-equal | mixed | one-sided
    n1: int | None  # |a_n1| < |A_n1|
    n2: int | None  # |a_n2| > |A_n2|
    max_excess: float
    max_deficit: float


def coefficient_dichotomy(a: np.ndarray, A: np.ndarray, tol: np.ndarray) -> Dichotomy:
    da = np.abs(a[1:]) - np.abs(A[1:])
    t = tol[1:]
    less = np.nonzero(da < -t)[0]
    more = np.nonzero(da > t)[0]
    n1 = int(less[0]) + 1 if less.size else None
    n2 = int(more[0]) + 1 if more.size else None
    if n1 is None and n2 is None:
        branch = "all-equal"
    elif n1 is not None and n2 is not None:
        branch = "mixed"
    else:
        branch = "one-sided"
    return Dichotomy(branch, n1, n2, float(da.max()), float(-da.min()))


def check_coefficient_theorem(fx: Fixture, store: MapStore, cfg: HarnessConfig = HarnessConfig(),
                              N: int = 256) -> list[Verdict]:
    """Areas match, |A_0| = |a_0|, |a_1| <= |A_1|, and the all-equal / mixed dichotomy."""
    f = store.fixture_map(fx)
    C = circular_of(fx, cfg)
    F = store.get(C, abs(f.w0) + 0j)
    out = []
    for tag, m, poly in (("f", f, fx.polygon), ("F", F, C)):
        part, tail = conformal.area_from_coefficients(m, 2 * N)
        out.append(judge("area-identity", fx.name, {"map": tag},
                         abs(part + tail - geom.area(poly)), 0.01 * geom.area(poly), 0.0))
    Sf = sum(conformal.area_from_coefficients(f, 2 * N))
    SF = sum(conformal.area_from_coefficients(F, 2 * N))
    out.append(judge("thm2.2-area", fx.name, {}, abs(Sf - SF), 0.01 * max(Sf, SF), 0.0))
    try:
        ca = conformal.taylor_coefficients(f, N)
        cA = conformal.taylor_coefficients(F, N)
    except CoefficientPrecisionFailure as exc:
        v = skipped("thm2.2-dichotomy", fx.name, {"N": N}, f"coefficients: {exc}")
        return out + [replace(v, status=INCONCLUSIVE)]
    out.append(judge("thm2.2-a0", fx.name, {}, abs(abs(ca.a[0]) - abs(cA.a[0])), 1e-6, 0.0))
    tol1 = ca.error[1] + cA.error[1] + f.eps_b + F.eps_b
    out.append(judge("thm2.2-a1", fx.name, {}, abs(ca.a[1]), abs(cA.a[1]) * (1 + 1e-3), tol1,
                     cfg.budget_multiplier))
    # |delta a_n| <= sup |delta F| on the circle, so boundary errors bound every coefficient
    tol = ca.error + cA.error + f.eps_b + F.eps_b + _circ_slack(fx.polygon, cfg)
    d = coefficient_dichotomy(ca.a, cA.a, tol)
    if d.branch == "one-sided":
        # the chord bound is loose; measure the discretization effect directly instead
        fine = replace(cfg, circ_radial=2 * cfg.circ_radial, circ_vertices=2 * cfg.circ_vertices)
        F2 = store.get(circular_of(fx, fine), abs(f.w0) + 0j)
        try:
            cA2 = conformal.taylor_coefficients(F2, N)
        except CoefficientPrecisionFailure:
            cA2 = None
        if cA2 is not None:
            drift = np.abs(np.abs(cA2.a) - np.abs(cA.a))
            tol = ca.error + cA2.error + f.eps_b + F2.eps_b + 2 * drift
            d = coefficient_dichotomy(ca.a, cA2.a, tol)
    flag = d.branch + (f" n1={d.n1} n2={d.n2}" if d.branch != "all-equal" else "")
    status = PASS if d.branch in ("all-equal", "mixed") else INCONCLUSIVE
    out.append(Verdict("thm2.2-dichotomy", fx.name, {"N": N}, d.max_excess, d.max_deficit,
                       min(d.max_excess, d.max_deficit), float(tol[1]), status, flag))
    return out


# --- norm chain -------------------------------------------------------------------

def _pname(p):
    return "inf" if np.isinf(p) else float(p)


def check_norm_chain(fx: Fixture, store: MapStore, cfg: HarnessConfig = HarnessConfig(),
                     r_grid: Sequence[float] | None = None,
                     p_grid: Sequence[float] | None = None) -> list[Verdict]:
    """M_p(r, f) <= r/(2 pi^{2/p}) int |f'(re^{it})| dt, its boundary form, and the |f(0)| variant."""
    p_grid = tuple(p_grid or cfg.p_grid)
    for p in p_grid:
        if not (np.isinf(p) or 2 <= p <= 64):
            raise InvalidInput("p grid must lie in [2, 64] or be inf")
    f = store.fixture_map(fx)
    out = []
    mult = cfg.budget_multiplier
    for r in r_grid or cfg.r_grid:
        L = conformal.interior_derivative_integral(f, r)
        for p in p_grid:
            M = conformal.hardy_mean(f, r, p)
            if np.isinf(p):
                thm, rhs = "lemma3.10", 0.5 * L
            else:
                thm = "thm3.8" if p == 2 else "thm4.3"
                rhs = L / (2 * np.pi ** (2 / p))
            budget = M.error + 2 * f.eps_b + cfg.tol_quadrature * rhs
            out.append(judge(thm, fx.name, {"r": r, "p": _pname(p)}, M.value, rhs, budget, mult,
                             sharp_rel=SHARP_REL if p == 2 else None))
    per = conformal.boundary_derivative_integral(f)
    for w0 in (0j,) + tuple(fx.alt_w0):
        g = store.fixture_map(fx, w0)
        for p in p_grid:
            N = conformal.hardy_norm(g, p)
            k = np.pi if np.isinf(p) else np.pi ** ((p - 2) / p)
            rhs = k * per / (2 * np.pi) + abs(g.w0)
            thm = "thm4.3-boundary" if w0 == 0 else "thm4.4"
            budget = (N.hi - N.mid) + 2 * g.eps_b + cfg.tol_quadrature * rhs
            out.append(judge(thm, fx.name, {"p": _pname(p), "w0": f"{complex(w0):.6g}"},
                             N.mid, rhs, budget, mult,
                             sharp_rel=SHARP_REL if (p == 2 and w0 == 0) else None))
    return out


def lemma_ratio(fx: Fixture, store: MapStore, r: float = 0.99) -> float:
    """max|f(re^{it})| / ((r/2) int |f'|): how close a domain comes to the p = inf constant."""
    f = store.fixture_map(fx)
    return conformal.hardy_mean(f, r, np.inf).value / (0.5 * conformal.interior_derivative_integral(f, r))


# --- real-part suite ----------------------------------------------------------------

def default_phis() -> list[MeanFunctional]:
    return ([MeanFunctional("exp", p) for p in (0.5, 1.0, 2.0)]
            + [MeanFunctional("plus-power", p) for p in (1.5, 2.0, 4.0)]
            + [MeanFunctional("exp-plus-power", 2.0), MeanFunctional.exponential_series(2.0)])


def _lipschitz(phi: MeanFunctional, R: float) -> float:
    x = np.linspace(-R, R, 4001)
    y = phi(x)
    return float(np.max(np.abs(np.diff(y)) / (x[1] - x[0])))


def prepare_realpart(p: Polygon, rescale: bool = True, margin: float = 0.05):
    """(polygon, factor) with every vertical slice shorter than 2 pi."""
    lmax = geom.vertical_slices(p).max()
    if lmax < 2 * np.pi:
        return p, 1.0
    if not rescale:
        raise PreconditionViolation(f"max slice {lmax:.6g} >= 2 pi and rescaling disabled")
    k = 2 * np.pi / (lmax * (1 + margin))
    return geom.scale(p, k), k


def _sup_real(m: ConformalMap, r: float):
    v1 = np.maximum(m.circle_values(r, 4096).real, 0).max()
    v2 = np.maximum(m.circle_values(r, 8192).real, 0).max()
    return float(v2), float(abs(v2 - v1))


def check_realpart_suite(fx: Fixture, store: MapStore, cfg: HarnessConfig = HarnessConfig(),
                         r_grid: Sequence[float] | None = None,
                         phis: Sequence[MeanFunctional] | None = None,
                         rescale: bool = True, commutation: bool | None = None) -> list[Verdict]:
    """(1/2pi) int Phi(Re f) <= (1/2pi) int Phi(Re F) for Steiner F with F(0) = f(0)."""
    P, k = prepare_realpart(fx.polygon, rescale)
    phis = list(phis or default_phis())
    S = symmetry.steiner_symmetrize(P)
    f = store.get(P, 0j, fx.linear * k if fx.linear else None)
    F = store.get(S, 0j)
    mult = cfg.budget_multiplier
    R = conformal.sup_modulus(P)
    out = []
    base = {"scale": k}
    for phi in phis:
        lip = _lipschitz(phi, R)
        for r in r_grid or cfg.r_grid:
            a = conformal.real_part_mean(f, r, phi)
            b = conformal.real_part_mean(F, r, phi)
            budget = a.error + b.error + lip * (f.eps_b + F.eps_b) + 1e-12 * max(a.value, b.value)
            out.append(judge("thm6.2", fx.name, base | {"r": r, "phi": phi.name},
                             a.value, b.value, budget, mult))
    for r in r_grid or cfg.r_grid:
        sf, ef = _sup_real(f, r)
        sF, eF = _sup_real(F, r)
        out.append(judge("cor6.3-sup", fx.name, base | {"r": r}, sf, sF,
                         ef + eF + f.eps_b + F.eps_b, mult))
    x, xs = P.z.real, S.z.real
    rng = abs(x.min() - xs.min()) + abs(x.max() - xs.max())
    out.append(judge("rem6.4-range", fx.name, base, rng, 1e-9, 0.0))
    if commutation if commutation is not None else "rect" in fx.tags:
        out.append(check_exp_commutation(fx.name, P, cfg))
    return out


def check_exp_commutation(name: str, P: Polygon, cfg: HarnessConfig = HarnessConfig(),
                          tol: float = 2e-2) -> Verdict:
    """exp of the Steiner symmetrization against circular symmetrization of exp."""
    A = symmetry.exp_domain(symmetry.steiner_symmetrize(P))
    B = symmetry.circular_symmetrize(symmetry.exp_domain(P), 512, 512)
    h = geom.boundary_hausdorff(A, B)
    return judge("prop6.1-commute", name, {}, h, tol, 0.0)


# --- class minimum N(2, alpha) ----------------------------------------------------

@dataclass(frozen=True)
class N2AlphaRow:
    fixture: str
    alpha: float
    epsilon: float
    converged: bool
    steps: int
    terminal: float
    target: float


def n2alpha_experiment(alphas: Sequence[float], fixtures: Sequence[Fixture],
                       cfg: HarnessConfig = HarnessConfig(), epsilon: float = 1.0,
                       max_steps: int = 60, hausdorff_tol: float = 1e-2,
                       rel: float = 0.05) -> tuple[list[N2AlphaRow], list[Verdict]]:
    """Terminal boundary length of shrunk greedy runs against 2 pi max{eps, alpha}.

    The class {f'(0) >= eps, ||f||_2 >= alpha} is eps times the class with
    constants (1, alpha/eps), so a run with alpha/eps on the polygon scaled by
    1/eps, rescaled back by eps, covers the eps-normalized variant.
    """
    rows, out = [], []
    for fx in fixtures:
        for alpha in alphas:
            p0 = geom.scale(fx.polygon, 1 / epsilon) if epsilon != 1 else fx.polygon
            params = {"alpha": float(alpha), "eps": float(epsilon)}
            try:
                res = dynamics.run_deformation(
                    p0, alpha / epsilon, dynamics.AngleStrategy("greedy-diameter"),
                    max_steps=max_steps, hausdorff_tol=hausdorff_tol, mode="shrunk",
                    tol_map=max(cfg.tol_map * 1e-2, 1e-8))
            except Exception as exc:  # step failures are reported, not raised
                out.append(skipped("n2alpha", fx.name, params, f"run failed: {exc}"))
                continue
            terminal = epsilon * geom.perimeter(res.state.current)
            target = 2 * np.pi * max(epsilon, alpha)
            rows.append(N2AlphaRow(fx.name, float(alpha), float(epsilon), res.converged,
                                   res.state.step, terminal, target))
            # lower bound first: terminal >= target up to the polygonal chord error
            chord = target * (1 - np.cos(np.pi / res.state.vertex_budget)) + 1e-3 * target
            out.append(judge("thm3.6-lower", fx.name, params, target, terminal, chord))
            if res.converged:
                v = judge("thm3.6-attained", fx.name, params, abs(terminal - target) / target,
                          rel, 0.0)
                out.append(v)
            else:
                out.append(skipped("thm3.6-attained", fx.name, params, "not converged"))
    return rows, out


# --- circular modulus means --------------------------------------------------

def _small_r_derivative(m: ConformalMap, r: float = 1e-3) -> float:
    M = conformal.hardy_mean(m, r, 2.0).value
    return float(np.sqrt(max(M * M - abs(m.w0) ** 2, 0.0)) / r)


def check_baernstein_circular(fx: Fixture, store: MapStore, cfg: HarnessConfig = HarnessConfig(),
                              r_grid: Sequence[float] | None = None) -> list[Verdict]:
    """(1/2pi) int |f|^2 <= (1/2pi) int |F|^2 with F the circular symmetrization map, F(0) = |f(0)|."""
    C = circular_of(fx, cfg)
    slack = _circ_slack(fx.polygon, cfg)
    mult = cfg.budget_multiplier
    out = []
    for w0 in (0j,) + tuple(fx.alt_w0):
        params = {"w0": f"{complex(w0):.6g}"}
        W0 = abs(w0) + 0j
        if not _inside(C, W0):
            out.append(skipped("baernstein-circular", fx.name, params, "base point not inside"))
            continue
        f = store.fixture_map(fx, w0)
        F = store.get(C, W0)
        for r in r_grid or cfg.r_grid:
            a, b = _mean_pair(f, F, r, 2.0)
            err = a.error + b.error + f.eps_b + F.eps_b + slack
            budget = 2 * max(a.value, b.value) * err + err * err
            out.append(judge("baernstein-circular", fx.name, params | {"r": r},
                             a.value ** 2, b.value ** 2, budget, mult))
        da, dA = _small_r_derivative(f), _small_r_derivative(F)
        consistent = abs(da - f.fprime0) <= 1e-3 * f.fprime0 and abs(dA - F.fprime0) <= 1e-3 * F.fprime0
        d = geom.distance_to_boundary(C, [W0])[0]
        v = judge("baernstein-derivative", fx.name, params, da, dA * (1 + 1e-3),
                  dA * (slack + f.eps_b + F.eps_b) / d, mult)
        out.append(replace(v, flag="consistent" if consistent else "inconsistent"))
    return out


# --- suites ----------------------------------------------------------------------

SUITES = ("p2", "perimeter", "norms", "realpart", "coefficients", "hayman", "baernstein",
          "p0", "n2alpha")


def run_suite(suite: str, fixtures: Sequence[Fixture], store: MapStore,
              cfg: HarnessConfig = HarnessConfig(), n2alpha_fixtures: Sequence[str] = ("disk256",),
              n2alpha_alphas: Sequence[float] = (0.5, 2.0)) -> list[Verdict]:
    """Run one named suite (or ``all``) and return its verdicts in a fixed order."""
    if suite == "all":
        out = []
        for s in SUITES:
            out += run_suite(s, fixtures, store, cfg, n2alpha_fixtures, n2alpha_alphas)
        return out
    if suite not in SUITES:
        raise InvalidInput(f"unknown suite {suite!r}")
    out = []
    if suite == "n2alpha":
        pool = {f.name: f for f in get_fixtures(None)}
        chosen = [pool[n] for n in n2alpha_fixtures if n in pool]
        return n2alpha_experiment(n2alpha_alphas, chosen, cfg)[1]
    fxs = list(fixtures)
    if suite == "norms" and not any(f.linear for f in fxs):
        fxs.append(linear_fixture())
    for fx in fxs:
        log.info("suite %s: fixture %s", suite, fx.name)
        try:
            if suite == "p2":
                out += check_steiner_p2(fx, store, cfg)
            elif suite == "perimeter":
                out += check_perimeter_reduction(fx, cfg)
            elif suite == "norms":
                out += check_norm_chain(fx, store, cfg)
            elif suite == "realpart":
                out += check_realpart_suite(fx, store, cfg)
            elif suite == "coefficients":
                out += check_coefficient_theorem(fx, store, cfg)
            elif suite == "hayman":
                out += check_hayman_derivative(fx, store, cfg)
            elif suite == "baernstein":
                out += check_baernstein_circular(fx, store, cfg)
            elif suite == "p0":
                out.append(search_p0(fx, store, cfg).verdict(cfg.budget_multiplier))
        except ConstructionFailure as exc:
            out.append(skipped(suite, fx.name, {}, f"map construction failed: {exc}"))
    return out
