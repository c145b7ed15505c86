"""Rotate, symmetrize and shrink: the deformation process and its bookkeeping.

A shrunk run keeps the iterate inside the class of maps with g'(0) >= 1 and
||g||_2 >= alpha by rescaling after every symmetrization.  An unshrunk run
only symmetrizes; its recorded factors are ratios of the quantity
P(G) = max(1/G'(0), alpha/||G||_2), so both runs carry the same product.
"""
from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import conformal, geom, symmetry
from .errors import ConstructionFailure, InvalidInput, PreconditionViolation, StepFailure
from .geom import Polygon

log = logging.getLogger(__name__)

DEFORM_VERTEX_BUDGET = 128
GOLDEN = np.pi * (3 - np.sqrt(5))
SPREAD_LIMIT = 1e-3


@dataclass(frozen=True)
class ShrinkRecord:
    phi: float
    c: float
    g_prime0: float
    h2: tuple  # (lo, mid, hi)
    diameter_before: float
    diameter_after: float
    area: float
    perimeter: float
    hausdorff: float

    def as_json(self, step: int) -> dict:
        d = dataclasses.asdict(self)
        d["h2"] = list(self.h2)
        d["step"] = step
        return d


@dataclass(frozen=True)
class DeformationState:
    alpha: float
    current: Polygon
    mode: str = "unshrunk"
    step: int = 0
    history: tuple = ()
    product: float = 1.0
    level: float = 1.0  # P(G) of the last unshrunk iterate
    vertex_budget: int = DEFORM_VERTEX_BUDGET
    tol_map: float = 1e-6

    def __post_init__(self):
        if self.mode not in ("shrunk", "unshrunk"):
            raise InvalidInput("mode must be 'shrunk' or 'unshrunk'")
        if not self.alpha > 0:
            raise InvalidInput("alpha must be positive")

    @property
    def factors(self) -> np.ndarray:
        return np.array([h.c for h in self.history])

    def recomputed_product(self) -> float:
        return float(np.prod(self.factors)) if self.history else 1.0


class AngleStrategy:
    """Chooses the rotation angle for each step; deterministic given its config."""

    KINDS = ("fixed-list", "uniform-random", "golden-angle", "greedy-diameter")

    def __init__(self, kind: str = "greedy-diameter", angles: Sequence[float] = (),
                 seed: int = 0, grid: int = 64, xtol: float = 1e-4):
        if kind not in self.KINDS:
            raise InvalidInput(f"unknown angle strategy {kind!r}")
        if kind == "fixed-list" and len(angles) == 0:
            raise InvalidInput("fixed-list strategy needs angles")
        self.kind, self.angles, self.seed = kind, tuple(float(a) for a in angles), int(seed)
        self.grid, self.xtol = int(grid), float(xtol)

    def config(self) -> dict:
        return {"kind": self.kind, "angles": list(self.angles), "seed": self.seed,
                "grid": self.grid, "xtol": self.xtol}

    def __call__(self, step: int, p: Polygon) -> float:
        if self.kind == "fixed-list":
            return self.angles[step % len(self.angles)]
        if self.kind == "uniform-random":
            return float(np.random.default_rng([self.seed, step]).uniform(0, np.pi))
        if self.kind == "golden-angle":
            return float(np.mod(step * GOLDEN, np.pi))
        return greedy_angle(p, self.grid, self.xtol)


def _diameter_after(p: Polygon, phi: float) -> float:
    return geom.diameter(symmetry.steiner_symmetrize(geom.rotate(p, phi)))


def greedy_angle(p: Polygon, grid: int = 64, xtol: float = 1e-4) -> float:
    """Angle in [0, pi) minimizing the diameter after symmetrization."""
    phis = np.pi * np.arange(grid) / grid
    d = np.array([_diameter_after(p, x) for x in phis])
    k = int(np.argmin(d))
    h = np.pi / grid
    res = minimize_scalar(lambda x: _diameter_after(p, x), bounds=(phis[k] - h, phis[k] + h),
                          method="bounded", options={"xatol": xtol})
    phi = float(res.x) if res.fun < d[k] else float(phis[k])
    return float(np.mod(phi, np.pi))


def disk_hausdorff(p: Polygon, radius: float | None = None) -> float:
    """Boundary Hausdorff distance from p to the circle of the given radius about 0."""
    if radius is None:
        radius = np.sqrt(geom.area(p) / np.pi)
    circle = Polygon.regular(4096, radius)
    return geom.boundary_hausdorff(p, circle)


def map_level(gp0: float, h2: float, alpha: float) -> float:
    return max(1.0 / gp0, alpha / h2)


def h2_norm(m: conformal.ConformalMap):
    iv = conformal.hardy_norm(m, 2)
    return iv


def deform_step(state: DeformationState, phi: float) -> tuple[DeformationState, conformal.ConformalMap]:
    """One rotate-symmetrize(-shrink) step; returns the new state and the step's map."""
    before = geom.diameter(state.current)
    sym = symmetry.steiner_symmetrize(geom.rotate(state.current, phi))
    after = geom.diameter(sym)
    sym = symmetry.resample_symmetric(sym, state.vertex_budget)
    try:
        m = conformal.build_map(sym, 0j, state.tol_map)
        norm = h2_norm(m)
        if norm.spread >= SPREAD_LIMIT:
            m = conformal.build_map(sym, 0j, max(1e-8, state.tol_map * 1e-2))
            norm = h2_norm(m)
    except ConstructionFailure as exc:
        raise StepFailure(f"map construction failed at step {state.step + 1}: {exc}",
                          {"step": state.step + 1, "phi": phi, **exc.diagnostics}) from exc
    gp0 = m.fprime0
    level = map_level(gp0, norm.mid, state.alpha)
    if state.mode == "shrunk":
        c = level
        current = geom.scale(sym, c)
        new_level = state.level
    else:
        c = level / state.level
        current = sym
        new_level = level
    rec = ShrinkRecord(phi=float(phi), c=float(c), g_prime0=float(gp0),
                       h2=(norm.lo, norm.mid, norm.hi), diameter_before=float(before),
                       diameter_after=float(after), area=geom.area(current),
                       perimeter=geom.perimeter(current), hausdorff=disk_hausdorff(current))
    new = dataclasses.replace(state, current=current, step=state.step + 1,
                              history=state.history + (rec,), product=state.product * c,
                              level=new_level)
    return new, m


@dataclass
class RunResult:
    state: DeformationState
    converged: bool
    stagnated: bool
    hausdorff: float
    radius: float
    lower_bound: float
    initial_scale: float = 1.0
    final_map: conformal.ConformalMap | None = None
    snapshots: list = field(default_factory=list)

    def summary(self) -> dict:
        s = self.state
        return {
            "mode": s.mode, "alpha": s.alpha, "steps": s.step, "converged": self.converged,
            "stagnated": self.stagnated, "hausdorff": self.hausdorff, "radius": self.radius,
            "product": s.product, "lower_bound": self.lower_bound,
            "initial_scale": self.initial_scale,
            "final_perimeter": geom.perimeter(s.current), "final_area": geom.area(s.current),
        }


def into_class(p: Polygon, alpha: float, tol: float = 1e-6) -> tuple[Polygon, float]:
    """Smallest upscaling putting the map of p into f'(0) >= 1, ||f||_2 >= alpha."""
    m = conformal.build_map(p, 0j, tol)
    k = max(1.0, 1.0 / m.fprime0, alpha / conformal.hardy_norm(m, 2).mid)
    return (geom.scale(p, k) if k > 1 else p), k


def run_deformation(p0: Polygon, alpha: float = 1.0, strategy: AngleStrategy | None = None,
                    max_steps: int = 200, hausdorff_tol: float = 1e-2,
                    iso_tol: float | None = None, mode: str = "unshrunk",
                    vertex_budget: int = DEFORM_VERTEX_BUDGET, tol_map: float = 1e-6,
                    telemetry: Callable[[dict], None] | str | None = None,
                    snapshots: bool = False, stagnation_steps: int = 20,
                    upscale: bool = True) -> RunResult:
    """Iterate deform_step until the iterate is within hausdorff_tol of its disk."""
    if not (geom.contains(p0, [0j])[0] and geom.distance_to_boundary(p0, [0j])[0] > 0):
        raise PreconditionViolation("0 must lie strictly inside the initial polygon")
    strategy = strategy or AngleStrategy()
    k = 1.0
    if mode == "shrunk" and upscale:
        p0, k = into_class(p0, alpha, tol_map)
    state = DeformationState(alpha, p0, mode, vertex_budget=vertex_budget, tol_map=tol_map)
    sink, fh = _telemetry_sink(telemetry)
    snaps = [p0] if snapshots else []
    lower = product_lower_bound(p0, alpha)
    stalled = 0
    converged = stagnated = False
    m = None
    try:
        for _ in range(max_steps):
            phi = strategy(state.step, state.current)
            state, m = deform_step(state, phi)
            rec = state.history[-1]
            if sink:
                sink(rec.as_json(state.step) | {"product": state.product})
            if snapshots:
                snaps.append(state.current)
            if rec.hausdorff < hausdorff_tol * np.sqrt(rec.area / geom.area(p0)):
                converged = True
            if iso_tol is not None and _iso_deficit(state.current) < iso_tol:
                converged = True
            if converged:
                break
            if strategy.kind == "greedy-diameter":
                stalled = stalled + 1 if rec.diameter_before - rec.diameter_after < 1e-10 else 0
                if stalled >= stagnation_steps:
                    stagnated = True
                    log.warning("deformation stagnated after %d steps", state.step)
                    break
    finally:
        if fh:
            fh.close()
    cur = state.current
    R = np.sqrt(geom.area(cur) / np.pi)
    return RunResult(state, converged, stagnated, disk_hausdorff(cur, R), R, lower, k, m, snaps)


def _iso_deficit(p: Polygon) -> float:
    return geom.perimeter(p) ** 2 / (4 * np.pi * geom.area(p)) - 1


def _telemetry_sink(telemetry):
    if telemetry is None:
        return None, None
    if callable(telemetry):
        return telemetry, None
    fh = open(telemetry, "w")

    def write(rec):
        fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return write, fh


def product_lower_bound(p0: Polygon, alpha: float) -> float:
    """max(1, alpha) / sqrt(area/pi)."""
    return max(1.0, alpha) / np.sqrt(geom.area(p0) / np.pi)


def green_area(m: conformal.ConformalMap, r: float = conformal.MAX_RADIUS, nodes: int = 2 ** 15) -> float:
    """int Re f(re^{it}) Re(re^{it} f'(re^{it})) dt, the area inside the image of |z| = r."""
    t = 2 * np.pi * np.arange(nodes) / nodes
    f = m.circle_values(r, nodes)
    d = m._derivative_on_circle(r, nodes)
    return float(2 * np.pi * np.mean(f.real * (r * np.exp(1j * t) * d).real))


def lower_bound_cross_check(p0: Polygon, alpha: float, m: conformal.ConformalMap | None = None) -> float:
    """Relative gap between the area form of the bound and the boundary-integral form."""
    m = m or conformal.build_map(p0, 0j, 1e-6)
    via_integral = max(1.0, alpha) / np.sqrt(green_area(m) / np.pi)
    exact = product_lower_bound(p0, alpha)
    return abs(via_integral - exact) / exact


def product_identity_check(p0: Polygon, alpha: float, strategy: AngleStrategy | None = None,
                           steps: int = 50, **kw) -> dict:
    """Run unshrunk and shrunk with the same angles; compare prod c with P(G_N)."""
    strategy = strategy or AngleStrategy()
    un = run_deformation(p0, alpha, strategy, max_steps=steps, hausdorff_tol=0.0,
                         mode="unshrunk", **kw)
    angles = [h.phi for h in un.state.history]
    sh = run_deformation(p0, alpha, AngleStrategy("fixed-list", angles), max_steps=len(angles),
                         hausdorff_tol=0.0, mode="shrunk", upscale=False, **kw)
    last = un.state.history[-1]
    level = map_level(last.g_prime0, last.h2[1], alpha)
    return {"product": sh.state.product, "identity": level,
            "residual": abs(sh.state.product - level), "steps": len(angles),
            "unshrunk": un, "shrunk": sh}


# --- Blaschke bookkeeping ------------------------------------------------

@dataclass(frozen=True)
class BlaschkeReport:
    partial_sums: np.ndarray
    log_sum: float
    neg_log_product: float
    verdict: str
    modulus: float

    @property
    def log_identity_gap(self) -> float:
        return abs(self.log_sum - self.neg_log_product)


def blaschke_condition(history: Iterable, product: float | None = None,
                       min_steps: int = 10) -> BlaschkeReport:
    """Partial sums of (1 - c_n) with a convergence verdict.

    ``history`` holds ShrinkRecords or plain factors.
    """
    c = np.array([h.c if isinstance(h, ShrinkRecord) else float(h) for h in history])
    if len(c) < min_steps:
        raise InvalidInput(f"need at least {min_steps} factors")
    inc = 1 - c
    sums = np.cumsum(inc)
    log_sum = float(np.sum(np.log(1 / c)))
    prod = float(np.prod(c)) if product is None else float(product)
    tail = float(np.abs(inc[len(inc) // 2:]).sum())
    if np.all(np.abs(inc[-3:]) < 1e-9):
        verdict = "bounded"
    elif tail <= 0.1 * max(abs(sums[-1]), 1e-300) or abs(inc[-1]) < 1e-6:
        verdict = "cauchy"
    else:
        verdict = "undetermined"
    return BlaschkeReport(sums, log_sum, -float(np.log(prod)), verdict, tail)


@dataclass(frozen=True)
class BlaschkeValue:
    value: complex
    tail_bound: float


def blaschke_eval(zeros: Sequence[float], z: complex) -> BlaschkeValue:
    """prod (z - c_n)/(1 - c_n z) over the given zeros, |z| <= 0.99.

    ``tail_bound`` bounds how far the product can move if the zeros in the
    second half of the prefix are dropped: sum (1-c_n)(1+|z|)/(1-|z|).
    """
    c = np.asarray(zeros, float)
    if c.size == 0 or np.any(c <= 0) or np.any(c > 1):
        raise InvalidInput("Blaschke zeros must lie in (0, 1]")
    z = complex(z)
    if abs(z) > 0.99:
        raise InvalidInput("|z| must not exceed 0.99")
    fac = (z - c) / (1 - c * z)
    val = complex(np.prod(fac))
    half = c[len(c) // 2:]
    bound = float(np.sum(1 - half) * (1 + abs(z)) / (1 - abs(z)))
    return BlaschkeValue(val, bound)


@dataclass(frozen=True)
class KernelVerdict:
    common_disk: bool
    inner_radius: float
    min_inner_radius: float
    steps: np.ndarray
    modulus: float
    converged: bool


def kernel_convergence_probe(snapshots: Sequence[Polygon], tol: float = 1e-2,
                             inner_radius: float | None = None) -> KernelVerdict:
    """Common-disk condition plus Cauchy behaviour of the boundaries."""
    if len(snapshots) < 2:
        raise InvalidInput("need at least two snapshots")
    rho = (geom.distance_to_boundary(snapshots[0], [0j])[0]
           if inner_radius is None else inner_radius)
    inner = []
    for p in snapshots:
        inside = bool(geom.contains(p, [0j])[0])
        inner.append(geom.distance_to_boundary(p, [0j])[0] if inside else 0.0)
    inner = np.array(inner)
    common = bool(np.all(inner >= rho * (1 - 1e-6)))
    steps = np.array([geom.boundary_hausdorff(a, b) for a, b in zip(snapshots[:-1], snapshots[1:])])
    k = max(2, len(snapshots) // 4)
    tail = snapshots[-k:]
    modulus = max(geom.boundary_hausdorff(a, tail[-1]) for a in tail)
    return KernelVerdict(common, float(rho), float(inner.min()), steps, float(modulus),
                         bool(modulus <= tol))
