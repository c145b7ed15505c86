"""Schwarz-Christoffel quadrature and parameter problem for disk maps.

The map of the unit disk onto a polygon with turning exponents ``beta`` is

    f(z) = w0 + C * int_0^z prod_k (1 - zeta/z_k)**beta_k d zeta

with prevertices ``z_k`` on the unit circle.  Integrals along straight paths
use a compound rule: a Gauss-Jacobi piece at a prevertex endpoint, then
Gauss-Legendre pieces no longer than their distance to the nearest
prevertex, which keeps every piece well inside its Bernstein ellipse.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.optimize import root
from scipy.special import roots_jacobi, roots_legendre

NODES = 12
_CHUNK = 2_000_000


@lru_cache(maxsize=None)
def _legendre(q: int):
    return roots_legendre(q)


@lru_cache(maxsize=4096)
def _jacobi(q: int, beta: float):
    # weight (1 + x)**beta on [-1, 1]: the singular end sits at x = -1
    return roots_jacobi(q, 0.0, beta)


def turning_exponents(w: np.ndarray) -> np.ndarray:
    """beta_k = -(turning angle at vertex k)/pi; they sum to -2 for a CCW polygon."""
    d_in = w - np.roll(w, 1)
    d_out = np.roll(w, -1) - w
    return -np.angle(d_out / d_in) / np.pi


def _segment_distance(zv, a, b):
    """Distance from each prevertex to the segment [a, b]."""
    d = b - a
    L2 = abs(d) ** 2
    if L2 == 0:
        return np.abs(zv - a)
    t = np.clip(((zv - a) * np.conj(d)).real / L2, 0.0, 1.0)
    return np.abs(zv - (a + t * d))


class PathRule:
    """Quadrature nodes for a batch of straight-path integrals.

    ``starts``/``ends`` are path endpoints; ``s_sing``/``e_sing`` give the
    prevertex index sitting at that endpoint, or -1.
    """

    def __init__(self, zv, beta, starts, s_sing, ends, e_sing, q=NODES):
        self.zv = np.asarray(zv, complex)
        self.beta = np.asarray(beta, float)
        n = len(self.zv)
        if n > 1:
            dd = np.abs(self.zv[:, None] - self.zv[None, :])
            np.fill_diagonal(dd, np.inf)
            self.dn = dd.min(axis=1)
        else:
            self.dn = np.full(n, 2.0)
        xl, wl = _legendre(q)
        self.q = q
        nodes, weights, owner, excl = [], [], [], []

        def regular(X, P, sign, k):
            while True:
                rem = abs(P - X)
                if rem <= 1e-15:
                    return
                u = (P - X) / rem
                step = rem
                if n:
                    step = min(rem, np.abs(self.zv - X).min())
                    while step > 1e-15 and _segment_distance(self.zv, X, X + step * u).min() < step:
                        step *= 0.5
                    step = max(step, 1e-15)
                Y = X + step * u
                nodes.append(X + (Y - X) * (1 + xl) / 2)
                weights.append(sign * (Y - X) / 2 * wl.astype(complex))
                owner.append(np.full(q, k))
                excl.append(np.full(q, -1))
                X = Y

        def singular(S, P, s, sign, k):
            L = abs(P - S)
            u = (P - S) / L
            h = min(L, 0.5 * self.dn[s])
            Y = S + h * u
            xj, wj = _jacobi(q, float(self.beta[s]))
            c = -(Y - S) / (2 * self.zv[s])
            with np.errstate(divide="ignore", invalid="ignore"):
                fac = (Y - S) / 2 * np.exp(self.beta[s] * np.log(c))
            nodes.append(S + (Y - S) * (1 + xj) / 2)
            weights.append(sign * fac * wj)
            owner.append(np.full(q, k))
            excl.append(np.full(q, s))
            if h < L:
                regular(Y, P, sign, k)

        for k, (A, sa, B, sb) in enumerate(zip(starts, s_sing, ends, e_sing)):
            if sa >= 0 and sb >= 0:
                M = 0.5 * (A + B)
                singular(A, M, sa, 1.0, k)
                singular(B, M, sb, -1.0, k)
            elif sa >= 0:
                singular(A, B, sa, 1.0, k)
            elif sb >= 0:
                singular(B, A, sb, -1.0, k)
            else:
                regular(A, B, 1.0, k)
        self.count = len(starts)
        self.nodes = np.concatenate(nodes) if nodes else np.empty(0, complex)
        self.weights = np.concatenate(weights) if weights else np.empty(0, complex)
        self.owner = np.concatenate(owner) if owner else np.empty(0, int)
        self.excl = np.concatenate(excl) if excl else np.empty(0, int)

    def integrate(self) -> np.ndarray:
        vals = self.weights * np.exp(log_integrand(self.nodes, self.zv, self.beta, self.excl))
        out = np.bincount(self.owner, vals.real, self.count) + 1j * np.bincount(self.owner, vals.imag, self.count)
        return out


def log_integrand(zeta, zv, beta, excl=None):
    """log prod_k (1 - zeta/z_k)**beta_k, optionally skipping one factor per point."""
    zeta = np.asarray(zeta, complex)
    if len(zv) == 0:
        return np.zeros(zeta.shape, complex)
    flat = zeta.ravel()
    res = np.empty(flat.shape, complex)
    zc = np.conj(zv)
    step = max(1, _CHUNK // len(zv))
    for s in range(0, len(flat), step):
        d = 1 - flat[s:s + step, None] * zc[None, :]
        re, im = d.real, d.imag
        with np.errstate(divide="ignore", invalid="ignore"):
            res[s:s + step] = 0.5 * (np.log(re * re + im * im) @ beta) + 1j * (np.arctan2(im, re) @ beta)
    if excl is not None:
        e = np.asarray(excl).ravel()
        hit = np.nonzero(e >= 0)[0]
        if hit.size:
            k = e[hit]
            with np.errstate(divide="ignore", invalid="ignore"):
                res[hit] -= beta[k] * np.log(1 - flat[hit] * zc[k])
    return res.reshape(zeta.shape)


def integrate_paths(zv, beta, starts, s_sing, ends, e_sing, q=NODES):
    return PathRule(zv, beta, starts, s_sing, ends, e_sing, q).integrate()


def integrate_from_zero(zv, beta, z, q=NODES):
    """int_0^z of the SC integrand for points z in the closed disk.

    Points that coincide with a prevertex are treated as singular endpoints.
    """
    z = np.atleast_1d(np.asarray(z, complex))
    sing = np.full(len(z), -1)
    if len(zv):
        dist = np.abs(z[:, None] - zv[None, :])
        j = dist.argmin(axis=1)
        hit = dist[np.arange(len(z)), j] < 1e-14
        sing[hit] = j[hit]
    return integrate_paths(zv, beta, np.zeros(len(z), complex), np.full(len(z), -1), z, sing, q)


def prevertices_from_params(u: np.ndarray) -> np.ndarray:
    """Prevertex angles from unconstrained gap parameters (z_0 = 1 fixed)."""
    ue = np.concatenate([u, [0.0]])
    ue = ue - ue.max()
    g = np.exp(ue)
    g = 2 * np.pi * g / g.sum()
    theta = np.concatenate([[0.0], np.cumsum(g[:-1])])
    return theta


def params_from_gaps(gaps: np.ndarray) -> np.ndarray:
    gaps = np.asarray(gaps, float)
    return np.log(gaps[:-1]) - np.log(gaps[-1])


def initial_gaps(w: np.ndarray, w0: complex) -> np.ndarray:
    """Rough prevertex spacing: angle each edge subtends as seen from ``w0``."""
    ang = np.unwrap(np.angle(w - w0))
    total = ang[-1] - ang[0] + np.angle((w[0] - w0) / (w[-1] - w0))
    gaps = np.diff(np.concatenate([ang, [ang[0] + total]]))
    floor = 1e-3 * 2 * np.pi / len(w)
    gaps = np.maximum(gaps, floor)
    return 2 * np.pi * gaps / gaps.sum()


class SCProblem:
    """Residual of the disk-map parameter problem for vertices ``w``."""

    def __init__(self, w: np.ndarray, w0: complex, q: int = NODES):
        self.w = np.asarray(w, complex)
        self.w0 = complex(w0)
        self.beta = turning_exponents(self.w)
        self.n = len(self.w)
        self.q = q
        side = np.abs(np.roll(self.w, -1) - self.w)
        self.log_side_ratio = np.log(side[1:self.n - 2] / side[0])
        self.scale = side[0]
        self.evals = 0

    def integrals(self, theta):
        zv = np.exp(1j * theta)
        n = self.n
        idx = np.arange(n)
        nxt = (idx + 1) % n
        starts = np.concatenate([zv, [0j]])
        ends = np.concatenate([zv[nxt], [zv[0]]])
        s_sing = np.concatenate([idx, [-1]])
        e_sing = np.concatenate([nxt, [0]])
        # only sides 0..n-3 and the centre path are needed
        keep = np.concatenate([np.arange(n - 2), [n]])
        rule = PathRule(zv, self.beta, starts[keep], s_sing[keep], ends[keep], e_sing[keep], self.q)
        vals = rule.integrate()
        return vals[:-1], vals[-1]

    def residual(self, u):
        self.evals += 1
        theta = prevertices_from_params(u)
        sides, centre = self.integrals(theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            r_len = np.log(np.abs(sides[1:]) / abs(sides[0])) - self.log_side_ratio
            C = (self.w[1] - self.w[0]) / sides[0]
            r_c = (self.w0 + C * centre - self.w[0]) / self.scale
        out = np.concatenate([r_len, [r_c.real, r_c.imag]])
        if not np.all(np.isfinite(out)):
            return np.full(out.shape, 1e3)
        return out

    def constant(self, theta):
        sides, _ = self.integrals(theta)
        return (self.w[1] - self.w[0]) / sides[0]


def _all_sides(prob, theta):
    zv = np.exp(1j * theta)
    n = prob.n
    idx = np.arange(n)
    nxt = (idx + 1) % n
    return integrate_paths(zv, prob.beta, zv, idx, zv[nxt], nxt, prob.q)


def davis(prob, gaps, iters=200, tol=1e-13):
    """Fixed-point update of prevertex gaps by the ratio of target to current side lengths.

    Matches side lengths only; the centre condition is handled afterwards.
    """
    side = np.abs(np.roll(prob.w, -1) - prob.w)
    best, best_err, stall = gaps, np.inf, 0
    for _ in range(iters):
        theta = np.concatenate([[0.0], np.cumsum(gaps[:-1])])
        s = np.abs(_all_sides(prob, theta))
        if not np.all(np.isfinite(s)) or s.min() <= 0:
            break
        s *= side.sum() / s.sum()
        err = float(np.abs(np.log(side / s)).max())
        if err < best_err * 0.999:
            best, best_err, stall = gaps, err, 0
        else:
            stall += 1
            if stall >= 8:
                break
        if err < tol:
            break
        gaps = gaps * (side / s)
        gaps = 2 * np.pi * gaps / gaps.sum()
        if gaps.min() <= 1e-300:
            break
    return best, best_err


def recentre(prob, theta, C, iters=50):
    """Move prevertices by a disk automorphism so that 0 maps to prob.w0."""
    zv = np.exp(1j * theta)
    f0 = prob.w[0] - C * integrate_from_zero(zv, prob.beta, zv[:1])[0]
    a = 0j
    for _ in range(iters):
        fa = f0 + C * integrate_from_zero(zv, prob.beta, [a])[0]
        d = C * np.exp(log_integrand(np.array([a]), zv, prob.beta)[0])
        da = (prob.w0 - fa) / d
        # keep the iterate inside the disk
        while abs(a + da) >= 1:
            da *= 0.5
        a = a + da
        if abs(da) < 1e-15:
            break
    z_new = (zv - a) / (1 - np.conj(a) * zv)
    ang = np.angle(z_new / z_new[0])
    return np.mod(ang, 2 * np.pi)


def solve(w, w0, gaps0=None, tol=1e-10, maxfev=None):
    """Solve for prevertex angles; returns (theta, C, beta, info)."""
    prob = SCProblem(w, w0)
    n = prob.n
    if gaps0 is None:
        gaps0 = initial_gaps(prob.w, w0)
    u0 = params_from_gaps(gaps0)
    best_u, best_norm = u0, float(np.abs(prob.residual(u0)).max())
    info = {"initial_residual": best_norm, "methods": []}

    def consider(u, label):
        nonlocal best_u, best_norm
        norm = float(np.abs(prob.residual(u)).max())
        info["methods"].append((label, norm))
        if norm < best_norm:
            best_u, best_norm = u, norm

    if best_norm > tol:
        gaps, _ = davis(prob, np.asarray(gaps0, float), tol=0.1 * tol)
        theta = np.concatenate([[0.0], np.cumsum(gaps[:-1])])
        try:
            with np.errstate(all="ignore"):
                theta = recentre(prob, theta, prob.constant(theta))
            g = np.diff(np.concatenate([theta, [2 * np.pi]]))
            if g.min() > 0:
                consider(params_from_gaps(g), "davis")
        except (FloatingPointError, ValueError, ZeroDivisionError):
            pass
    if best_norm > tol:
        maxfev = maxfev or 8 * (n + 1)
        for method, opts in (("hybr", {"xtol": 1e-13, "maxfev": maxfev}),
                             ("lm", {"xtol": 1e-13, "ftol": 1e-15, "maxiter": maxfev})):
            with np.errstate(all="ignore"):
                sol = root(prob.residual, best_u, method=method, options=opts)
            consider(sol.x, method)
            if best_norm <= tol:
                break
    theta = prevertices_from_params(best_u)
    C = prob.constant(theta)
    info.update(residual=best_norm, evals=prob.evals)
    return theta, C, prob.beta, info
