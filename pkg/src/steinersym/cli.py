"""Command-line front end.

Exit codes: 0 success (including expected findings), 2 input error,
3 precondition violation, 4 theorem violation beyond the error budget.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np

from . import __version__, conformal, dynamics, geom, symmetry, verify
from .errors import (ConstructionFailure, InvalidInput, PreconditionViolation, SteinerError,
                     StepFailure)
from .geom import Polygon

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_VIOLATION = 0, 2, 3, 4

log = logging.getLogger("steinersym")


class InputError(Exception):
    pass


# --- I/O helpers -----------------------------------------------------------

def load_polygon(path: str) -> Polygon:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("vertices")
    try:
        return Polygon.from_json(json.dumps(data))
    except (InvalidInput, ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def save_polygon(p: Polygon, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(p.to_json())


def resolve_polygon(args) -> tuple[str, Polygon, verify.Fixture | None]:
    if getattr(args, "fixture", None):
        try:
            fx = verify.get_fixtures([args.fixture])[0]
        except InvalidInput as exc:
            raise InputError(str(exc)) from exc
        return fx.name, fx.polygon, fx
    if getattr(args, "input", None):
        return os.path.basename(args.input), load_polygon(args.input), None
    raise InputError("give an input polygon file or --fixture NAME")


def _viewbox(polys, size=800, pad=40):
    pts = np.concatenate([p.z for p in polys])
    lo = complex(pts.real.min(), pts.imag.min())
    hi = complex(pts.real.max(), pts.imag.max())
    span = max(hi.real - lo.real, hi.imag - lo.imag, 1e-12)
    return lo, hi, (size - 2 * pad) / span


def svg_panels(panels: list[tuple[str, Polygon]], path: str, size: int = 800) -> float:
    """Panels side by side in one fixed size x size viewport; returns the scale (px per unit)."""
    k = len(panels)
    cell = size / k
    pad = 20
    lo, hi, _ = _viewbox([p for _, p in panels])
    span = max(hi.real - lo.real, hi.imag - lo.imag, 1e-12)
    scale = (cell - 2 * pad) / span
    cx, cy = 0.5 * (lo.real + hi.real), 0.5 * (lo.imag + hi.imag)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    for j, (title, p) in enumerate(panels):
        ox, oy = cell * (j + 0.5), size / 2

        def X(x):
            return ox + scale * (x - cx)

        def Y(y):
            return oy - scale * (y - cy)
        out.append(f'<line x1="{X(lo.real):.2f}" y1="{Y(0):.2f}" x2="{X(hi.real):.2f}" y2="{Y(0):.2f}" '
                   'stroke="#999" stroke-width="0.8"/>')
        out.append(f'<line x1="{X(0):.2f}" y1="{Y(lo.imag):.2f}" x2="{X(0):.2f}" y2="{Y(hi.imag):.2f}" '
                   'stroke="#999" stroke-width="0.8"/>')
        pts = " ".join(f"{X(x):.3f},{Y(y):.3f}" for x, y in p.vertices)
        out.append(f'<polygon points="{pts}" fill="#cde" stroke="#135" stroke-width="1"/>')
        out.append(f'<text x="{ox:.1f}" y="{pad + 10}" text-anchor="middle" font-size="14">{title}</text>')
    out.append(f'<text x="10" y="{size - 10}" font-size="12">scale {scale:.6g} px/unit</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
    return scale


def _stats(p: Polygon) -> dict:
    return {"area": geom.area(p), "perimeter": geom.perimeter(p), "diameter": geom.diameter(p),
            "vertices": len(p)}


def _parse_list(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("inf", "oo"):
            out.append(np.inf)
        elif tok:
            try:
                out.append(float(tok))
            except ValueError as exc:
                raise InputError(f"bad number {tok!r}") from exc
    return out


def _config(args, **extra) -> verify.HarnessConfig:
    kw = {"tol_map": args.tol_map, "tol_quadrature": args.tol_quadrature,
          "budget_multiplier": args.budget_multiplier, "seed": args.seed}
    kw.update(extra)
    return verify.HarnessConfig(**kw)


def _store(args) -> verify.MapStore:
    return verify.MapStore(args.tol_map, args.cache)


def _outdir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


# --- subcommands -------------------------------------------------------------

def cmd_symmetrize(args) -> int:
    name, p, _ = resolve_polygon(args)
    if args.mode == "steiner":
        q = symmetry.steiner_symmetrize(p)
    elif args.mode == "circular":
        q = symmetry.circular_symmetrize(p, args.radial_budget, args.vertex_budget)
    else:
        q = symmetry.exp_domain(p)
    out = args.out or f"{os.path.splitext(name)[0]}_{args.mode}.json"
    save_polygon(q, out)
    svg = args.svg or os.path.splitext(out)[0] + ".svg"
    scale = svg_panels([("input", p), (args.mode, q)], svg)
    a, b = _stats(p), _stats(q)
    for key in ("area", "perimeter", "diameter"):
        print(f"{key:10s} before {a[key]:.12g}  after {b[key]:.12g}  delta {b[key] - a[key]:+.3e}")
    print(f"vertices   before {a['vertices']}  after {b['vertices']}")
    print(f"wrote {out} and {svg} (scale {scale:.6g} px/unit)")
    return EXIT_OK


def cmd_map(args) -> int:
    name, p, _ = resolve_polygon(args)
    w0 = complex(args.w0.replace(" ", "")) if args.w0 else 0j
    m = conformal.build_map(p, w0, args.tol_map)
    out = args.out or f"{os.path.splitext(name)[0]}_map.json"
    m.save(out)
    print(f"f'(0) = {m.fprime0:.12g}")
    print(f"eps_b = {m.eps_b:.3e}  prevertices = {len(m.theta)}  solver = {m.diagnostics.get('solver')}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_means(args) -> int:
    name, p, fx = resolve_polygon(args)
    m = conformal.build_map(p, 0j, args.tol_map)
    rs, ps = _parse_list(args.r), _parse_list(args.p)
    rows = []
    for r in rs:
        for q in ps:
            res = conformal.hardy_mean(m, r, q)
            rows.append((r, q, res.value, res.error, res.nodes))
    out = args.out or f"{os.path.splitext(name)[0]}_means.csv"
    with open(out, "w") as fh:
        fh.write("r,p,mean,error,nodes\n")
        for r, q, v, e, n in rows:
            fh.write(f"{r!r},{'inf' if np.isinf(q) else repr(q)},{v!r},{e!r},{n}\n")
    for r, q, v, e, _ in rows:
        print(f"r={r:<6g} p={q:<6g} M={v:.12g}  (err {e:.1e})")
    for q in ps:
        iv = conformal.hardy_norm(m, q)
        print(f"||f||_{q:g} in [{iv.lo:.10g}, {iv.hi:.10g}]{'  (wide)' if iv.wide else ''}")
    print(f"boundary length {conformal.boundary_derivative_integral(m):.12g}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_deform(args) -> int:
    name, p, _ = resolve_polygon(args)
    outdir = _outdir(args.out)
    strategy = dynamics.AngleStrategy(args.strategy, _parse_list(args.angles) if args.angles else (),
                                      seed=args.seed)
    telemetry = os.path.join(outdir, "telemetry.jsonl")
    t0 = time.time()
    try:
        res = dynamics.run_deformation(p, args.alpha, strategy, max_steps=args.steps,
                                       hausdorff_tol=args.hausdorff, mode=args.mode,
                                       tol_map=min(args.tol_map, 1e-6), telemetry=telemetry,
                                       snapshots=bool(args.svg))
    except StepFailure as exc:
        print(f"step failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    s = res.summary()
    budget = 1e-3 * args.budget_multiplier
    lower = res.lower_bound
    # P(kG) = P(G)/k: an unshrunk start outside the class moves the upper bound to k
    upper = 1.0 if args.mode == "shrunk" else dynamics.into_class(p, args.alpha, 1e-6)[1]
    status = "pass"
    if s["product"] < lower - 3 * budget or s["product"] > upper + 3 * budget:
        status = "violation-found"
    elif s["product"] < lower - budget or s["product"] > upper + budget:
        status = "inconclusive"
    s.update({"product_upper": upper, "fixture": name, "strategy": strategy.config(), "product_bound_status": status,
              "wall_time": time.time() - t0, "telemetry": telemetry,
              "verdict": "stagnated" if res.stagnated else ("converged" if res.converged else "budget")})
    with open(os.path.join(outdir, "summary.json"), "w") as fh:
        json.dump(s, fh, indent=2, sort_keys=True, default=str)
    if args.svg:
        frames = res.snapshots
        pick = sorted({0, len(frames) // 2, len(frames) - 1})
        svg_panels([(f"step {i}", frames[i]) for i in pick], os.path.join(outdir, "filmstrip.svg"))
    print(f"steps {s['steps']}  converged {s['converged']}  stagnated {s['stagnated']}")
    print(f"hausdorff to disk {s['hausdorff']:.3e}  radius {s['radius']:.10g}")
    print(f"product {s['product']:.10g}  bound [{lower:.10g}, {upper:.10g}]  {status}")
    return EXIT_VIOLATION if status == "violation-found" else EXIT_OK


def _fixture_list(text: str | None):
    try:
        return verify.get_fixtures([t for t in text.split(",") if t] if text else None)
    except InvalidInput as exc:
        raise InputError(str(exc)) from exc


def run_verify(config: dict, outdir: str, cache=None) -> tuple[list, dict]:
    """Run a verify configuration and write verdicts.csv, summary.json, runrecord.json."""
    t0 = time.time()
    cfg = verify.HarnessConfig.from_dict(config["harness"])
    fixtures = _fixture_list(config.get("fixtures"))
    store = verify.MapStore(cfg.tol_map, cache)
    verdicts = verify.run_suite(config["suite"], fixtures, store, cfg)
    csv_text = verify.verdicts_to_csv(verdicts)
    csv_path = os.path.join(outdir, "verdicts.csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write(csv_text)
    summary = verify.write_summary(verdicts, os.path.join(outdir, "summary.json"))
    record = {
        "tool": "steinersym", "version": __version__, "command": "verify",
        "config": config,
        "fixture_hashes": {f.name: f.digest for f in fixtures},
        "outputs": {"verdicts": "verdicts.csv", "summary": "summary.json"},
        "verdicts_sha256": hashlib.sha256(csv_text.encode()).hexdigest(),
        "wall_time": time.time() - t0,
    }
    with open(os.path.join(outdir, "runrecord.json"), "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
    return verdicts, record | {"summary": summary}


def cmd_verify(args) -> int:
    cfg = _config(args)
    config = {"suite": args.suite, "fixtures": args.fixtures, "harness": cfg.as_dict()}
    outdir = _outdir(args.out)
    verdicts, rec = run_verify(config, outdir, args.cache)
    s = rec["summary"]
    for thm, counts in s["by_theorem"].items():
        print(f"{thm:28s} " + " ".join(f"{k}={v}" for k, v in counts.items() if v))
    for f in s["findings"]:
        print(f"finding: {f['theorem']} {f['fixture']} {f['params']}")
    print(f"wrote {outdir}/verdicts.csv ({len(verdicts)} rows), summary.json, runrecord.json")
    return EXIT_VIOLATION if s["hard_violations"] else EXIT_OK


def cmd_search_p0(args) -> int:
    cfg = _config(args, pmax=args.pmax, p0_radius=args.r)
    store = _store(args)
    fixtures = _fixture_list(args.fixture)
    outdir = _outdir(args.out)
    rows = []
    for fx in fixtures:
        res = verify.search_p0(fx, store, cfg)
        rows.append(res)
        if res.p_star is None:
            print(f"{fx.name:16s} no violation <= {args.pmax:g}")
        else:
            print(f"{fx.name:16s} p* = {res.p_star:.6g}  bracket [{res.bracket[0]:.6g}, {res.bracket[1]:.6g}]")
    found = [r.p_star for r in rows if r.p_star is not None]
    with open(os.path.join(outdir, "p0.csv"), "w") as fh:
        fh.write("fixture,r,p_star,lo,hi\n")
        for r in rows:
            if r.p_star is None:
                fh.write(f"{r.fixture},{r.r!r},none,,\n")
            else:
                fh.write(f"{r.fixture},{r.r!r},{r.p_star!r},{r.bracket[0]!r},{r.bracket[1]!r}\n")
    agg = {"r": args.r, "pmax": args.pmax, "lower": 2.0, "upper": min(found) if found else None,
           "found": {r.fixture: r.p_star for r in rows}}
    with open(os.path.join(outdir, "p0_summary.json"), "w") as fh:
        json.dump(agg, fh, indent=2, sort_keys=True)
    if found:
        print(f"empirical bracket for p0 at r={args.r:g}: [2, {min(found):.6g}]")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        with open(args.record) as fh:
            rec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read run record {args.record}: {exc}") from exc
    if rec.get("command") != "verify":
        raise InputError("only verify run records can be reported")
    base = os.path.dirname(os.path.abspath(args.record))
    sp = os.path.join(base, rec["outputs"]["summary"])
    if os.path.exists(sp):
        with open(sp) as fh:
            s = json.load(fh)
        print(f"suite {rec['config']['suite']}: {s['total']} verdicts, "
              f"{s['hard_violations']} hard violations")
        for thm, counts in s["by_theorem"].items():
            print(f"  {thm:28s} " + " ".join(f"{k}={v}" for k, v in counts.items() if v))
    if args.replay:
        outdir = _outdir(args.replay)
        _, new = run_verify(rec["config"], outdir, args.cache)
        same = new["verdicts_sha256"] == rec["verdicts_sha256"]
        print(f"replay {'identical' if same else 'DIFFERS'}: {new['verdicts_sha256'][:16]}")
        return EXIT_OK if same else 1
    return EXIT_OK


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-map", type=float, default=1e-4)
    common.add_argument("--tol-quadrature", type=float, default=1e-8)
    common.add_argument("--budget-multiplier", type=float, default=1.0)
    common.add_argument("--cache", default=None, help="directory for cached conformal maps")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="steinersym", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def poly_args(p, fixture=True):
        p.add_argument("input", nargs="?", help="polygon JSON file")
        if fixture:
            p.add_argument("--fixture", help="corpus fixture name instead of a file")

    p = sub.add_parser("symmetrize", parents=[common], help="Steiner, circular or exp image")
    poly_args(p)
    p.add_argument("--mode", choices=("steiner", "circular", "exp"), default="steiner")
    p.add_argument("--out")
    p.add_argument("--svg")
    p.add_argument("--radial-budget", type=int, default=512)
    p.add_argument("--vertex-budget", type=int, default=geom.DEFAULT_VERTEX_BUDGET)
    p.set_defaults(func=cmd_symmetrize)

    p = sub.add_parser("map", parents=[common], help="build and save a conformal map")
    poly_args(p)
    p.add_argument("--w0", help="base point as a Python complex literal, e.g. 0.1+0.2j")
    p.add_argument("--out")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("means", parents=[common], help="integral means table")
    poly_args(p)
    p.add_argument("--r", default="0.5,0.9,0.99")
    p.add_argument("--p", default="2,4,inf")
    p.add_argument("--out")
    p.set_defaults(func=cmd_means)

    p = sub.add_parser("deform", parents=[common], help="rotate-and-symmetrize dynamics")
    poly_args(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--strategy", default="greedy-diameter",
                   choices=("greedy-diameter", "golden-angle", "uniform-random", "fixed-list"))
    p.add_argument("--angles", help="comma list for the fixed-list strategy")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--mode", choices=("shrunk", "unshrunk"), default="unshrunk")
    p.add_argument("--hausdorff", type=float, default=1e-2)
    p.add_argument("--svg", action="store_true", help="write a three-frame filmstrip")
    p.add_argument("--out", default="deform_out")
    p.set_defaults(func=cmd_deform)

    p = sub.add_parser("verify", parents=[common], help="run inequality suites")
    p.add_argument("--suite", default="all", choices=verify.SUITES + ("all",))
    p.add_argument("--fixtures", help="comma list of fixture names (default: corpus)")
    p.add_argument("--out", default="verify_out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search-p0", parents=[common], help="critical exponent search")
    p.add_argument("--fixture", help="comma list of fixture names (default: corpus)")
    p.add_argument("--r", type=float, default=0.9)
    p.add_argument("--pmax", type=float, default=200.0)
    p.add_argument("--out", default="p0_out")
    p.set_defaults(func=cmd_search_p0)

    p = sub.add_parser("report", parents=[common], help="summarize or replay a run record")
    p.add_argument("record")
    p.add_argument("--replay", metavar="DIR", help="re-run the record into DIR and compare bytes")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PreconditionViolation as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InputError, InvalidInput, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConstructionFailure as exc:
        print(f"map construction failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except SteinerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
