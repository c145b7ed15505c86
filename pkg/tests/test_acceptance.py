"""Acceptance criteria 1-11, one test each.

Every test records a one-line PASS/FAIL summary, printed at the end of the
pytest run.  Criteria 3, 4, 7, 8, 10 and 11 share a single full ``verify``
run (about ten minutes on one core) and its replay.
"""
import csv
import json

import numpy as np
import pytest
from scipy.integrate import quad

from steinersym import cli, conformal as cf, dynamics as dy, geom, symmetry, verify as V
from steinersym.geom import Polygon

from conftest import CRITERIA


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    CRITERIA[n] = line
    print(line)
    assert ok, line


def params(row):
    return dict(kv.split("=", 1) for kv in row["params"].split(";") if kv)


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    base = tmp_path_factory.mktemp("verify_all")
    cache = base / "maps"
    out = base / "run"
    out.mkdir()
    config = {"suite": "all", "fixtures": None, "harness": V.HarnessConfig().as_dict()}
    cli.run_verify(config, str(out), str(cache))
    with open(out / "verdicts.csv") as fh:
        rows = list(csv.DictReader(fh))
    return {"dir": out, "cache": cache, "rows": rows, "base": base}


def rows_of(run, *theorems):
    return [r for r in run["rows"] if r["theorem"] in theorems]


@pytest.fixture(scope="module")
def square_unshrunk():
    return dy.run_deformation(Polygon.rectangle(-1, -1, 1, 1), 1.0,
                              dy.AngleStrategy("greedy-diameter"), max_steps=200)


@pytest.fixture(scope="module")
def shrunk_runs():
    sq = Polygon.rectangle(-1, -1, 1, 1)
    ident = dy.product_identity_check(sq, 1.0, steps=12)
    disk = dy.run_deformation(Polygon.regular(256, 2.0), 1.0, max_steps=3, mode="shrunk",
                              hausdorff_tol=0.0)
    tri = dy.run_deformation(V.get_fixtures(["triangle"])[0].polygon, 1.0, max_steps=12,
                             mode="shrunk", hausdorff_tol=0.0)
    return {"identity": ident, "square": ident["shrunk"], "disk": disk, "triangle": tri}


def test_criterion_01_symmetrization_exactness():
    worst = {"area": 0.0, "perimeter": np.inf, "diameter": np.inf}
    fxs = V.corpus()
    for fx in fxs:
        p = fx.polygon
        S = symmetry.steiner_symmetrize(p)
        worst["area"] = max(worst["area"], abs(geom.area(S) - geom.area(p)) / geom.area(p))
        worst["perimeter"] = min(worst["perimeter"], geom.perimeter(p) - geom.perimeter(S))
        worst["diameter"] = min(worst["diameter"], geom.diameter(p) - geom.diameter(S))
    ok = (len(fxs) >= 12 and worst["area"] <= 1e-9 and worst["perimeter"] >= -1e-9
          and worst["diameter"] >= -1e-9)
    record(1, ok, f"{len(fxs)} fixtures; max area drift {worst['area']:.1e}, "
                  f"min perimeter margin {worst['perimeter']:.3g}, "
                  f"min diameter margin {worst['diameter']:.3g}")


def test_criterion_02_conformal_oracles():
    integral, _ = quad(lambda t: (1 - t ** 4) ** -0.5, 0, 1, limit=200)
    oracle = 1 / integral
    sq = cf.build_map(Polygon.from_complex(np.array([1, 1j, -1, -1j])), 0j, 1e-6)
    R = 2.0
    disk = cf.build_map(Polygon.regular(256, R), 0j, 1e-6)
    a = cf.taylor_coefficients(disk, 256, samples=8192).a
    resid = max(abs(a[0]), np.abs(a[2:]).max())
    ok = (abs(sq.fprime0 - oracle) < 1e-3 and 0.999 * R <= disk.fprime0 <= R
          and abs(a[1] - disk.fprime0) < 1e-6 and resid < 1e-6)
    record(2, ok, f"square f'(0) {sq.fprime0:.8f} vs {oracle:.8f}; disk a1 {a[1].real:.6f} "
                  f"(R={R}), other coefficients <= {resid:.1e}")


def test_criterion_03_p2_gate(full_run):
    rows = rows_of(full_run, "thm2.7-p2")
    radii = {float(params(r)["r"]) for r in rows}
    fixtures = {r["fixture"] for r in rows}
    bad = [r for r in rows if r["status"] == V.VIOLATION]
    ok = (not bad and radii == set(V.R_GRID)
          and {fx.name for fx in V.corpus()} <= fixtures)
    record(3, ok, f"{len(rows)} rows over {len(fixtures)} fixtures x {len(radii)} radii; "
                  f"{len(bad)} violations")


def test_criterion_04_p0_bracket(full_run):
    rows = rows_of(full_run, "p0-search")
    found = {r["fixture"]: float(params(r)["p_star"]) for r in rows if "p_star" in params(r)}
    p2_bad = [r for r in rows_of(full_run, "thm2.7-p2") if r["status"] == V.VIOLATION]
    finger = found.get("finger")
    ok = (finger is not None and 2 < finger <= 200 and not p2_bad
          and all(p > 2 for p in found.values()))
    lo = min(found.values()) if found else None
    record(4, ok, f"finger p* = {finger}; empirical bracket p0 in [2, {lo:.4g}] "
                  f"(found on {sorted(found)})")


def test_criterion_05_deformation(square_unshrunk):
    res = square_unshrunk
    drift = max(abs(h.area - 4.0) / 4.0 for h in res.state.history)
    R = np.sqrt(4.0 / np.pi)
    ok = (res.converged and res.state.step <= 200 and res.hausdorff < 1e-2 and drift < 1e-6
          and abs(res.radius - R) < 1e-12)
    record(5, ok, f"square converged in {res.state.step} steps, Hausdorff {res.hausdorff:.2e} "
                  f"to radius {R:.6f}, area drift {drift:.1e}")


def test_criterion_06_product_bounds(shrunk_runs):
    worst = np.inf
    for name in ("square", "disk", "triangle"):
        run = shrunk_runs[name]
        prods = np.cumprod(run.state.factors)
        worst = min(worst, (prods - run.lower_bound).min() + 1e-3, (1 + 1e-3 - prods).min())
    resid = shrunk_runs["identity"]["residual"]
    d = shrunk_runs["disk"]
    sharp = abs(d.state.product - d.lower_bound)
    ok = worst >= 0 and resid < 1e-3 and sharp < 1e-3
    record(6, ok, f"bounds slack >= {worst:.2e}; identity residual {resid:.1e}; "
                  f"disk product {d.state.product:.6f} vs bound {d.lower_bound:.6f}")


def test_criterion_07_norm_chain(full_run):
    names = ("thm3.8", "lemma3.10", "thm4.3", "thm4.3-boundary", "thm4.4")
    rows = rows_of(full_run, *names)
    bad = [r for r in rows if r["status"] != V.PASS]
    lin = [r for r in rows if r["fixture"] == "alpha_z" and float(params(r)["p"]) == 2.0]
    eq = max(abs(float(r["margin"])) / float(r["rhs"]) for r in lin) if lin else np.inf
    sharp = all(r["flag"] == "sharp" for r in lin)
    ok = not bad and bool(lin) and eq <= 1e-6 and sharp
    record(7, ok, f"{len(rows)} norm rows, {len(bad)} not passing; alpha z at p=2: "
                  f"{len(lin)} rows, rel gap {eq:.1e}, sharp flag {sharp}")


def test_criterion_08_real_part_suite(full_run):
    comm = rows_of(full_run, "prop6.1-commute")
    rects = {fx.name for fx in V.corpus() if "rect" in fx.tags}
    comm_ok = {r["fixture"] for r in comm} == rects and all(
        float(r["lhs"]) < 2e-2 and r["status"] == V.PASS for r in comm)
    rows = rows_of(full_run, "thm6.2", "cor6.3-sup", "rem6.4-range")
    bad = [r for r in rows if r["status"] != V.PASS]
    kinds = {params(r)["phi"].rsplit("-", 1)[0] for r in rows if r["theorem"] == "thm6.2"}
    rescaled = {r["fixture"] for r in rows if float(params(r).get("scale", 1)) < 1}
    ok = (comm_ok and not bad and {"exp", "plus-power", "exp-plus-power", "entire-series"} <= kinds
          and "tall_rect" in rescaled)
    hmax = max(float(r["lhs"]) for r in comm)
    record(8, ok, f"commutation max Hausdorff {hmax:.1e} on {len(comm)} rectangles; "
                  f"{len(rows)} real-part rows, {len(bad)} not passing; rescaled {sorted(rescaled)}")


def test_criterion_09_blaschke(square_unshrunk, shrunk_runs):
    runs = [square_unshrunk, shrunk_runs["square"], shrunk_runs["triangle"],
            shrunk_runs["identity"]["unshrunk"]]
    gaps, verdicts = [], []
    for run in runs:
        c = run.state.factors
        gaps.append(abs(-np.log(run.state.product) - np.sum(np.log(1 / c))))
        if len(c) >= 10:
            verdicts.append(dy.blaschke_condition(run.state.history, run.state.product).verdict)
    n = np.arange(2, 2002, dtype=float)  # n = 1 would put a zero at the origin
    c = 1 - 1 / n ** 2
    drift = abs(dy.blaschke_eval(c[:1000], 0.5).value - dy.blaschke_eval(c, 0.5).value)
    ok = (max(gaps) <= 1e-12 and verdicts and all(v in ("bounded", "cauchy") for v in verdicts)
          and drift < 1e-6)
    record(9, ok, f"log identity gap {max(gaps):.1e}; partial sums {verdicts}; "
                  f"prefix-doubling drift {drift:.1e}")


def test_criterion_10_coefficient_dichotomy(full_run):
    area = rows_of(full_run, "area-identity")
    area_ok = all(float(r["lhs"]) <= float(r["rhs"]) for r in area)
    dich = {r["fixture"]: r["flag"] for r in rows_of(full_run, "thm2.2-dichotomy")}
    mixed = {k: v for k, v in dich.items() if v.startswith("mixed")}
    ok = (area_ok and len(area) == 2 * len(V.corpus()) and bool(mixed)
          and dich.get("disk256", "").startswith("all-equal"))
    example = next(iter(mixed.items())) if mixed else None
    record(10, ok, f"area identity within 1% on {len(area)} maps; {len(mixed)} mixed "
                   f"(e.g. {example}); disk256 {dich.get('disk256')}")


def test_criterion_11_replay(full_run):
    rec = full_run["dir"] / "runrecord.json"
    replay = full_run["base"] / "replay"
    code = cli.main(["report", str(rec), "--replay", str(replay), "--cache", str(full_run["cache"])])
    a = (full_run["dir"] / "verdicts.csv").read_bytes()
    b = (replay / "verdicts.csv").read_bytes()
    sha = json.loads(rec.read_text())["verdicts_sha256"]
    ok = code == 0 and a == b
    record(11, ok, f"replayed {len(full_run['rows'])} verdict rows, bytes identical {a == b}, "
                   f"sha256 {sha[:16]}")
