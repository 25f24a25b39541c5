"""End-to-end acceptance checks, one test per release criterion.

Each test prints a single "[criterion N] PASS/FAIL ..." line (visible
even under pytest's output capture) so a full run reads as a checklist,
and asserts the stated numeric tolerances together with the wall-clock
budget for that criterion.  Every Monte Carlo check below is seeded, so
a pass is reproducible bit for bit.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
import sys
import time

import numpy as np
from scipy.integrate import cumulative_trapezoid

from heatgauge.diffusion import SimConfig, simulate, simulate_coupled
from heatgauge.estimators import heat_op, heat_op_mc
from heatgauge.geometry import catalog_lookup, get_geometry
from heatgauge.measure import contraction_sweep
from heatgauge.verifier import default_config, hyper_q, run_suite


def _finish(capsys, num, label, start, budget, problems, detail):
    """Print the one-line verdict for a criterion and assert it."""
    elapsed = time.perf_counter() - start
    if elapsed > budget:
        problems.append(f"took {elapsed:.1f}s, budget {budget:.0f}s")
    status = "PASS" if not problems else "FAIL"
    tail = detail if not problems else "; ".join(problems)
    line = (f"[criterion {num}] {status} {label}: {tail} "
            f"({elapsed:.1f}s / {budget:.0f}s)")
    with capsys.disabled():
        print(line, flush=True)
    assert not problems, line


def test_criterion_1_finite_contraction_sweep(capsys):
    start = time.perf_counter()
    problems = []
    rep = contraction_sweep(n_instances=1000, seed=0)
    expected_p = {1.0, 1.5, 2.0, 3.0, 10.0, math.inf}
    if set(rep["worst_margin"]) != expected_p:
        problems.append(f"exponent grid was {sorted(rep['worst_margin'])}")
    worst = min(rep["worst_margin"].values())
    if worst < -1e-12:
        problems.append(f"worst contraction margin {worst:.3e} < -1e-12")
    if rep["worst_mass_error"] > 1e-12:
        problems.append(f"mass error {rep['worst_mass_error']:.3e} > 1e-12")
    if rep["worst_duality_error"] > 1e-12:
        problems.append(
            f"duality error {rep['worst_duality_error']:.3e} > 1e-12")
    _finish(capsys, 1, "finite contraction sweep", start, 10.0, problems,
            f"1000 instances x 6 exponents, worst margin {worst:.1e}, "
            f"mass error {rep['worst_mass_error']:.1e}, "
            f"duality error {rep['worst_duality_error']:.1e}")


def test_criterion_2_hypercontractive_exponent(capsys):
    start = time.perf_counter()
    problems = []
    q = hyper_q(2.0, 0.5, 1.0, 0.0)
    if q != 3.0:
        problems.append(f"flat-limit exponent {q!r} != 3.0")
    rows = {r.claim: r for r in run_suite(
        default_config("hypercontractivity", geometry="euclidean:1"))}
    main = rows["hypercontractivity/euclidean:1/exp:a=1/t=0.5"]
    gap = abs(main.lhs - main.rhs)
    if gap > 1e-10:
        problems.append(f"extremal equality gap {gap:.3e} > 1e-10")
    ctrl = rows["hypercontractivity/euclidean:1/exp:a=1/control/inflated-q"]
    if ctrl.verdict != "FAIL":
        problems.append(f"inflated-exponent control verdict {ctrl.verdict}")
    _finish(capsys, 2, "hypercontractive exponent", start, 1.0, problems,
            f"q={q:g} at the flat limit, extremal equality gap {gap:.1e}, "
            f"q*1.05 control FAILs")


def test_criterion_3_harmonic_fixed_points(capsys):
    start = time.perf_counter()
    problems = []

    # Flat plane: quadrature reproduces a harmonic coordinate exactly.
    geom2 = get_geometry("euclidean:2")
    f2 = catalog_lookup(geom2, "x1")
    x2 = (0.7, -0.4)
    worst_flat = 0.0
    for t in (0.25, 0.5, 1.0):
        est = heat_op(geom2, f2, x2, t, method="quadrature")
        worst_flat = max(worst_flat, abs(est.value - f2(x2)))
    if worst_flat > 1e-10:
        problems.append(f"flat quadrature deviation {worst_flat:.3e} > 1e-10")

    # Hyperbolic half-space: sampled means of harmonic functions return
    # the starting value within 3 stderr plus a step-bias allowance read
    # off a coupled fine/coarse run at the same step size.
    geom3 = get_geometry("hyperbolic3")
    x3 = geom3.point((0.0, 0.0, 1.0))
    t = 1.0
    batch3 = simulate(geom3, x3, t, SimConfig(100_000, seed=11, dt=t / 2048))
    fine, coarse = simulate_coupled(
        geom3, x3, t, SimConfig(20_000, seed=12, dt=t / 2048))
    notes = [f"flat dev {worst_flat:.1e}"]
    for name in ("half_space_angle", "poisson_kernel_sq"):
        f = catalog_lookup(geom3, name)
        est = heat_op_mc(f, batch3)
        gap = f(fine.points) - f(coarse.points)
        allowance = (abs(float(gap.mean()))
                     + 3.0 * float(gap.std(ddof=1)) / math.sqrt(gap.size))
        dev = abs(est.value - f(x3))
        bound = 3.0 * est.stderr + allowance
        notes.append(f"{name} dev {dev:.1e} vs {bound:.1e}")
        if dev > bound:
            problems.append(f"hyperbolic {name}: deviation {dev:.3e} exceeds "
                            f"3 stderr + step allowance {bound:.3e}")

    # Heisenberg group: harmonic polynomials at a non-central point.
    geomh = get_geometry("heisenberg")
    xh = geomh.point((1.0, 0.0, 0.0))
    batchh = simulate(geomh, xh, t, SimConfig(100_000, seed=13))
    hits = 0
    for name in ("z", "x*y", "x^2-y^2"):
        f = catalog_lookup(geomh, name)
        est = heat_op_mc(f, batchh)
        dev = abs(est.value - f(xh))
        if dev > 3.0 * est.stderr:
            problems.append(f"heisenberg {name}: deviation {dev:.3e} > "
                            f"3 stderr {3.0 * est.stderr:.3e}")
        else:
            hits += 1
    notes.append(f"heisenberg {hits}/3 within 3 stderr")
    _finish(capsys, 3, "harmonic fixed points", start, 180.0, problems,
            "; ".join(notes))


def test_criterion_4_norm_growth_in_time(capsys):
    start = time.perf_counter()
    problems = []
    rows = {r.claim: r for r in run_suite(default_config("norm-monotonicity"))}

    lo = rows["norm-monotonicity/euclidean:1/x1/0.25<=0.5"]
    hi = rows["norm-monotonicity/euclidean:1/x1/0.5<=1"]
    if lo.rhs != hi.lhs:
        problems.append("flat norm at t=0.5 differs between adjacent rows")
    norms = {0.25: lo.lhs, 0.5: hi.lhs, 1.0: hi.rhs}
    worst = max(abs(v - math.sqrt(tau)) for tau, v in norms.items())
    if worst > 1e-12:
        problems.append(f"flat norms deviate from sqrt(t) by {worst:.3e}")

    heis = [r for r in rows.values() if r.geometry == "heisenberg"]
    pairs = [r for r in heis if "<=" in r.claim]
    if len(pairs) != 2:
        problems.append(f"expected 2 ordered group pairs, got {len(pairs)}")
    for r in pairs:
        if not r.ok() or r.margin <= 0.0:
            problems.append(
                f"{r.claim}: verdict {r.verdict}, margin {r.margin:.3e}")
    for r in heis:
        if "/value/" in r.claim and not r.ok():
            problems.append(f"{r.claim}: verdict {r.verdict}")
    _finish(capsys, 4, "norm growth in time", start, 120.0, problems,
            f"flat norms match sqrt(t) to {worst:.1e}; "
            f"group ordering strict and within CI")


def test_criterion_5_pointwise_kernel_comparison(capsys):
    start = time.perf_counter()
    problems = []
    cfg = default_config("harnack-liyau")
    if cfg.n_paths < 10_000:
        problems.append(f"default tuple count {cfg.n_paths} < 10000")
    rows = run_suite(cfg)
    geoms = {r.geometry for r in rows}
    if geoms != {"euclidean:3", "hyperbolic3"}:
        problems.append(f"geometries covered: {sorted(geoms)}")
    checked = 0
    for r in rows:
        if r.control:
            if r.verdict != "FAIL":
                problems.append(f"{r.claim}: control verdict {r.verdict}")
            continue
        checked += 1
        if r.verdict != "PASS-exact":
            problems.append(f"{r.claim}: verdict {r.verdict}")
        if "relative: 0/" not in r.notes:
            problems.append(f"{r.claim}: {r.notes}")
    _finish(capsys, 5, "pointwise kernel comparison", start, 30.0, problems,
            f"{checked} claim rows x {cfg.n_paths} random tuples, "
            f"zero violations beyond 1e-9 relative; controls FAIL")


def test_criterion_6_pointwise_growth_envelopes(capsys):
    start = time.perf_counter()
    problems = []
    rows = run_suite(default_config("pointwise-bounds"))
    bad = [r.claim for r in rows if not r.ok()]
    if bad:
        problems.append(f"{len(bad)} rows off expectation, e.g. {bad[:3]}")
    flat_x = {r.x for r in rows if r.geometry == "euclidean:1"
              and not r.control}
    if not {-4.0, 4.0} <= flat_x:
        problems.append(f"flat grid misses distance 4 (max {max(flat_x)})")
    hyp_d = {r.x for r in rows if r.geometry == "hyperbolic3"
             and not r.control}
    if max(hyp_d) != 4.0:
        problems.append(f"hyperbolic grid tops out at {max(hyp_d)}")
    heis = [r for r in rows if r.geometry == "heisenberg" and not r.control]
    pts = {r.claim.rsplit("pt=", 1)[-1] for r in heis}
    mults = {r.provenance.get("multiplier") for r in heis}
    if len(pts) != 50:
        problems.append(f"{len(pts)} group points, expected 50")
    if mults != {5.0}:
        problems.append(f"group envelope multiplier {mults}, expected 5")
    _finish(capsys, 6, "pointwise growth envelopes", start, 180.0, problems,
            f"{len(rows)} rows pass; flat and hyperbolic grids reach "
            f"distance 4; 50 group points with multiplier 5")


def test_criterion_7_curvature_condition(capsys):
    start = time.perf_counter()
    problems = []
    cfg = default_config("cd-check")
    if cfg.n_paths < 500:
        problems.append(f"random sweep size {cfg.n_paths} < 500")
    rows = {r.claim: r for r in run_suite(cfg)}
    for claim in ("cd-check/frame/[Y1,Y2]=Z", "cd-check/frame/[Y1,Z]=0",
                  "cd-check/frame/[Y2,Z]=0"):
        r = rows[claim]
        if r.verdict != "PASS-exact" or r.lhs != 0.0 or r.rhs != 0.0:
            problems.append(
                f"{claim}: lhs={r.lhs!r} rhs={r.rhs!r} {r.verdict}")
    sweep = rows["cd-check/random-sweep"]
    if sweep.rhs < -1e-9:
        problems.append(f"sweep min margin {sweep.rhs:.3e} < -1e-9")
    witness = rows["cd-check/witness/z-at-origin"]
    if abs(witness.rhs) > 1e-12:
        problems.append(f"vertical witness margin {witness.rhs:.3e} > 1e-12")
    named_bad = [c for c, r in rows.items()
                 if c.startswith("cd-check/named/") and not r.ok()]
    if named_bad:
        problems.append(f"named functions fail: {named_bad}")
    ctrl = rows["cd-check/control/inflated-rho2"]
    if ctrl.verdict != "FAIL":
        problems.append(f"inflated-rho2 control verdict {ctrl.verdict}")
    _finish(capsys, 7, "curvature condition margins", start, 30.0, problems,
            f"commutator table exact, sweep min margin {sweep.rhs:.2e}, "
            f"vertical witness margin {witness.rhs:.1e}")


def test_criterion_8_sampler_fidelity(capsys):
    start = time.perf_counter()
    problems = []
    t = 1.0

    # Group moments at one million paths.
    geomh = get_geometry("heisenberg")
    batchh = simulate(geomh, geomh.origin(), t, SimConfig(1_000_000, seed=8))
    notes = []
    for name, vals, target in (
            ("E[X^2]", batchh.points[:, 0] ** 2, t),
            ("E[Z^2]", batchh.points[:, 2] ** 2, t * t / 4.0)):
        mean = float(vals.mean())
        se = float(vals.std(ddof=1)) / math.sqrt(vals.size)
        dev = abs(mean - target)
        notes.append(f"{name} dev {dev:.1e} vs 3se {3.0 * se:.1e}")
        if dev > 3.0 * se:
            problems.append(f"{name} = {mean:.6f}, target {target:g}, "
                            f"3 stderr {3.0 * se:.2e}")

    # Hyperbolic radial law: the distribution error halves with the step.
    geom3 = get_geometry("hyperbolic3")
    o = geom3.origin()
    grid = np.linspace(0.0, 14.0, 28001)
    pdf = np.array([geom3.radial_density(t, r) * geom3.sphere_area(r)
                    for r in grid[1:]])
    cdf = cumulative_trapezoid(np.concatenate([[0.0], pdf]), grid,
                               initial=0.0)
    cdf /= cdf[-1]
    ks = []
    for div in (4, 8, 16):
        b = simulate(geom3, o, t, SimConfig(400_000, seed=21, dt=t / div))
        d = np.sort(geom3.distance_to_batch(o, b.points))
        n = d.size
        f_at = np.interp(d, grid, cdf)
        ks.append(max(float(np.max(f_at - np.arange(n) / n)),
                      float(np.max(np.arange(1, n + 1) / n - f_at))))
    ratios = (ks[0] / ks[1], ks[1] / ks[2])
    for ratio in ratios:
        if not 1.35 <= ratio <= 3.0:
            problems.append(f"KS ratio {ratio:.2f} outside [1.35, 3.0] "
                            f"(KS distances {[f'{k:.4f}' for k in ks]})")
    _finish(capsys, 8, "sampler fidelity", start, 300.0, problems,
            "; ".join(notes) + f"; KS {ks[0]:.4f} -> {ks[1]:.4f} -> "
            f"{ks[2]:.4f}, ratios {ratios[0]:.2f} and {ratios[1]:.2f}")


def test_criterion_9_thread_count_reproducibility(tmp_path, capsys):
    start = time.perf_counter()
    problems = []
    env = dict(os.environ)
    args = ["--suite", "semigroup-contraction", "--suite", "harnack-liyau",
            "--seed", "3"]
    payloads = {}
    for tag, threads in (("t1", "1"), ("t4", "4"), ("t4-again", "4")):
        out_dir = tmp_path / tag
        env["HEATGAUGE_THREADS"] = threads
        proc = subprocess.run(
            [sys.executable, "-m", "heatgauge.verifier.cli", "run",
             "--out", str(out_dir)] + args,
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            problems.append(f"threads={threads}: exit {proc.returncode}: "
                            f"{proc.stderr[:160]}")
            continue
        payloads[tag] = ((out_dir / "report.json").read_bytes(),
                         (out_dir / "rows.csv").read_bytes())
    if len(payloads) == 3:
        if payloads["t4"] != payloads["t4-again"]:
            problems.append("re-run with identical config differs")
        if payloads["t1"] != payloads["t4"]:
            problems.append("1-thread and 4-thread reports differ")
        n_rows = len(json.loads(payloads["t1"][0].decode())["rows"])
    else:
        n_rows = 0
    _finish(capsys, 9, "thread-count reproducibility", start, 120.0,
            problems, f"{n_rows} rows bitwise identical across re-run "
            f"and across 1 vs 4 threads")
