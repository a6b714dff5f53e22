"""Acceptance criteria, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (also collected in
the pytest terminal summary) and then asserts the criterion as stated.
"""

from __future__ import annotations

import math
import time

import numpy as np

from univcheck import cli
from univcheck import criteria as cr
from univcheck import extension as ex
from univcheck import functions as fc
from univcheck import loewner as lw
from univcheck import oracle as orc
from univcheck.config import RunConfig
from univcheck.errors import ParameterError
from univcheck.grid import DiskGrid
from univcheck.pipeline import EXIT_INCONSISTENT, TIMING_FILE, run

from conftest import ACCEPTANCE, non_univalent_corpus, univalent_corpus

BECKER = cr.CriterionParams(alpha=1, beta=0, A=1, B=1)
FULL_GRID = DiskGrid(128, 256)  # 32768 points

# Catalog specs of the shipped corpus, as given on the command line.
CORPUS_SPECS = {
    "identity": "identity",
    "koebe": "koebe",
    "z/(1-z)": "z_over_one_minus_cz:1",
    "z exp(z/2)": "z_exp_cz:0.5",
    "z exp(-z/2)": "z_exp_cz:-0.5",
    "z+0.25z^2": "polynomial:0:1:0.25",
    "z+0.1z^2": "polynomial:0:1:0.1",
    "z-0.2iz^2": "polynomial:0:1:0,-0.2",
}
BAD_SPECS = {"z+z^2": "polynomial:0:1:1", "z+2z^3": "polynomial:0:1:0:2"}


def record(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {title}: {detail}"
    ACCEPTANCE[n] = line
    print(line)
    assert ok, line


def becker_quantity(f, z):
    j = fc.eval_jet(f, z)
    return (1 - np.abs(z) ** 2) * np.abs(z * j.d2 / j.d1)


def test_criterion_01_becker_reduction():
    names = ["identity", "koebe", "z/(1-z)", "z exp(z/2)", "z+0.25z^2", "z-0.2iz^2"]
    corpus = univalent_corpus()
    z = FULL_GRID.points()
    t0 = time.perf_counter()
    worst = 0.0
    for name in names:
        f = corpus[name]
        g = fc.derivative(f)
        e = cr.rhs_bounds(1, 1)[1] - cr.margin_condition2(f, g, BECKER, z)
        worst = max(worst, float(np.max(np.abs(e - becker_quantity(f, z)))))
    dt = time.perf_counter() - t0
    record(
        1,
        "Becker reduction of |E|",
        worst <= 1e-12 and dt < 5,
        f"max deviation {worst:.2e} over {len(names)} x {z.size} points in {dt:.2f} s",
    )


def test_criterion_02_koebe_negative_control():
    koebe = fc.preset("koebe")
    t0 = time.perf_counter()
    rep = cr.check(koebe, "becker")
    m = cr.margin_condition2(koebe, fc.derivative(koebe), BECKER, 0.9)
    dt = time.perf_counter() - t0
    ok = rep.verdict == cr.VIOLATION and m <= 1 - 5.22 + 1e-9 and dt < 1
    record(2, "Koebe fails Becker", ok, f"verdict {rep.verdict}, margin at 0.9 = {m:.12f}, {dt:.2f} s")


def test_criterion_03_identity_chain_closed_form():
    ctx = lw.ChainContext.build(fc.preset("identity"), fc.preset("constant_one"), cr.CriterionParams())
    z = lw.DIAGNOSTIC_GRID.points()
    dev_l = max(float(np.max(np.abs(lw.chain_value(ctx, z, t) - math.exp(t) * z))) / math.exp(t) for t in lw.T_SAMPLES)
    dev_a = max(abs(lw.coefficient_a1(ctx.params, t) - math.exp(t)) / math.exp(t) for t in lw.T_SAMPLES)
    record(
        3,
        "identity chain is e^t z",
        dev_l <= 1e-12 and dev_a <= 1e-12,
        f"max relative deviation {dev_l:.2e} (chain), {dev_a:.2e} (a1) over t in {lw.T_SAMPLES}",
    )


def test_criterion_04_quasiconformal_pipeline():
    f = fc.preset("polynomial", 0, 1, 0.1)
    t0 = time.perf_counter()
    rep = cr.check(f, "qc-becker", k=0.25)
    ctx = lw.ChainContext.build(f, fc.derivative(f), rep.params)
    est = ex.dilatation_report(ctx, 1.05, 3.0, 128, 256, h=1e-4)
    gap = ex.seam_continuity(ctx, 1024, 1e-6)
    dt = time.perf_counter() - t0
    ok = rep.passed and est.sup_abs_mu <= 0.27 and gap <= 1e-4 and dt < 30
    record(
        4,
        "k = 0.25 extension of z + 0.1 z^2",
        ok,
        f"verdict {rep.verdict}, sup|mu| = {est.sup_abs_mu:.4f}, seam gap = {gap:.2e}, {dt:.1f} s",
    )


def test_criterion_05_soundness_on_non_univalent_corpus():
    problems = []
    for name, f in non_univalent_corpus().items():
        for pid in cr.PRESETS:
            v = cr.check(f, pid).verdict
            if v not in (cr.VIOLATION, cr.INAPPLICABLE):
                problems.append(f"{name}/{pid} -> {v}")
        pair = orc.pairwise_injectivity(f)
        if pair.verdict != orc.NON_UNIVALENT:
            problems.append(f"{name}: pairwise {pair.verdict}")
        else:
            a, b = pair.witness
            if not (abs(a - b) > 10 * orc.DEFAULT_TOL and abs(fc.evaluate(f, a) - fc.evaluate(f, b)) < orc.DEFAULT_TOL):
                problems.append(f"{name}: bad pairwise witness {pair.witness}")
        loc = orc.local_univalence(f)
        if loc.verdict != orc.NON_UNIVALENT or abs(complex(fc.eval_jet(f, loc.witness[0]).d1)) >= orc.DEFAULT_TOL:
            problems.append(f"{name}: local {loc.verdict} {loc.witness}")
    zz = fc.preset("polynomial", 0, 1, 1)
    exact = fc.evaluate(zz, -0.4) == fc.evaluate(zz, -0.6)
    grid_hit = orc.pairwise_injectivity(zz, orc.uniform_grid(4, 8, 0.6))
    exact = exact and grid_hit.refutes and sorted(round(w.real, 12) for w in grid_hit.witness) == [-0.6, -0.4]
    if not exact:
        problems.append("z+z^2: f(-0.4) = f(-0.6) not reproduced")
    record(
        5,
        "non-univalent corpus never passes",
        not problems,
        "; ".join(problems) or f"{len(cr.PRESETS)} presets x 2 functions rejected; witnesses reproduce",
    )


def test_criterion_06_oracle_consistency_and_fault_injection():
    problems = []
    passes = exits3 = 0
    for name, spec in {**CORPUS_SPECS, **BAD_SPECS}.items():
        for pid in cr.PRESETS:
            res = run(RunConfig.from_mapping({"criterion": pid, "f": spec}), write=False)
            doc = res.document
            if res.exit_code == EXIT_INCONSISTENT:
                exits3 += 1
            if doc["criterion"] and doc["criterion"]["verdict"] == cr.NO_VIOLATION:
                passes += 1
                bad = [o["method"] for o in doc["oracles"] if o["verdict"] != orc.CONSISTENT]
                if bad:
                    problems.append(f"{name}/{pid}: {', '.join(bad)} not consistent")
    if exits3:
        problems.append(f"exit 3 on the corpus {exits3} time(s)")
    # Fault injection exactly as stated: Koebe with the bounds multiplied by 10.
    fault = run(RunConfig.from_mapping({"criterion": "becker", "f": "koebe", "fault_rhs_scale": 10}), write=False)
    verdicts = [o["verdict"] for o in fault.document["oracles"]]
    if fault.exit_code != EXIT_INCONSISTENT:
        problems.append(
            f"Koebe with RHS x10: criterion {fault.document['criterion']['verdict']}, "
            f"oracles {verdicts}, exit {fault.exit_code} (expected 3)"
        )
    record(
        6,
        "oracle cross-check and fault injection",
        not problems,
        "; ".join(problems) or f"{passes} passing pairs all consistent; fault injection gave exit 3",
    )


def test_criterion_07_boundary_diagnostics():
    problems = []
    runs = 0
    worst_w, worst_p, worst_dev = 0.0, math.inf, 0.0
    for name, f in univalent_corpus().items():
        for pid, spec in cr.PRESETS.items():
            if spec.kind == "noshiro":
                continue  # no chain: the criterion has no (g, alpha, beta, A, B) form
            rep = cr.check(f, pid)
            if not rep.passed:
                continue
            runs += 1
            g, p = cr.resolve_preset(pid, f)
            ctx = lw.ChainContext.build(f, g, p)
            d = lw.chain_diagnostics(ctx)
            worst_w, worst_p = max(worst_w, d.max_abs_w), min(worst_p, d.min_re_p)
            if not (d.max_abs_w < 1 and d.min_re_p > 0):
                problems.append(f"{name}/{pid}: max|w| {d.max_abs_w:.3g}, min Re p {d.min_re_p:.3g}")
            for t in lw.T_SAMPLES:
                dev = abs(abs(lw.transition_phi(ctx, 0j, t)) - abs(lw.origin_transfer_closed_form(p, t)))
                worst_dev = max(worst_dev, dev)
    if worst_dev > 1e-10:
        problems.append(f"origin closed form off by {worst_dev:.2e}")
    record(
        7,
        "|w| < 1, Re p > 0 and origin closed form",
        not problems and runs > 0,
        "; ".join(problems)
        or f"{runs} passing runs: max|w| = {worst_w:.4f}, min Re p = {worst_p:.4f}, closed form dev {worst_dev:.1e}",
    )


def test_criterion_08_starlike_preset():
    f = fc.preset("z_exp_cz", 0.5)
    problems = []
    details = []
    for rmax in (0.999, 0.999999):
        rep = cr.check(f, "starlike", grid=DiskGrid(128, 256, rmax))
        fld = rep.field1
        details.append(f"r_max {rmax}: margin {fld.min_margin:.7f} at |z| = {abs(fld.min_point):.7f}")
        if not rep.passed:
            problems.append(f"r_max {rmax}: verdict {rep.verdict}")
        if abs(fld.min_margin - (1 - 0.5 * rmax)) > 1e-6 or abs(abs(fld.min_point) - rmax) > 1e-12:
            problems.append(f"r_max {rmax}: margin not 1 - 0.5|z| at |z| = r_max")
    # The stated value 1 - 0.5 itself, which the grid approaches as r_max -> 1.
    if abs(fld.min_margin - 0.5) > 1e-6:
        problems.append(f"margin {fld.min_margin} not within 1e-6 of 0.5")
    v = cr.check(fc.preset("z_over_one_minus_cz", 1), "starlike").verdict
    if v != cr.VIOLATION:
        problems.append(f"z/(1-z) gave {v}")
    record(8, "starlike preset", not problems, "; ".join(problems or details + ["z/(1-z) violates"]))


def test_criterion_09_thread_determinism(tmp_path):
    configs = [
        ["--criterion", "qc-becker", "--f", "polynomial:0:1:0.1", "--k", "0.25"],
        ["--criterion", "becker", "--f", "koebe"],
        ["--criterion", "general", "--f", "z_exp_cz:0.5", "--g", "constant_one", "--alpha", "0.9", "--beta", "0.1,0.1"],
    ]
    emit = ["--emit", "report,heatmap1,heatmap2,domain,beltrami,diagnostics"]
    compared, mismatched = 0, []
    for i, args in enumerate(configs):
        a, b = tmp_path / f"{i}a", tmp_path / f"{i}b"
        cli.main([*args, *emit, "--threads", "1", "--out-dir", str(a)])
        cli.main([*args, *emit, "--threads", "8", "--out-dir", str(b)])
        names = sorted(p.name for p in a.iterdir() if p.name != TIMING_FILE)
        if names != sorted(p.name for p in b.iterdir() if p.name != TIMING_FILE):
            mismatched.append(f"config {i}: different file sets")
            continue
        for n in names:
            compared += 1
            if (a / n).read_bytes() != (b / n).read_bytes():
                mismatched.append(f"config {i}: {n}")
    record(
        9,
        "threads 1 vs 8 byte-identical",
        not mismatched and compared > 0,
        "; ".join(mismatched) or f"{compared} report/image files identical across {len(configs)} configs",
    )


def test_criterion_10_parameter_validation_table():
    qc = cr.QUASICONFORMAL
    cases = [
        ("re_alpha_gt_half", cr.CriterionParams(alpha=0.5)),
        ("a_plus_b_nonzero", cr.CriterionParams(A=0.5, B=-0.5)),
        ("abs_a_minus_b_lt_2", cr.CriterionParams(A=1, B=-1 + 1e-9j)),
        ("abs_a_le_1", cr.CriterionParams(A=1.2, B=1)),
        ("abs_b_le_1", cr.CriterionParams(A=1, B=1.2j)),
        # k|A - B| >= 2 with k < 1 forces |A - B| > 2, so other names appear alongside.
        ("k_abs_a_minus_b_lt_2", cr.CriterionParams(A=1.5, B=-1, k=0.9, mode=qc)),
        ("k_in_unit_interval", cr.CriterionParams(k=1.0, mode=qc)),
        ("beta_ne_1", cr.CriterionParams(beta=1)),
    ]
    seen, problems = [], []
    for name, p in cases:
        try:
            cr.validate_params(p)
            problems.append(f"{name}: accepted")
        except ParameterError as exc:
            if name not in exc.violations:
                problems.append(f"{name}: got {exc.violations}")
            seen.append(name)
    if len(set(seen)) != 8:
        problems.append("names not distinct")
    record(10, "parameter validation table", not problems, "; ".join(problems) or "8 distinct named errors")
