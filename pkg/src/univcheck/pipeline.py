"""One configured run: criterion check, chain diagnostics, extension estimate,
oracle cross-check, then report and images.

Exit codes: 0 no violation found and every oracle consistent, 1 violation,
2 inapplicable or error, 3 the criterion passed but an oracle refuted
univalence (an internal inconsistency).
"""

from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import functions as fc
from . import report as rp
from .config import RunConfig
from .criteria import INAPPLICABLE, NO_VIOLATION, QUASICONFORMAL, Diagnostic, check_criterion, resolve_preset
from .errors import UnivalenceError
from .extension import dilatation_report, extend_point, seam_continuity
from .grid import DiskGrid
from .loewner import ChainContext, ChainDiagnostics, chain_diagnostics
from .oracle import ARGUMENT, INCONCLUSIVE, LOCAL, PAIRWISE, OracleReport, run_oracles
from .render import render_beltrami, render_domain_coloring, render_margin_heatmap

EXIT_PASS, EXIT_VIOLATION, EXIT_ERROR, EXIT_INCONSISTENT = 0, 1, 2, 3

REPORT_FILE = "univcheck.report"
TIMING_FILE = "univcheck.timing"
IMAGE_FILES = {
    "heatmap1": "heatmap1.ppm",
    "heatmap2": "heatmap2.ppm",
    "domain": "domain.ppm",
    "beltrami": "beltrami.ppm",
}

ORACLE_NR, ORACLE_NTHETA = 40, 128
ANNULUS = dict(r_in=1.05, r_out=3.0, n_r=128, n_theta=256)
SEAM_NTHETA, SEAM_EPS = 1024, 1e-6
DOMAIN_WINDOW = (0j, 1.0, 256)


@dataclass
class RunResult:
    exit_code: int
    document: dict
    timings: dict = field(default_factory=dict)
    files: dict = field(default_factory=dict)


def _phase(timings: dict, name: str, start: float) -> None:
    timings[name] = time.perf_counter() - start


def _error_result(cfg: RunConfig, message: str) -> RunResult:
    doc = rp.run_doc(cfg.echo(), EXIT_ERROR, "error", message)
    return RunResult(EXIT_ERROR, doc)


def _chain(f, g, params) -> ChainDiagnostics:
    try:
        ctx = ChainContext.build(f, g, params)
        return chain_diagnostics(ctx)
    except (UnivalenceError, ArithmeticError, ValueError) as exc:
        return ChainDiagnostics((Diagnostic("context", False, str(exc)),), math.nan, math.nan, None, None)


def _beltrami(f, g, params, passed: bool, threads: int):
    try:
        ctx = ChainContext.build(f, g, params)
        est = dilatation_report(ctx, **ANNULUS, threads=threads, k_theory=params.k, criterion_satisfied=passed)
        gap = seam_continuity(ctx, SEAM_NTHETA, SEAM_EPS)
        return ctx, est, rp.beltrami_doc(est, gap)
    except (UnivalenceError, ArithmeticError, ValueError) as exc:
        return None, None, {"error": str(exc)}


def _oracles(f, rmax: float) -> list[OracleReport]:
    grid = DiskGrid(ORACLE_NR, ORACLE_NTHETA, min(rmax, 0.999))
    try:
        return run_oracles(f, grid)
    except (UnivalenceError, ArithmeticError, ValueError) as exc:
        return [OracleReport(m, INCONCLUSIVE, None, 0, f"oracle failed: {exc}") for m in (PAIRWISE, ARGUMENT, LOCAL)]


def _heatmap(fld):
    def render(path) -> int:
        render_margin_heatmap(fld, path)
        return 0

    return render


def run(cfg: RunConfig, write: bool = True) -> RunResult:
    """Execute the configured pipeline; files go to ``cfg.out_dir`` when ``write``."""
    timings: dict[str, float] = {}
    emit = set(cfg.emit)
    t0 = time.perf_counter()
    try:
        f = cfg.build_f()
        g_user = cfg.build_g()
        g, params = resolve_preset(cfg.criterion, f, g_user, alpha=cfg.alpha, beta=cfg.beta, A=cfg.A, B=cfg.B, k=cfg.k)
        grid = DiskGrid(cfg.nr, cfg.ntheta, cfg.rmax)
        crit = check_criterion(
            f,
            g,
            params,
            grid,
            cfg.criterion,
            cfg.tol,
            refine=cfg.refine,
            threads=cfg.threads,
            rhs_scale=cfg.fault_rhs_scale,
        )
    except UnivalenceError as exc:
        result = _error_result(cfg, f"{type(exc).__name__}: {exc}")
        if write:
            _write(cfg, result, {})
        return result
    _phase(timings, "criterion", t0)

    passed = crit.verdict == NO_VIOLATION
    chain = None
    if passed and "diagnostics" in emit:
        t0 = time.perf_counter()
        chain = rp.chain_doc(_chain(f, g, params))
        _phase(timings, "chain", t0)

    beltrami, est, ctx = None, None, None
    if params.mode == QUASICONFORMAL:
        t0 = time.perf_counter()
        ctx, est, beltrami = _beltrami(f, g, params, passed, cfg.threads)
        _phase(timings, "extension", t0)

    t0 = time.perf_counter()
    oracles = _oracles(f, cfg.rmax)
    _phase(timings, "oracles", t0)
    refuted = [o for o in oracles if o.refutes]

    if crit.verdict == INAPPLICABLE:
        code, outcome, message = EXIT_ERROR, "inapplicable", crit.message
    elif not passed:
        code, outcome, message = EXIT_VIOLATION, "violation", f"violation at {crit.witness}"
    elif refuted:
        code, outcome = EXIT_INCONSISTENT, "inconsistent"
        message = "criterion passed but the " + ", ".join(o.method for o in refuted) + " oracle refuted univalence"
    else:
        code, outcome, message = EXIT_PASS, "pass", "no violation found; oracles consistent"

    images: dict = {}
    pending = []
    if "heatmap1" in emit and crit.field1 is not None:
        pending.append(("heatmap1", _heatmap(crit.field1)))
    if "heatmap2" in emit and crit.field2 is not None:
        pending.append(("heatmap2", _heatmap(crit.field2)))
    if "domain" in emit:
        pending.append(("domain", lambda p: render_domain_coloring(lambda z: fc.evaluate(f, z), DOMAIN_WINDOW, p)))
    if "beltrami" in emit and est is not None:
        pending.append(("beltrami", lambda p: render_beltrami(est.mu_values, params.k, p)))
    if "domain" in emit and ctx is not None:
        pending.append(
            ("extension", lambda p: render_domain_coloring(lambda z: extend_point(ctx, z), (0j, 3.0, 256), p))
        )

    doc = rp.run_doc(
        cfg.echo(),
        code,
        outcome,
        message,
        criterion=rp.criterion_doc(crit),
        chain=chain,
        oracles=[rp.oracle_doc(o) for o in oracles],
        beltrami=beltrami,
        images=images,
    )
    result = RunResult(code, doc, timings)
    if write:
        _write(cfg, result, pending)
    if code == EXIT_INCONSISTENT:
        print(f"univcheck: INTERNAL INCONSISTENCY: {message}", file=sys.stderr)
    return result


def _write(cfg: RunConfig, result: RunResult, pending) -> None:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    images = result.document["images"]
    for name, render in pending:
        fname = IMAGE_FILES.get(name, f"{name}.ppm")
        errors = render(out / fname)
        images[name] = {"file": fname, "error_pixels": int(errors)}
        result.files[name] = out / fname
    if result.timings:
        _phase(result.timings, "images", t0)
    if "report" in set(cfg.emit):
        rp.write_report(result.document, out / REPORT_FILE)
        result.files["report"] = out / REPORT_FILE
    # Wall time lives beside the report so the report itself stays reproducible.
    timing = {k: round(v, 6) for k, v in result.timings.items()}
    (out / TIMING_FILE).write_text(json.dumps(timing, indent=2) + "\n", encoding="utf-8")
    result.files["timing"] = out / TIMING_FILE

