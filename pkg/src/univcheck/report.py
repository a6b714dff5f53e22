"""Deterministic JSON report documents.

A report is a tree of dicts (key order is kept), lists, strings, ints,
bools, None, floats and complex numbers. Floats are written with 17
significant digits in scientific notation; complex numbers become
``{"re": ..., "im": ...}``; non-finite floats become the strings "NaN",
"Infinity" and "-Infinity". The schema ships as ``report.schema.json``.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .criteria import CriterionReport, MarginField
from .extension import BeltramiEstimate
from .loewner import ChainDiagnostics
from .oracle import OracleReport

TOOL_NAME = "univcheck"
_SPECIAL = {"NaN": math.nan, "Infinity": math.inf, "-Infinity": -math.inf}


def _float(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".16e")


def _emit(obj, indent: int, out: list[str]) -> None:
    pad = "  " * (indent + 1)
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        out.append(f'{{"re": {_float(c.real)}, "im": {_float(c.imag)}}}')
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{json.dumps(str(k))}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append("  " * indent + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float, bool, str, np.number, np.bool_)) or v is None for v in obj):
            parts: list[str] = []
            for v in obj:
                _emit(v, indent + 1, parts)
            out.append("[" + ", ".join(parts) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append("  " * indent + "]")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(doc: dict) -> str:
    out: list[str] = []
    _emit(doc, 0, out)
    out.append("\n")
    return "".join(out)


def _decode(obj):
    if isinstance(obj, dict):
        if set(obj) == {"re", "im"}:
            return complex(_decode(obj["re"]), _decode(obj["im"]))
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    if isinstance(obj, str) and obj in _SPECIAL:
        return _SPECIAL[obj]
    return obj


def loads(text: str) -> dict:
    """Inverse of :func:`dumps` (tuples come back as lists)."""
    return _decode(json.loads(text))


def write_report(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def read_report(path) -> dict:
    return loads(Path(path).read_text(encoding="utf-8"))


def schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text(encoding="utf-8"))


# -- document builders -------------------------------------------------------

def field_doc(fld: MarginField | None) -> dict | None:
    if fld is None:
        return None
    return {
        "worst_margin": fld.worst_margin,
        "worst_point": fld.worst_point,
        "worst_index": list(fld.worst_index),
        "refined_margin": fld.refined_margin,
        "refined_point": fld.refined_point,
        "min_margin": fld.min_margin,
        "min_point": fld.min_point,
    }


def criterion_doc(rep: CriterionReport) -> dict:
    p = rep.params
    return {
        "criterion_id": rep.criterion_id,
        "mode": p.mode,
        "params": {"alpha": p.alpha, "beta": p.beta, "A": p.A, "B": p.B, "k": p.k},
        "f": rep.f_label,
        "g": rep.g_label,
        "tol": rep.tol,
        "rhs_scale": rep.rhs_scale,
        "verdict": rep.verdict,
        "witness": rep.witness,
        "message": rep.message,
        "condition1": field_doc(rep.field1),
        "condition2": field_doc(rep.field2),
        "diagnostics": [{"name": d.name, "passed": d.passed, "detail": d.detail} for d in rep.diagnostics],
    }


def chain_doc(diag: ChainDiagnostics) -> dict:
    return {
        "passed": diag.passed,
        "max_abs_w": diag.max_abs_w,
        "min_re_p": diag.min_re_p,
        "worst_z": diag.worst_z,
        "worst_t": diag.worst_t,
        "items": [{"name": d.name, "passed": d.passed, "detail": d.detail} for d in diag.items],
    }


def oracle_doc(rep: OracleReport) -> dict:
    return {
        "method": rep.method,
        "verdict": rep.verdict,
        "witness": None if rep.witness is None else list(rep.witness),
        "samples_used": rep.samples_used,
        "detail": rep.detail,
    }


def beltrami_doc(est: BeltramiEstimate, seam_gap: float | None) -> dict:
    return {
        "annulus": {"r_in": est.r_in, "r_out": est.r_out, "n_r": est.n_r, "n_theta": est.n_theta},
        "h": est.h,
        "sup_abs_mu": est.sup_abs_mu,
        "worst_point": est.worst_point,
        "n_degenerate": est.n_degenerate,
        "reliable": est.reliable,
        "sup_abs_w_transfer": est.sup_abs_w_transfer,
        "sup_abs_w_becker": est.sup_abs_w_becker,
        "k_theory": est.k_theory,
        "criterion_satisfied": est.criterion_satisfied,
        "seam_gap": seam_gap,
    }


def run_doc(
    config_echo: dict,
    exit_code: int,
    outcome: str,
    message: str,
    criterion: dict | None = None,
    chain: dict | None = None,
    oracles: list | None = None,
    beltrami: dict | None = None,
    images: dict | None = None,
) -> dict:
    return {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "config": config_echo,
        "status": {"exit_code": exit_code, "outcome": outcome, "message": message},
        "criterion": criterion,
        "chain": chain,
        "oracles": oracles or [],
        "beltrami": beltrami,
        "images": images or {},
    }
