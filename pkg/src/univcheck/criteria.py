"""Univalence and quasiconformal-extension inequalities, pointwise and on grids.

Each criterion is a pair of inequalities in f, g and the parameters
(alpha, beta, A, B[, k]):

    condition 1:  |(1/alpha)(f'/(g - beta) - 1)|                         <  R1
    condition 2:  |(f'/(g-beta) - 1)|z|^2
                   + (1-|z|^2)[((1-alpha)/alpha) z f'/f + z g'/(g-beta)] - C|  <= R2

Margins are RHS - LHS, so a negative margin is a violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import functions as fc
from .errors import InapplicableError, ParameterError, PointError, ValidationError
from .grid import DiskGrid, block_map, first_argmin, local_patch

UNIVALENCE = "univalence"
QUASICONFORMAL = "quasiconformal"

NO_VIOLATION = "no-violation-found"
VIOLATION = "violation"
INAPPLICABLE = "inapplicable"
VERDICTS = (NO_VIOLATION, VIOLATION, INAPPLICABLE)

DEFAULT_TOL = 1e-9
DIVISION_TOL = 1e-14
BETA_ONE_TOL = 1e-12

# Stable constraint names, in the order they are checked.
CONSTRAINTS = (
    "re_alpha_gt_half",
    "a_plus_b_nonzero",
    "abs_a_minus_b_lt_2",
    "abs_a_le_1",
    "abs_b_le_1",
    "k_abs_a_minus_b_lt_2",
    "k_in_unit_interval",
    "beta_ne_1",
)


@dataclass(frozen=True)
class CriterionParams:
    alpha: complex = 1.0
    beta: complex = 0.0
    A: complex = 1.0
    B: complex = 1.0
    k: float = 0.0
    mode: str = UNIVALENCE

    def __post_init__(self):
        for name in ("alpha", "beta", "A", "B"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "k", float(self.k))
        if self.mode not in (UNIVALENCE, QUASICONFORMAL):
            raise ValidationError(f"unknown mode {self.mode!r}")

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "A": self.A,
            "B": self.B,
            "k": self.k,
            "mode": self.mode,
        }


def constraint_violations(p: CriterionParams) -> list[tuple[str, str]]:
    """(name, message) for every violated admissibility constraint."""
    out = []
    values = (p.alpha, p.beta, p.A, p.B, complex(p.k))
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in values):
        raise ParameterError(["finite_parameters"], ["parameters must be finite"])
    if not p.alpha.real > 0.5:
        out.append(("re_alpha_gt_half", f"Re(alpha) > 1/2 violated: Re(alpha) = {p.alpha.real:g}"))
    if abs(p.A + p.B) == 0:
        out.append(("a_plus_b_nonzero", "A + B != 0 violated: A + B = 0"))
    if not abs(p.A - p.B) < 2:
        out.append(("abs_a_minus_b_lt_2", f"|A - B| < 2 violated: |A - B| = {abs(p.A - p.B):g}"))
    if not abs(p.A) <= 1:
        out.append(("abs_a_le_1", f"|A| <= 1 violated: |A| = {abs(p.A):g}"))
    if not abs(p.B) <= 1:
        out.append(("abs_b_le_1", f"|B| <= 1 violated: |B| = {abs(p.B):g}"))
    if p.mode == QUASICONFORMAL:
        if not p.k * abs(p.A - p.B) < 2:
            out.append(("k_abs_a_minus_b_lt_2", f"k|A - B| < 2 violated: k|A - B| = {p.k * abs(p.A - p.B):g}"))
        if not 0 <= p.k < 1:
            out.append(("k_in_unit_interval", f"k in [0, 1) violated: k = {p.k:g}"))
    if abs(1 - p.beta) <= BETA_ONE_TOL:
        out.append(("beta_ne_1", "beta != 1 violated: beta = 1 makes w(0, t) undefined"))
    return out


def validate_params(p: CriterionParams) -> None:
    """Raise ParameterError naming every violated constraint."""
    bad = constraint_violations(p)
    if bad:
        raise ParameterError([n for n, _ in bad], [m for _, m in bad])


def rhs_bounds(A: complex, B: complex, k: float = 0.0, mode: str = UNIVALENCE) -> tuple[float, float, complex]:
    """(R1, R2, C): the two right-hand sides and the centre of the condition-2 disk."""
    A, B = complex(A), complex(B)
    s, d = A + B, A - B
    kk = 1.0 if mode == UNIVALENCE else float(k)
    r1 = kk * abs(s) / (2 - kk * abs(d))
    den = 4 - kk**2 * abs(d) ** 2
    r2 = 2 * kk * abs(s) / den
    c = kk**2 * d.conjugate() * s / den
    return r1, r2, c


# -- pointwise quantities ----------------------------------------------------

def _first(mask: np.ndarray, z: np.ndarray) -> complex:
    return complex(np.asarray(z).reshape(-1)[np.flatnonzero(np.asarray(mask).reshape(-1))[0]])


def condition_terms(f, g, p: CriterionParams, z):
    """(|condition-1 LHS|, complex condition-2 expression E) at ``z``.

    E already has the centre C subtracted, so condition 2 reads |E| <= R2.
    """
    z = np.asarray(z, dtype=complex)
    jf = fc.eval_jet(f, z)
    jg = fc.eval_jet(g, z)
    gm = np.asarray(jg.value - p.beta)
    bad = np.abs(gm) < DIVISION_TOL
    if np.any(bad):
        w = _first(bad, z)
        raise InapplicableError(f"|g(z) - beta| < {DIVISION_TOL:g} at z = {w}", witness=w)
    q = jf.d1 / gm
    lhs1 = np.abs((q - 1) / p.alpha)
    r2 = z.real**2 + z.imag**2
    bracket = z * jg.d1 / gm
    if p.alpha != 1:
        bracket = bracket + ((1 - p.alpha) / p.alpha) * jf.d1 / fc.ratio_over_z(f, z)
    _, _, c = rhs_bounds(p.A, p.B, p.k, p.mode)
    e = (q - 1) * r2 + (1 - r2) * bracket - c
    bad = ~(np.isfinite(lhs1) & np.isfinite(e))
    if np.any(bad):
        w = _first(bad, z)
        raise InapplicableError(f"criterion expression is not finite at z = {w}", witness=w)
    return lhs1, e


def condition2_lhs(f, g, p: CriterionParams, z):
    """Complex expression inside the modulus of condition 2 (centre removed)."""
    e = condition_terms(f, g, p, z)[1]
    return complex(e) if np.ndim(e) == 0 else e


def margin_condition1(f, g, p: CriterionParams, z, rhs_scale: float = 1.0):
    r1 = rhs_bounds(p.A, p.B, p.k, p.mode)[0] * rhs_scale
    m = r1 - condition_terms(f, g, p, z)[0]
    return float(m) if np.ndim(m) == 0 else m


def margin_condition2(f, g, p: CriterionParams, z, rhs_scale: float = 1.0):
    r2 = rhs_bounds(p.A, p.B, p.k, p.mode)[1] * rhs_scale
    m = r2 - np.abs(condition_terms(f, g, p, z)[1])
    return float(m) if np.ndim(m) == 0 else m


# -- presets -----------------------------------------------------------------

G_USER = "user"
G_DERIVATIVE = "derivative"
G_OVER_Z = "over_z"


@dataclass(frozen=True)
class PresetSpec:
    preset_id: str
    mode: str
    fixed: dict
    g_rule: str
    description: str
    kind: str = "margin"


PRESETS: dict[str, PresetSpec] = {
    s.preset_id: s
    for s in (
        PresetSpec("general", UNIVALENCE, {}, G_USER, "two-condition criterion, all parameters free"),
        PresetSpec("c1", UNIVALENCE, {"alpha": 1}, G_USER, "alpha = 1"),
        PresetSpec("c2", UNIVALENCE, {"alpha": 1, "beta": 0}, G_USER, "alpha = 1, beta = 0"),
        PresetSpec("c3", UNIVALENCE, {"alpha": 1, "beta": 0}, G_DERIVATIVE, "alpha = 1, beta = 0, g = f'"),
        PresetSpec("becker-general", UNIVALENCE, {"alpha": 1, "beta": 0}, G_DERIVATIVE, "alias of c3"),
        PresetSpec("c4", UNIVALENCE, {"alpha": 1}, G_DERIVATIVE, "alpha = 1, g = f'"),
        PresetSpec(
            "becker",
            UNIVALENCE,
            {"alpha": 1, "beta": 0, "A": 1, "B": 1},
            G_DERIVATIVE,
            "(1-|z|^2)|z f''/f'| <= 1",
        ),
        PresetSpec("pascu", UNIVALENCE, {"alpha": 1, "A": 1, "B": 1}, G_DERIVATIVE, "alpha = 1, A = B = 1, g = f'"),
        PresetSpec("starlike", UNIVALENCE, {"alpha": 1, "beta": 0}, G_OVER_Z, "g = f/z: |z f'/f - 1| bounded"),
        PresetSpec("noshiro", UNIVALENCE, {"alpha": 1, "beta": 0, "A": 1, "B": 1}, G_DERIVATIVE, "Re f' > 0", "noshiro"),
        PresetSpec("qc-general", QUASICONFORMAL, {}, G_USER, "k-quasiconformal extension, all parameters free"),
        PresetSpec("qc-c6", QUASICONFORMAL, {"alpha": 1, "beta": 0}, G_DERIVATIVE, "k-qc, alpha = 1, beta = 0, g = f'"),
        PresetSpec(
            "qc-becker",
            QUASICONFORMAL,
            {"alpha": 1, "beta": 0, "A": 1, "B": 1},
            G_DERIVATIVE,
            "(1-|z|^2)|z f''/f'| <= k",
        ),
    )
}


def preset_criterion(preset_id: str) -> PresetSpec:
    try:
        return PRESETS[preset_id]
    except KeyError:
        raise ValidationError(f"unknown criterion preset {preset_id!r}; known: {', '.join(PRESETS)}") from None


def resolve_preset(
    preset_id: str,
    f: fc.AnalyticFunction,
    g: fc.AnalyticFunction | None = None,
    *,
    alpha: complex = 1.0,
    beta: complex = 0.0,
    A: complex = 1.0,
    B: complex = 1.0,
    k: float = 0.5,
) -> tuple[fc.AnalyticFunction, CriterionParams]:
    """Bind g and substitute the preset's fixed parameters over the user's."""
    spec = preset_criterion(preset_id)
    values = {"alpha": alpha, "beta": beta, "A": A, "B": B}
    values.update(spec.fixed)
    params = CriterionParams(k=k if spec.mode == QUASICONFORMAL else 0.0, mode=spec.mode, **values)
    if spec.g_rule == G_DERIVATIVE:
        g = fc.derivative(f)
    elif spec.g_rule == G_OVER_Z:
        g = fc.divided_by_z(f)
    elif g is None:
        g = fc.preset("constant_one")
    return g, params


# -- grid evaluation ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MarginField:
    grid: DiskGrid
    margins: np.ndarray
    worst_margin: float
    worst_point: complex
    worst_index: tuple[int, int]
    refined_margin: float | None = None
    refined_point: complex | None = None

    @classmethod
    def from_margins(cls, grid: DiskGrid, margins: np.ndarray) -> MarginField:
        idx = first_argmin(margins)
        point = complex(grid.points()[idx])
        return cls(grid, margins, float(margins[idx]), point, idx)

    @property
    def min_margin(self) -> float:
        if self.refined_margin is None:
            return self.worst_margin
        return min(self.worst_margin, self.refined_margin)

    @property
    def min_point(self) -> complex:
        if self.refined_margin is not None and self.refined_margin < self.worst_margin:
            return self.refined_point
        return self.worst_point


@dataclass(frozen=True)
class Diagnostic:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True, eq=False)
class CriterionReport:
    criterion_id: str
    params: CriterionParams
    verdict: str
    field1: MarginField | None
    field2: MarginField | None
    diagnostics: tuple[Diagnostic, ...] = ()
    witness: complex | None = None
    message: str = ""
    tol: float = DEFAULT_TOL
    f_label: str = ""
    g_label: str = ""
    rhs_scale: float = 1.0

    @property
    def passed(self) -> bool:
        return self.verdict == NO_VIOLATION


def _refine(fn, grid: DiskGrid, fld: MarginField, rounds: int) -> MarginField:
    if rounds <= 0:
        return fld
    radii = grid.radii
    i_r = fld.worst_index[0]
    dr = max(radii[min(i_r + 1, grid.n_r - 1)] - radii[i_r], radii[i_r] - radii[max(i_r - 1, 0)])
    dth = 2 * np.pi / grid.n_theta
    best_m, best_z = fld.worst_margin, fld.worst_point
    center = best_z
    for _ in range(rounds):
        pts = local_patch(grid, center, dr, dth)
        m = np.asarray(fn(pts))
        j = int(np.argmin(m))
        if m[j] < best_m:
            best_m, best_z = float(m[j]), complex(pts[j])
        center = best_z
        dr /= 4
        dth /= 4
    return replace(fld, refined_margin=best_m, refined_point=best_z)


def check_criterion(
    f: fc.AnalyticFunction,
    g: fc.AnalyticFunction,
    p: CriterionParams,
    grid: DiskGrid | None = None,
    preset_id: str = "general",
    tol: float = DEFAULT_TOL,
    *,
    refine: int = 3,
    threads: int = 1,
    rhs_scale: float = 1.0,
) -> CriterionReport:
    """Evaluate both conditions over ``grid`` and return a verdict.

    Condition 1 passes iff every margin exceeds ``tol``; condition 2 iff
    every margin is at least ``-tol``. A vanishing denominator anywhere makes
    the verdict ``inapplicable`` with the offending point as witness.
    ``rhs_scale`` multiplies both right-hand sides; it exists only for
    fault-injection tests.
    """
    validate_params(p)
    if f.class_tag != fc.CLASS_A:
        raise ValidationError(f"{f.label}: criteria need a class-A f (f(0) = 0, f'(0) = 1)")
    grid = grid or DiskGrid()
    spec = preset_criterion(preset_id)
    base = dict(criterion_id=preset_id, params=p, tol=tol, f_label=f.label, g_label=g.label, rhs_scale=rhs_scale)

    if spec.kind == "noshiro":
        return _check_noshiro(f, grid, tol, refine, threads, base)

    r1, r2, c = rhs_bounds(p.A, p.B, p.k, p.mode)
    r1 *= rhs_scale
    r2 *= rhs_scale

    def both(zb):
        lhs1, e = condition_terms(f, g, p, zb)
        return np.stack([r1 - lhs1, r2 - np.abs(e)], axis=-1)

    try:
        m = block_map(both, grid.points(), threads)
        f1 = _refine(lambda z: both(z)[..., 0], grid, MarginField.from_margins(grid, m[..., 0]), refine)
        f2 = _refine(lambda z: both(z)[..., 1], grid, MarginField.from_margins(grid, m[..., 1]), refine)
    except PointError as exc:
        return CriterionReport(
            verdict=INAPPLICABLE, field1=None, field2=None, witness=exc.witness, message=str(exc), **base
        )

    ok1 = f1.min_margin > tol
    ok2 = f2.min_margin >= -tol
    diags = [
        Diagnostic("condition1", ok1, f"min margin {f1.min_margin:.6e} at {f1.min_point:.6g}; needs > {tol:g}"),
        Diagnostic("condition2", ok2, f"min margin {f2.min_margin:.6e} at {f2.min_point:.6g}; needs >= {-tol:g}"),
        _origin_transfer_diagnostic(p, r1),
    ]
    verdict = NO_VIOLATION if ok1 and ok2 else VIOLATION
    witness = None
    if not ok1:
        witness = f1.min_point
    elif not ok2:
        witness = f2.min_point
    return CriterionReport(verdict=verdict, field1=f1, field2=f2, diagnostics=tuple(diags), witness=witness, **base)


def _origin_transfer_diagnostic(p: CriterionParams, r1: float) -> Diagnostic:
    # |w(0, t)| = |1/(alpha(1 - beta)) - 1| e^{-2t} is largest at t = 0.
    val = abs(1 / (p.alpha * (1 - p.beta)) - 1)
    return Diagnostic(
        "origin_transfer_bound",
        val < r1,
        f"|1/(alpha(1-beta)) - 1| = {val:.6e} vs R1 = {r1:.6e} (informational, not part of the verdict)",
    )


def _check_noshiro(f, grid, tol, refine, threads, base) -> CriterionReport:
    def re_fprime(zb):
        return np.real(fc.eval_jet(f, zb).d1)

    try:
        m = block_map(re_fprime, grid.points(), threads)
        f1 = _refine(re_fprime, grid, MarginField.from_margins(grid, m), refine)
    except PointError as exc:
        return CriterionReport(
            verdict=INAPPLICABLE, field1=None, field2=None, witness=exc.witness, message=str(exc), **base
        )
    ok = f1.min_margin > tol
    diag = Diagnostic("re_fprime_positive", ok, f"min Re f' {f1.min_margin:.6e} at {f1.min_point:.6g}; needs > {tol:g}")
    return CriterionReport(
        verdict=NO_VIOLATION if ok else VIOLATION,
        field1=f1,
        field2=None,
        diagnostics=(diag,),
        witness=None if ok else f1.min_point,
        **base,
    )


def check(
    f: fc.AnalyticFunction,
    preset_id: str = "becker",
    g: fc.AnalyticFunction | None = None,
    *,
    grid: DiskGrid | None = None,
    tol: float = DEFAULT_TOL,
    refine: int = 3,
    threads: int = 1,
    rhs_scale: float = 1.0,
    **params,
) -> CriterionReport:
    """Resolve ``preset_id`` for ``f`` and run :func:`check_criterion`."""
    g, p = resolve_preset(preset_id, f, g, **params)
    return check_criterion(f, g, p, grid, preset_id, tol, refine=refine, threads=threads, rhs_scale=rhs_scale)
