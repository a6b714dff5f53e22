"""The explicit subordination chain built from (f, g, alpha, beta) and its diagnostics.

With u = e^{-t} z the chain is

    L(z, t) = f(u) * phi2(z, t)^alpha,
    phi2(z, t) = 1 + (e^{2t} - 1) (g(u) - beta) / (f(u)/u),

so fractional powers of f itself are never formed. The power of phi2 uses
a logarithm continued radially from z = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import functions as fc
from .criteria import CriterionParams, Diagnostic, validate_params
from .errors import BranchError, InapplicableError, InconclusiveError, PoleError, ValidationError
from .grid import DiskGrid

T_SAMPLES = (0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)
DIAGNOSTIC_GRID = DiskGrid(n_r=16, n_theta=32, r_max=0.999)
SCAN_GRID = DiskGrid(n_r=32, n_theta=64, r_max=0.999)

BRANCH_TOL = 1e-14
POLE_TOL = 1e-14
INITIAL_STEPS = 16
MAX_STEPS = 2**16


@dataclass(frozen=True, eq=False)
class ChainContext:
    f: fc.AnalyticFunction
    g: fc.AnalyticFunction
    params: CriterionParams

    @classmethod
    def build(cls, f, g, params: CriterionParams, scan: DiskGrid | None = SCAN_GRID) -> ChainContext:
        """Validate inputs and scan ``scan`` for zeros of f(z)/z."""
        validate_params(params)
        if f.class_tag != fc.CLASS_A:
            raise ValidationError(f"{f.label}: the chain needs a class-A f")
        if abs(fc.evaluate(g, 0) - 1) > fc.COEFF_TOL:
            raise ValidationError(f"{g.label}: the chain needs g(0) = 1")
        if scan is not None:
            _scan_ratio_zeros(f, scan)
        return cls(f, g, params)


def _scan_ratio_zeros(f: fc.AnalyticFunction, scan: DiskGrid) -> None:
    """Raise SingularityError if f(z)/z vanishes in |z| < r_max.

    Grid values catch exact hits; an argument-principle count catches zeros
    between grid points, which are then located by Newton's method.
    """
    from .oracle import argument_principle_count

    z = scan.points()
    q = fc.ratio_over_z(f, z)
    h = fc.divided_by_z(f)
    try:
        n = argument_principle_count(h, 0j, scan.r_max)
    except (InconclusiveError, ValueError):
        return
    if n < 1:
        return
    root = complex(z.reshape(-1)[int(np.argmin(np.abs(q)))])
    for _ in range(60):
        v, d = h.derivatives(np.asarray(root), 1)
        if d == 0:
            break
        step = complex(v / d)
        root -= step
        if abs(step) < 1e-15 or abs(root) >= scan.r_max:
            break
    raise fc.SingularityError(f"{f.label}: f(z)/z has {n} zero(s) in |z| < {scan.r_max}, one near {root:.12g}", witness=root)


@dataclass(frozen=True)
class ChainSample:
    z: complex
    t: float
    L: complex
    w: complex
    p: complex


def _arr(z):
    a = np.asarray(z, dtype=complex)
    return a, a.ndim == 0


def _ret(a, scalar):
    return complex(a) if scalar else a


def _arr_t(z, t):
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    return z, t, z.ndim == 0 and t.ndim == 0


def _scalar_t(t):
    t = np.asarray(t)
    return float(t) if t.ndim == 0 else None


def phi2(ctx: ChainContext, z, t):
    """phi2(z, t); ``t`` may be an array broadcasting against ``z``."""
    z, t, scalar = _arr_t(z, t)
    u = np.exp(-t) * z
    q = fc.ratio_over_z(ctx.f, u)
    gv = fc.evaluate(ctx.g, u)
    return _ret(1 + np.expm1(2 * t) * (gv - ctx.params.beta) / q, scalar)


def _bracket_log(beta: complex, t):
    """Log of beta e^{-2t} + 1 - beta, continued in t from the value 0 at t = 0.

    The bracket runs along a straight segment from 1, so the principal
    logarithm is the continuation unless the segment passes through 0,
    which happens only for real beta > 1.
    """
    s = np.exp(-2 * np.asarray(t, dtype=float))
    b = beta * s + 1 - beta
    if np.any(np.abs(b) < BRANCH_TOL):
        raise BranchError(f"beta e^(-2t) + 1 - beta vanishes for beta = {beta}")
    if beta.imag == 0 and beta.real > 1 and np.any(s < (beta.real - 1) / beta.real):
        t_cross = -0.5 * math.log((beta.real - 1) / beta.real)
        raise BranchError(f"branch of the bracket crosses zero at t = {t_cross:.6g} for beta = {beta}", t=t_cross)
    return np.log(b)


def log_phi2(ctx: ChainContext, z, t):
    """Logarithm of phi2 continued along the segment [0, z].

    Steps halve until consecutive arguments differ by less than pi/2.
    """
    z, t, scalar = _arr_t(z, t)
    zb, tb = np.broadcast_arrays(z, t)
    zf, tf = zb.reshape(-1), tb.reshape(-1)
    seed_arg = np.imag(_bracket_log(ctx.params.beta, tf))
    out = np.empty(zf.shape, dtype=complex)
    todo = np.arange(zf.size)
    n = INITIAL_STEPS
    while todo.size:
        if n > MAX_STEPS:
            i = todo[0]
            raise BranchError("branch continuation step underflow", witness=complex(zf[i]), t=float(tf[i]))
        s = np.linspace(0.0, 1.0, n + 1)
        vals = phi2(ctx, zf[todo, None] * s[None, :], tf[todo, None])
        small = np.abs(vals) < BRANCH_TOL
        if np.any(small):
            i = todo[int(np.flatnonzero(small.any(axis=1))[0])]
            raise BranchError("phi2 vanishes on the continuation path", witness=complex(zf[i]), t=float(tf[i]))
        inc = np.angle(vals[:, 1:] / vals[:, :-1])
        ok = np.all(np.abs(inc) < np.pi / 2, axis=1)
        done = todo[ok]
        out[done] = np.log(np.abs(vals[ok, -1])) + 1j * (seed_arg[done] + inc[ok].sum(axis=1))
        todo = todo[~ok]
        n *= 2
    return _ret(out.reshape(zb.shape), scalar)


def _integer_alpha(alpha: complex) -> int | None:
    if alpha.imag == 0 and float(alpha.real).is_integer():
        return int(alpha.real)
    return None


def phi3(ctx: ChainContext, z, t):
    """phi2 ** alpha on the branch seeded at the origin."""
    alpha = ctx.params.alpha
    n = _integer_alpha(alpha)
    if n is not None:
        p2 = phi2(ctx, z, t)
        if n == 1:
            return p2
        return p2**n
    out = np.exp(alpha * log_phi2(ctx, z, t))
    return complex(out) if np.ndim(out) == 0 else out


def chain_value(ctx: ChainContext, z, t):
    """L(z, t) = f(e^{-t} z) * phi3(z, t)."""
    z, t, scalar = _arr_t(z, t)
    fu = fc.evaluate(ctx.f, np.exp(-t) * z)
    return _ret(fu * phi3(ctx, z, t), scalar)


def coefficient_a1(params: CriterionParams, t):
    """Leading Taylor coefficient of L(., t); equals 1 at t = 0."""
    alpha = params.alpha
    t_arr = np.asarray(t, dtype=float)
    a1 = np.exp((2 * alpha - 1) * t_arr + alpha * _bracket_log(params.beta, t_arr))
    return complex(a1) if a1.ndim == 0 else a1


def transition_phi(ctx: ChainContext, z, t):
    """The function phi(z, t) whose Möbius image is the transfer function w."""
    z, t, scalar = _arr_t(z, t)
    p = ctx.params
    u = np.exp(-t) * z
    jf = fc.eval_jet(ctx.f, u)
    jg = fc.eval_jet(ctx.g, u)
    gm = np.asarray(jg.value - p.beta)
    bad = np.abs(gm) < POLE_TOL
    if np.any(bad):
        i = np.flatnonzero(bad.reshape(-1))[0]
        w = complex(np.broadcast_to(z, bad.shape).reshape(-1)[i])
        raise InapplicableError(f"|g(e^-t z) - beta| < {POLE_TOL:g}", witness=w, t=_scalar_t(t))
    e2 = np.exp(-2 * t)
    bracket = u * jg.d1 / gm
    if p.alpha != 1:
        bracket = bracket + ((1 - p.alpha) / p.alpha) * jf.d1 / fc.ratio_over_z(ctx.f, u)
    out = (jf.d1 / (p.alpha * gm) - 1) * e2 - np.expm1(-2 * t) * bracket
    return _ret(out, scalar)


def w_from_phi(phi, A: complex, B: complex):
    phi, scalar = _arr(phi)
    den = (A - B) * phi + A + B
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleError("(A - B) phi + A + B vanishes")
    return _ret(-2 * phi / den, scalar)


def p_from_w(w, A: complex, B: complex):
    w, scalar = _arr(w)
    den = 1 - B * w
    if np.any(np.abs(den) < POLE_TOL):
        raise PoleError("1 - B w vanishes")
    return _ret((1 + A * w) / den, scalar)


def becker_w(p):
    """(p - 1)/(p + 1), the transfer quantity of the extension theorem."""
    p, scalar = _arr(p)
    return _ret((p - 1) / (p + 1), scalar)


def transfer_w(ctx: ChainContext, z, t):
    """(w, p) at (z, t); p = dL/dt / (z dL/dz) recovered in closed form from w."""
    A, B = ctx.params.A, ctx.params.B
    try:
        w = w_from_phi(transition_phi(ctx, z, t), A, B)
        p = p_from_w(w, A, B)
    except PoleError as exc:
        zz = complex(np.asarray(z).reshape(-1)[0])
        raise PoleError(str(exc), witness=zz, t=_scalar_t(t)) from None
    return w, p


def origin_transfer_closed_form(params: CriterionParams, t: float) -> complex:
    """(1/(alpha(1 - beta)) - 1) e^{-2t}."""
    return (1 / (params.alpha * (1 - params.beta)) - 1) * math.exp(-2 * t)


def origin_phi_exact(params: CriterionParams, t: float) -> complex:
    """phi(0, t), including the (1 - e^{-2t})(1 - alpha)/alpha term from z f'/f -> 1."""
    a = params.alpha
    return origin_transfer_closed_form(params, t) - math.expm1(-2 * t) * (1 - a) / a


def sample(ctx: ChainContext, z: complex, t: float) -> ChainSample:
    w, p = transfer_w(ctx, z, t)
    return ChainSample(complex(z), float(t), chain_value(ctx, z, t), w, p)


# -- diagnostics -------------------------------------------------------------

@dataclass(frozen=True)
class ChainDiagnostics:
    items: tuple[Diagnostic, ...]
    max_abs_w: float
    min_re_p: float
    worst_z: complex | None
    worst_t: float | None

    @property
    def passed(self) -> bool:
        return all(d.passed for d in self.items)

    def item(self, name: str) -> Diagnostic:
        for d in self.items:
            if d.name == name:
                return d
        raise KeyError(name)


def winding_numbers(curve: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Winding number of the closed polygon ``curve`` around each point."""
    d = curve[None, :] - points[:, None]
    inc = np.angle(np.roll(d, -1, axis=1) / d)
    return np.rint(inc.sum(axis=1) / (2 * np.pi)).astype(int)


def chain_diagnostics(
    ctx: ChainContext,
    z_grid: DiskGrid | None = None,
    t_samples=T_SAMPLES,
    tol: float = 1e-10,
    *,
    n_inner: int = 64,
    n_curve: int = 2048,
) -> ChainDiagnostics:
    """Runtime checks of the hypotheses under which the chain certifies univalence.

    Failures are reported, never raised.
    """
    grid = z_grid or DIAGNOSTIC_GRID
    z = grid.points()
    ts = [float(t) for t in t_samples]
    p = ctx.params
    items = []

    # (a) L(z, 0) = f(z)
    try:
        err = np.abs(chain_value(ctx, z, 0.0) - fc.evaluate(ctx.f, z))
        scale = np.maximum(1.0, np.abs(fc.evaluate(ctx.f, z)))
        worst = float(np.max(err / scale))
        items.append(Diagnostic("initial_value", worst <= tol, f"max |L(z,0) - f(z)| (relative) = {worst:.3e}"))
    except (BranchError, ArithmeticError, ValueError) as exc:
        items.append(Diagnostic("initial_value", False, f"evaluation failed: {exc}"))

    # (b) |a1(t)| increasing and unbounded
    try:
        mods = np.abs(coefficient_a1(p, np.asarray(ts)))
        growing = bool(np.all(np.diff(mods) > 0))
        a1_end = float(np.abs(coefficient_a1(p, 20.0)))
        ok = growing and a1_end > 1e6
        items.append(Diagnostic("a1_growth", ok, f"|a1| increasing: {growing}; |a1(20)| = {a1_end:.6e}"))
    except BranchError as exc:
        items.append(Diagnostic("a1_growth", False, f"branch failure: {exc}"))

    # (c) |w| < 1 and Re p > 0
    max_w, min_p, worst_z, worst_t = 0.0, math.inf, None, None
    failure = ""
    for t in ts:
        try:
            w, pv = transfer_w(ctx, z, t)
        except (PoleError, InapplicableError, fc.SingularityError) as exc:
            failure = f"evaluation failed at t = {t}: {exc}"
            worst_z, worst_t = exc.witness, t
            break
        aw = np.abs(w)
        idx = np.unravel_index(int(np.argmax(aw)), aw.shape)
        if aw[idx] > max_w:
            max_w, worst_z, worst_t = float(aw[idx]), complex(z[idx]), t
        min_p = min(min_p, float(np.min(pv.real)))
    ok = not failure and max_w < 1 and min_p > 0
    detail = failure or f"max |w| = {max_w:.6e}, min Re p = {min_p:.6e}"
    items.append(Diagnostic("transfer_bounds", ok, detail))

    # (d) phi(0, t) against |(1/(alpha(1-beta)) - 1) e^{-2t}|, and |w(0, t)|
    # too where |w| = |phi| (A = B, |A| = 1). The zf'/f term tends to 1 at
    # the origin, so that form omits (1 - e^{-2t})(1 - alpha)/alpha and holds
    # only for alpha = 1; the exact value is checked separately.
    closed = [abs(origin_transfer_closed_form(p, t)) for t in ts]
    try:
        phis = [transition_phi(ctx, 0j, t) for t in ts]
        dev = max(abs(abs(a) - b) for a, b in zip(phis, closed))
        detail = f"max ||phi(0,t)| - closed form| = {dev:.3e}"
        if p.A == p.B and abs(abs(p.A) - 1) < 1e-15:
            wdev = max(abs(abs(transfer_w(ctx, 0j, t)[0]) - c) for t, c in zip(ts, closed))
            dev = max(dev, wdev)
            detail += f"; max ||w(0,t)| - closed form| = {wdev:.3e}"
        items.append(Diagnostic("origin_transfer_closed_form", dev <= tol, detail))
        exact_dev = max(abs(a - origin_phi_exact(p, t)) for a, t in zip(phis, ts))
        items.append(
            Diagnostic("origin_transfer_exact", exact_dev <= tol, f"max |phi(0,t) - exact origin value| = {exact_dev:.3e}")
        )
    except (PoleError, InapplicableError) as exc:
        items.append(Diagnostic("origin_transfer_closed_form", False, f"evaluation failed: {exc}"))

    # (e) L(0.9 e^{i theta}, t) inside the curve L(0.999 e^{i theta}, s), t < s
    theta_in = 2 * np.pi * np.arange(n_inner) / n_inner
    theta_c = 2 * np.pi * np.arange(n_curve) / n_curve
    try:
        inner = {t: chain_value(ctx, 0.9 * np.exp(1j * theta_in), t) for t in ts}
        outer = {t: chain_value(ctx, 0.999 * np.exp(1j * theta_c), t) for t in ts}
        bad = []
        for i, t in enumerate(ts):
            for s in ts[i + 1 :]:
                wn = winding_numbers(outer[s], inner[t])
                if np.any(wn < 1):
                    bad.append((t, s))
        detail = "all pairs nested" if not bad else f"{len(bad)} (t, s) pairs not nested, first {bad[0]}"
        items.append(Diagnostic("subordination", not bad, detail))
    except (BranchError, ArithmeticError, ValueError) as exc:
        items.append(Diagnostic("subordination", False, f"evaluation failed: {exc}"))

    return ChainDiagnostics(tuple(items), max_w, min_p, worst_z, worst_t)
