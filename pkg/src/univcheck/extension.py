"""Piecewise extension of f to the plane and finite-difference dilatation estimates.

    F(z) = L(z, 0)                  for |z| < 1
    F(z) = L(z/|z|, log |z|)        for |z| >= 1

The complex dilatation mu = F_zbar / F_z is estimated with central
differences in x and y and the Wirtinger combinations

    F_z = (F_x - i F_y)/2,   F_zbar = (F_x + i F_y)/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateDerivativeError, PointError, UnivalenceError, ValidationError
from .grid import BLOCK_ROWS
from .loewner import ChainContext, becker_w, chain_value, transfer_w

H_MIN, H_MAX = 1e-7, 1e-3
DEFAULT_H = 1e-4
DEGENERATE_TOL = 1e-10
UNRELIABLE_FRACTION = 0.01


def extend_point(ctx: ChainContext, z):
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    r = np.abs(z)
    out = np.empty(z.shape, dtype=complex)
    inside = r < 1
    if np.any(inside):
        out[inside] = chain_value(ctx, z[inside], 0.0)
    if not np.all(inside):
        ro = r[~inside]
        out[~inside] = chain_value(ctx, z[~inside] / ro, np.log(ro))
    return complex(out[0]) if scalar else out


def _steps(z: np.ndarray, h: float | None) -> np.ndarray:
    if h is None:
        return DEFAULT_H * np.maximum(1.0, np.abs(z))
    if not H_MIN <= h <= H_MAX:
        raise ValidationError(f"finite-difference step h = {h:g} outside [{H_MIN:g}, {H_MAX:g}]")
    return np.full(z.shape, float(h))


def _mu(ctx: ChainContext, z: np.ndarray, h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    fx = (extend_point(ctx, z + h) - extend_point(ctx, z - h)) / (2 * h)
    fy = (extend_point(ctx, z + 1j * h) - extend_point(ctx, z - 1j * h)) / (2 * h)
    fz = 0.5 * (fx - 1j * fy)
    fzb = 0.5 * (fx + 1j * fy)
    degenerate = np.abs(fz) < DEGENERATE_TOL
    mu = np.where(degenerate, np.nan + 0j, fzb / np.where(degenerate, 1.0, fz))
    return mu, degenerate


def beltrami_at(ctx: ChainContext, z, h: float | None = None):
    """mu(z) = F_zbar / F_z by central differences with step ``h``.

    ``z`` must keep the whole stencil on one side of the unit circle.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    hs = _steps(z, h)
    r = np.abs(z)
    seam = (r > 1 - 2 * hs) & (r < 1 + 2 * hs)
    if np.any(seam):
        w = complex(z[np.flatnonzero(seam)[0]])
        raise ValidationError(f"z = {w} is within 2h of the unit circle, where F is only continuous")
    mu, degenerate = _mu(ctx, z, hs)
    if np.any(degenerate):
        w = complex(z[np.flatnonzero(degenerate)[0]])
        raise DegenerateDerivativeError(f"|F_z| < {DEGENERATE_TOL:g} at z = {w}", witness=w)
    return complex(mu[0]) if scalar else mu


@dataclass(frozen=True, eq=False)
class BeltramiEstimate:
    r_in: float
    r_out: float
    n_r: int
    n_theta: int
    h: float | None
    mu_values: np.ndarray
    sup_abs_mu: float
    worst_point: complex | None
    n_degenerate: int
    reliable: bool
    sup_abs_w_transfer: float
    sup_abs_w_becker: float
    k_theory: float | None = None
    criterion_satisfied: bool | None = None

    @property
    def points(self) -> np.ndarray:
        return annulus_points(self.r_in, self.r_out, self.n_r, self.n_theta)


def annulus_points(r_in: float, r_out: float, n_r: int, n_theta: int) -> np.ndarray:
    radii = np.linspace(r_in, r_out, n_r)
    thetas = 2 * np.pi * np.arange(n_theta) / n_theta
    return radii[:, None] * np.exp(1j * thetas)[None, :]


def _mu_block(ctx, zb, hb):
    try:
        return _mu(ctx, zb, hb)
    except (PointError, UnivalenceError, ArithmeticError):
        mus = np.empty(zb.shape, dtype=complex)
        deg = np.zeros(zb.shape, dtype=bool)
        for i in np.ndindex(zb.shape):
            try:
                m, d = _mu(ctx, np.atleast_1d(zb[i]), np.atleast_1d(hb[i]))
                mus[i], deg[i] = m[0], d[0]
            except (PointError, UnivalenceError, ArithmeticError):
                mus[i], deg[i] = np.nan, True
        return mus, deg


def _w_block(ctx, zb):
    r = np.abs(zb)
    try:
        w, p = transfer_w(ctx, zb / r, np.log(r))
        return np.abs(w), np.abs(becker_w(p))
    except (PointError, UnivalenceError, ArithmeticError):
        nan = np.full(zb.shape, np.nan)
        return nan, nan


def dilatation_report(
    ctx: ChainContext,
    r_in: float = 1.05,
    r_out: float = 3.0,
    n_r: int = 128,
    n_theta: int = 256,
    h: float | None = None,
    *,
    threads: int = 1,
    k_theory: float | None = None,
    criterion_satisfied: bool | None = None,
) -> BeltramiEstimate:
    """Sup of |mu| over an annulus outside the unit disk.

    Alongside mu, both transfer quantities at the matched chain point
    (z/|z|, log|z|) are recorded: |w| from the Möbius form in (A, B) and
    |(p - 1)/(p + 1)|. For A = B = 1 they coincide with |mu|.
    """
    if r_in <= 1 or r_out <= r_in:
        raise ValidationError(f"annulus must satisfy 1 < r_in < r_out, got [{r_in}, {r_out}]")
    z = annulus_points(r_in, r_out, n_r, n_theta)
    hs = _steps(z, h)
    if np.any(r_in - 2 * hs <= 1):
        raise ValidationError("annulus reaches into the seam exclusion zone")

    blocks = [(z[i : i + BLOCK_ROWS], hs[i : i + BLOCK_ROWS]) for i in range(0, n_r, BLOCK_ROWS)]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            mu_parts = list(pool.map(lambda b: _mu_block(ctx, *b), blocks))
            w_parts = list(pool.map(lambda b: _w_block(ctx, b[0]), blocks))
    else:
        mu_parts = [_mu_block(ctx, *b) for b in blocks]
        w_parts = [_w_block(ctx, b[0]) for b in blocks]
    mu = np.concatenate([m for m, _ in mu_parts])
    deg = np.concatenate([d for _, d in mu_parts])
    w_t = np.concatenate([a for a, _ in w_parts])
    w_b = np.concatenate([b for _, b in w_parts])

    amu = np.abs(mu)
    finite = np.isfinite(amu)
    if np.any(finite):
        flat = np.where(finite, amu, -np.inf).ravel()
        i = int(np.argmax(flat))
        sup, worst = float(flat[i]), complex(z.ravel()[i])
    else:
        sup, worst = float("nan"), None
    n_deg = int(np.count_nonzero(deg | ~finite))
    return BeltramiEstimate(
        r_in=r_in,
        r_out=r_out,
        n_r=n_r,
        n_theta=n_theta,
        h=h,
        mu_values=mu,
        sup_abs_mu=sup,
        worst_point=worst,
        n_degenerate=n_deg,
        reliable=n_deg < UNRELIABLE_FRACTION * z.size,
        sup_abs_w_transfer=float(np.nanmax(w_t)) if np.any(np.isfinite(w_t)) else float("nan"),
        sup_abs_w_becker=float(np.nanmax(w_b)) if np.any(np.isfinite(w_b)) else float("nan"),
        k_theory=k_theory,
        criterion_satisfied=criterion_satisfied,
    )


def seam_gaps(ctx: ChainContext, n_theta: int = 1024, eps: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """(theta, |F((1-eps)e^{i theta}) - F((1+eps)e^{i theta})|)."""
    if not 1e-8 <= eps <= 1e-3:
        raise ValidationError(f"eps = {eps:g} outside [1e-8, 1e-3]")
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    e = np.exp(1j * theta)
    gaps = np.abs(extend_point(ctx, (1 - eps) * e) - extend_point(ctx, (1 + eps) * e))
    return theta, gaps


def seam_continuity(ctx: ChainContext, n_theta: int = 1024, eps: float = 1e-6) -> float:
    return float(np.max(seam_gaps(ctx, n_theta, eps)[1]))


def min_image_separation(
    ctx: ChainContext, r_lo: float = 0.5, r_hi: float = 3.0, n_r: int = 40, n_theta: int = 100, tol: float = 1e-9
) -> tuple[float, list[tuple[int, int]]]:
    """Smallest |F(a) - F(b)| over distinct sample points and the colliding pairs (< tol)."""
    radii = np.linspace(r_lo, r_hi, n_r)
    z = (radii[:, None] * np.exp(2j * np.pi * np.arange(n_theta) / n_theta)[None, :]).ravel()
    w = extend_point(ctx, z)
    pts = np.column_stack([w.real, w.imag])
    tree = cKDTree(pts)
    d, _ = tree.query(pts, k=2)
    pairs = sorted(tree.query_pairs(tol))
    return float(np.min(d[:, 1])), pairs
