"""Criterion-independent injectivity checks.

None of these can prove univalence; they either find a concrete witness
against it or fail to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import functions as fc
from .errors import DomainError, InconclusiveError, ValidationError
from .grid import DiskGrid, UNIFORM

CONSISTENT = "consistent-with-univalent"
NON_UNIVALENT = "non-univalent"
INCONCLUSIVE = "inconclusive"

PAIRWISE = "pairwise"
ARGUMENT = "argument-principle"
LOCAL = "local"

DEFAULT_TOL = 1e-9
CONTOUR_CLEARANCE = 1e-8
DEFAULT_NODES = 1024
MAX_NODES = 2**18
MAX_PAIRWISE_POINTS = 10_000
MAX_CANDIDATES = 2000

ORACLE_GRID = DiskGrid(n_r=40, n_theta=128, r_max=0.999)


@dataclass(frozen=True)
class OracleReport:
    method: str
    verdict: str
    witness: tuple | None = None
    samples_used: int = 0
    detail: str = ""

    @property
    def refutes(self) -> bool:
        return self.verdict == NON_UNIVALENT


def _unique_points(grid: DiskGrid) -> np.ndarray:
    z = grid.points().ravel()
    _, first = np.unique(z, return_index=True)
    return z[np.sort(first)]


def _newton(f: fc.AnalyticFunction, target: complex, z0: complex, r_limit: float, order: int = 0):
    """Solve f^(order)(z) = target from z0; None if it leaves |z| < r_limit or stalls."""
    z = complex(z0)
    for _ in range(60):
        try:
            d = f.derivatives(np.asarray(z), order + 1)
        except (ArithmeticError, ValueError):
            return None
        val, der = complex(d[order]) - target, complex(d[order + 1])
        if der == 0 or not np.isfinite(der):
            return None
        step = val / der
        z -= step
        if not abs(z) < r_limit:
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            return z
    return z if abs(complex(f.derivatives(np.asarray(z), order)[order]) - target) < DEFAULT_TOL else None


def pairwise_injectivity(f: fc.AnalyticFunction, grid: DiskGrid = ORACLE_GRID, tol: float = DEFAULT_TOL) -> OracleReport:
    """Look for two distinct points with (numerically) equal images.

    Exact collisions between grid points are reported first. Otherwise pairs
    of well-separated grid points whose images are within one local grid
    cell of each other seed a Newton solve of f(zeta) = f(z_i); a converged
    zeta away from z_i is a collision witness.
    """
    z = _unique_points(grid)
    if z.size > MAX_PAIRWISE_POINTS:
        raise ValidationError(f"pairwise scan limited to {MAX_PAIRWISE_POINTS} points, grid has {z.size}")
    jet = fc.eval_jet(f, z)
    w = jet.value
    pts = np.column_stack([w.real, w.imag])
    tree = cKDTree(pts)

    for i, j in sorted(tree.query_pairs(tol)):
        if abs(z[i] - z[j]) > 10 * tol:
            return OracleReport(
                PAIRWISE,
                NON_UNIVALENT,
                (complex(z[i]), complex(z[j])),
                z.size,
                f"|f(z1) - f(z2)| = {abs(w[i] - w[j]):.3e} on grid points",
            )

    dr = np.max(np.diff(grid.radii))
    spacing = np.maximum(dr, np.abs(z) * 2 * np.pi / grid.n_theta)
    radius = 2 * np.abs(jet.d1) * spacing
    neighbours = tree.query_ball_point(pts, radius)
    cands = []
    for i, near in enumerate(neighbours):
        for j in near:
            if j > i and abs(z[i] - z[j]) > 3 * max(spacing[i], spacing[j]):
                cands.append((abs(w[i] - w[j]) / radius[i], i, j))
    # Closest images (relative to the local cell) are polished first.
    cands.sort()
    tried = 0
    for _, i, j in cands[:MAX_CANDIDATES]:
        tried += 1
        zeta = _newton(f, complex(w[i]), complex(z[j]), grid.r_max)
        if zeta is not None and abs(zeta - z[i]) > max(10 * tol, spacing[i]):
            gap = abs(complex(fc.evaluate(f, zeta)) - complex(w[i]))
            if gap < tol:
                return OracleReport(
                    PAIRWISE,
                    NON_UNIVALENT,
                    (complex(z[i]), zeta),
                    z.size,
                    f"Newton-polished collision, |f(z1) - f(z2)| = {gap:.3e}",
                )
    return OracleReport(PAIRWISE, CONSISTENT, None, z.size, f"no collision; {tried} candidate pairs polished")


def _contour_sums(f: fc.AnalyticFunction, targets: np.ndarray, r: float, n: int, center: complex = 0j):
    theta = 2 * np.pi * np.arange(n) / n
    ze = r * np.exp(1j * theta)
    v, d1 = f.derivatives(center + ze, 1)
    diff = v[None, :] - targets[:, None]
    clearance = np.min(np.abs(diff), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        sums = np.mean(ze[None, :] * d1[None, :] / diff, axis=1)
    return sums, clearance


def _stable_counts(f, targets, r, n, center=0j):
    prev = None
    while n <= MAX_NODES:
        sums, _ = _contour_sums(f, targets, r, n, center)
        counts = np.rint(sums.real).astype(int)
        settled = np.abs(sums - counts) < 0.25
        if prev is not None and np.all(counts == prev) and np.all(settled):
            return counts, n
        prev = counts
        n *= 2
    raise InconclusiveError(f"argument-principle counts did not settle by n = {MAX_NODES}")


def argument_principle_count(
    f: fc.AnalyticFunction, target: complex, r: float, n: int = DEFAULT_NODES, *, center: complex = 0j
) -> int:
    """Number of solutions of f(z) = target in |z - center| < r.

    The trapezoid rule on (1/2 pi i) \\oint f'/(f - target) dz is repeated
    with doubled node counts until two consecutive rounded counts agree. If
    the contour passes within 1e-8 of a solution the radius shrinks by 1%,
    at most 50 times.
    """
    targets = np.array([complex(target)])
    for _ in range(51):
        if abs(center) + r >= f.radius:
            raise DomainError(f"contour |z - {center}| = {r} leaves the disk of validity")
        _, clearance = _contour_sums(f, targets, r, n, center)
        if clearance[0] > CONTOUR_CLEARANCE:
            return int(_stable_counts(f, targets, r, n, center)[0][0])
        r *= 0.99
    raise InconclusiveError(f"contour stays within {CONTOUR_CLEARANCE:g} of a solution of f(z) = {target}")


def argument_principle_injectivity(
    f: fc.AnalyticFunction, grid: DiskGrid = ORACLE_GRID, n_targets: int = 64, n: int = DEFAULT_NODES
) -> OracleReport:
    """Count preimages of f(z_j) in |z| < r_max for sample points z_j."""
    r = grid.r_max
    z = _unique_points(grid)
    z = z[np.abs(z) <= 0.95 * r]
    step = max(1, z.size // n_targets)
    sources = z[::step][:n_targets]
    targets = fc.evaluate(f, sources)
    _, clearance = _contour_sums(f, targets, r, n)
    keep = clearance > CONTOUR_CLEARANCE
    sources, targets = sources[keep], targets[keep]
    try:
        counts, used = _stable_counts(f, targets, r, n)
    except InconclusiveError as exc:
        return OracleReport(ARGUMENT, INCONCLUSIVE, None, int(sources.size), str(exc))
    if np.any(counts >= 2):
        i = int(np.flatnonzero(counts >= 2)[0])
        return OracleReport(
            ARGUMENT,
            NON_UNIVALENT,
            (complex(targets[i]), complex(sources[i]), int(counts[i])),
            int(sources.size),
            f"f(z) = f({sources[i]:.6g}) has {counts[i]} solutions in |z| < {r} (n = {used})",
        )
    if np.any(counts < 1):
        i = int(np.flatnonzero(counts < 1)[0])
        return OracleReport(
            ARGUMENT, INCONCLUSIVE, None, int(sources.size), f"count {counts[i]} < 1 for source {sources[i]:.6g}"
        )
    return OracleReport(ARGUMENT, CONSISTENT, None, int(sources.size), f"all counts 1 (n = {used})")


def local_univalence(f: fc.AnalyticFunction, grid: DiskGrid = ORACLE_GRID, tol: float = DEFAULT_TOL) -> OracleReport:
    """Look for a zero of f' in the sampled disk.

    Candidates are the smallest |f'| grid values, polished by Newton on f';
    a polished zero is certified by counting zeros of f' on a small circle
    around it.
    """
    z = _unique_points(grid)
    d1 = np.abs(fc.eval_jet(f, z).d1)
    order = np.argsort(d1, kind="stable")[:16]
    for i in order:
        root = _newton(f, 0j, complex(z[i]), grid.r_max, order=1)
        if root is None:
            continue
        if abs(complex(f.derivatives(np.asarray(root), 1)[1])) >= tol:
            continue
        rho = min(0.05, 0.5 * (grid.r_max - abs(root)))
        try:
            zeros = argument_principle_count(fc.derivative(f), 0j, rho, 256, center=root)
        except (InconclusiveError, DomainError):
            continue
        if zeros >= 1:
            return OracleReport(
                LOCAL, NON_UNIVALENT, (root,), int(z.size), f"f'({root:.12g}) = 0, {zeros} zero(s) of f' nearby"
            )
    try:
        total = argument_principle_count(fc.derivative(f), 0j, grid.r_max)
    except (InconclusiveError, DomainError) as exc:
        return OracleReport(LOCAL, INCONCLUSIVE, None, int(z.size), f"zero count of f' failed: {exc}")
    if total >= 1:
        return OracleReport(LOCAL, INCONCLUSIVE, None, int(z.size), f"f' has {total} zero(s) but none was located")
    return OracleReport(LOCAL, CONSISTENT, None, int(z.size), "f' has no zeros in the sampled disk")


def run_oracles(f: fc.AnalyticFunction, grid: DiskGrid = ORACLE_GRID) -> list[OracleReport]:
    return [pairwise_injectivity(f, grid), argument_principle_injectivity(f, grid), local_univalence(f, grid)]


def uniform_grid(n_r: int, n_theta: int, r_max: float) -> DiskGrid:
    return DiskGrid(n_r=n_r, n_theta=n_theta, r_max=r_max, clustering=UNIFORM)
