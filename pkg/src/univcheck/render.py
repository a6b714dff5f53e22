"""Binary PPM (P6) images: margin heatmaps, domain colorings, dilatation maps.

Everything is computed with numpy and rounded with ``np.rint`` so identical
inputs give identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Callable

import numpy as np

from .criteria import MarginField
from .errors import ValidationError

WHITE = np.array([255.0, 255.0, 255.0])
BLUE = np.array([0.0, 64.0, 192.0])
RED = np.array([200.0, 16.0, 16.0])


def write_ppm(path, rgb: np.ndarray) -> None:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValidationError(f"expected an (h, w, 3) image, got shape {rgb.shape}")
    h, w, _ = rgb.shape
    with open(Path(path), "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or parts[2] != b"255":
        raise ValidationError(f"{path}: not an 8-bit P6 image")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)


def margin_colors(m: np.ndarray) -> np.ndarray:
    """White to blue over [0, max], white to red over [min, 0); non-finite is black."""
    m = np.asarray(m, dtype=float)
    finite = np.isfinite(m)
    mf = np.where(finite, m, 0.0)
    hi = float(np.max(mf, initial=0.0))
    lo = float(np.min(mf, initial=0.0))
    pos = np.clip(mf / hi, 0, 1) if hi > 0 else np.zeros_like(mf)
    neg = np.clip(mf / lo, 0, 1) if lo < 0 else np.zeros_like(mf)
    t = np.where(mf >= 0, pos, neg)[..., None]
    target = np.where((mf >= 0)[..., None], BLUE, RED)
    rgb = WHITE + t * (target - WHITE)
    rgb[~finite] = 0.0
    return np.rint(rgb).astype(np.uint8)


def render_margin_heatmap(field: MarginField, path) -> None:
    """Rows are radii (centre at the top), columns are angles."""
    if not np.all(np.isfinite(field.margins)):
        raise ValidationError("margin field contains non-finite values")
    write_ppm(path, margin_colors(field.margins))


def render_beltrami(mu: np.ndarray, k: float, path) -> int:
    """Heatmap of k - |mu|; degenerate (NaN) samples are black. Returns their count."""
    m = k - np.abs(np.asarray(mu))
    write_ppm(path, margin_colors(m))
    return int(np.count_nonzero(~np.isfinite(m)))


def _hls_to_rgb(h: np.ndarray, l: np.ndarray, s: float) -> np.ndarray:
    # Vectorised form of colorsys.hls_to_rgb.
    m2 = np.where(l <= 0.5, l * (1 + s), l + s - l * s)
    m1 = 2 * l - m2

    def channel(hue):
        hue = np.mod(hue, 1.0)
        return np.select(
            [hue < 1 / 6, hue < 0.5, hue < 2 / 3],
            [m1 + (m2 - m1) * hue * 6, m2, m1 + (m2 - m1) * (2 / 3 - hue) * 6],
            m1,
        )

    return np.stack([channel(h + 1 / 3), channel(h), channel(h - 1 / 3)], axis=-1)


def window_points(center: complex, half_width: float, pixels: int) -> np.ndarray:
    """Pixel-centre sample points, top row first (imaginary part decreasing)."""
    offs = (np.arange(pixels) + 0.5) / pixels * 2 - 1
    x = center.real + half_width * offs
    y = center.imag - half_width * offs
    return x[None, :] + 1j * y[:, None]


def _evaluate_rows(func: Callable, z: np.ndarray) -> np.ndarray:
    out = np.full(z.shape, np.nan + 0j)
    for i, row in enumerate(z):
        try:
            out[i] = func(row)
            continue
        except (ArithmeticError, ValueError):
            pass
        for j, zz in enumerate(row):
            try:
                out[i, j] = func(np.atleast_1d(zz))[0]
            except (ArithmeticError, ValueError):
                pass
    return out


def render_domain_coloring(func: Callable, window: tuple[complex, float, int], path) -> int:
    """Hue from arg w, lightness banded by log2 |w|. Returns the number of black error pixels."""
    center, half_width, pixels = window
    if half_width <= 0 or pixels < 1:
        raise ValidationError(f"bad window {window!r}")
    z = window_points(complex(center), float(half_width), int(pixels))
    with np.errstate(all="ignore"):
        w = _evaluate_rows(func, z)
        bad = ~np.isfinite(w) | (w == 0)
        ws = np.where(bad, 1.0, w)
        hue = np.mod(np.angle(ws) / (2 * np.pi), 1.0)
        band = np.mod(np.log2(np.abs(ws)), 1.0)
    light = 0.35 + 0.3 * band
    rgb = 255 * _hls_to_rgb(hue, light, 1.0)
    rgb[bad] = 0.0
    write_ppm(path, np.rint(rgb).astype(np.uint8))
    return int(np.count_nonzero(bad))
