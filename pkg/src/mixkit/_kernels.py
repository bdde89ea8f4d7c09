"""Hot pixel kernels: bilinear resampling and weighted blending.

Two interchangeable backends. The numba backend compiles plain loops with
``@njit``; the numpy backend runs the same float64 arithmetic vectorized.
numba is used when importable unless the environment variable
``MIXKIT_BACKEND`` is set to ``numpy``. Both backends evaluate the same
expression tree in float64, so their uint8 outputs are bit-identical
(asserted by the test suite).

Resampling convention: an output pixel i samples the input at
``(i + 0.5) * (in_dim / out_dim) - 0.5``, clamped to the borders, and the
interpolated value is rounded half-away-from-zero to 8 bits.
"""

import os

import numpy as np

__all__ = [
    "HAS_NUMBA",
    "USE_NUMBA",
    "active_backend",
    "resize_bilinear",
    "resize_bilinear_numpy",
    "resize_bilinear_numba",
    "blend",
    "blend_numpy",
    "blend_numba",
]

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    njit = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("MIXKIT_BACKEND", "").strip().lower() != "numpy"


def active_backend() -> str:
    """Name of the backend that public kernel calls dispatch to."""
    return "numba" if USE_NUMBA else "numpy"


def resize_bilinear_numpy(src: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Resample a (H, W, C) uint8 array to (out_h, out_w, C), vectorized."""
    in_h, in_w = src.shape[:2]
    scale_x = in_w / out_w
    scale_y = in_h / out_h
    sx = (np.arange(out_w, dtype=np.float64) + 0.5) * scale_x - 0.5
    sy = (np.arange(out_h, dtype=np.float64) + 0.5) * scale_y - 0.5
    np.clip(sx, 0.0, in_w - 1.0, out=sx)
    np.clip(sy, 0.0, in_h - 1.0, out=sy)
    x0 = sx.astype(np.int64)
    y0 = sy.astype(np.int64)
    x1 = np.minimum(x0 + 1, in_w - 1)
    y1 = np.minimum(y0 + 1, in_h - 1)
    fx = (sx - x0)[None, :, None]
    fy = (sy - y0)[:, None, None]
    img = src.astype(np.float64)
    p00 = img[y0[:, None], x0[None, :]]
    p01 = img[y0[:, None], x1[None, :]]
    p10 = img[y1[:, None], x0[None, :]]
    p11 = img[y1[:, None], x1[None, :]]
    val = (p00 * (1.0 - fx) + p01 * fx) * (1.0 - fy) + (p10 * (1.0 - fx) + p11 * fx) * fy
    return np.floor(val + 0.5).astype(np.uint8)


def _resize_bilinear_loops(src, out_w, out_h):
    in_h, in_w, ch = src.shape
    scale_x = in_w / out_w
    scale_y = in_h / out_h
    out = np.empty((out_h, out_w, ch), dtype=np.uint8)
    for oy in range(out_h):
        sy = (oy + 0.5) * scale_y - 0.5
        if sy < 0.0:
            sy = 0.0
        elif sy > in_h - 1.0:
            sy = in_h - 1.0
        y0 = int(sy)
        y1 = y0 + 1
        if y1 > in_h - 1:
            y1 = in_h - 1
        fy = sy - y0
        for ox in range(out_w):
            sx = (ox + 0.5) * scale_x - 0.5
            if sx < 0.0:
                sx = 0.0
            elif sx > in_w - 1.0:
                sx = in_w - 1.0
            x0 = int(sx)
            x1 = x0 + 1
            if x1 > in_w - 1:
                x1 = in_w - 1
            fx = sx - x0
            for c in range(ch):
                p00 = np.float64(src[y0, x0, c])
                p01 = np.float64(src[y0, x1, c])
                p10 = np.float64(src[y1, x0, c])
                p11 = np.float64(src[y1, x1, c])
                val = (p00 * (1.0 - fx) + p01 * fx) * (1.0 - fy) + (
                    p10 * (1.0 - fx) + p11 * fx
                ) * fy
                out[oy, ox, c] = np.uint8(np.floor(val + 0.5))
    return out


def blend_numpy(a: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    """Per-pixel weighted average round(lam * a + (1 - lam) * b), vectorized."""
    one_minus = 1.0 - lam
    val = a.astype(np.float64) * lam + b.astype(np.float64) * one_minus
    return np.floor(val + 0.5).astype(np.uint8)


def _blend_loops(a, b, lam):
    h, w, ch = a.shape
    one_minus = 1.0 - lam
    out = np.empty((h, w, ch), dtype=np.uint8)
    for y in range(h):
        for x in range(w):
            for c in range(ch):
                val = np.float64(a[y, x, c]) * lam + np.float64(b[y, x, c]) * one_minus
                out[y, x, c] = np.uint8(np.floor(val + 0.5))
    return out


if HAS_NUMBA:
    resize_bilinear_numba = njit(cache=True)(_resize_bilinear_loops)
    blend_numba = njit(cache=True)(_blend_loops)
else:
    resize_bilinear_numba = None
    blend_numba = None


def resize_bilinear(src: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    if USE_NUMBA:
        return resize_bilinear_numba(src, out_w, out_h)
    return resize_bilinear_numpy(src, out_w, out_h)


def blend(a: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    if USE_NUMBA:
        return blend_numba(a, b, lam)
    return blend_numpy(a, b, lam)
