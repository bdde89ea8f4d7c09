"""Pixel buffers, resampling, cropping, and strict 8-bit PNG I/O.

An image is a C-order uint8 array of shape (height, width, channels) with
1 channel (grayscale) or 3 (RGB). A heatmap is a float64 array of shape
(height, width) with values in [0, 1]. 2-D uint8 arrays are accepted
anywhere an image is and treated as single-channel.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
from PIL import Image as _PILImage
from PIL import UnidentifiedImageError

from . import _kernels
from .region import Region, ensure_heatmap, ensure_region

__all__ = [
    "DecodeError",
    "center_crop",
    "center_crop_region",
    "crop",
    "ensure_image",
    "image_dims",
    "load_heatmap",
    "load_image",
    "resize",
    "resize_heatmap_nearest",
    "save_image",
]

_SIXTEEN_BIT_MODES = ("I", "I;16", "I;16B", "I;16L", "I;16N")


class DecodeError(Exception):
    """A file could not be read as a supported 8-bit PNG."""


def ensure_image(img: np.ndarray) -> np.ndarray:
    """Validate image dtype/shape; returns a (H, W, C) view of the input."""
    arr = np.asarray(img)
    if arr.dtype != np.uint8:
        raise ValueError(f"images must be uint8, got dtype {arr.dtype}")
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ValueError(
            f"images must have shape (height, width, 1|3), got {np.asarray(img).shape}"
        )
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"images must be at least 1x1, got shape {arr.shape}")
    return arr


def image_dims(img: np.ndarray) -> tuple[int, int]:
    """(width, height) of an image array."""
    arr = ensure_image(img)
    return arr.shape[1], arr.shape[0]


def resize(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Bilinear resample to out_w x out_h.

    Output pixel i samples the input at ``(i + 0.5) * in_dim / out_dim - 0.5``
    with border clamping; samples round half-away-from-zero back to uint8.
    Resizing to the input size reproduces the input bit-for-bit.
    """
    arr = ensure_image(img)
    out_w = int(out_w)
    out_h = int(out_h)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"resize target must be at least 1x1, got {out_w}x{out_h}")
    return _kernels.resize_bilinear(arr, out_w, out_h)


def resize_heatmap_nearest(hm: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Nearest-neighbor resample of a heatmap, same pixel-center convention."""
    arr = ensure_heatmap(hm)
    out_w = int(out_w)
    out_h = int(out_h)
    if out_w < 1 or out_h < 1:
        raise ValueError(f"resize target must be at least 1x1, got {out_w}x{out_h}")
    in_h, in_w = arr.shape
    xs = np.clip(((np.arange(out_w) + 0.5) * (in_w / out_w)).astype(np.int64), 0, in_w - 1)
    ys = np.clip(((np.arange(out_h) + 0.5) * (in_h / out_h)).astype(np.int64), 0, in_h - 1)
    return arr[ys[:, None], xs[None, :]]


def crop(img: np.ndarray, r: Region) -> np.ndarray:
    """Copy out the pixels of an in-bounds region."""
    arr = ensure_image(img)
    ensure_region(r, arr.shape[1], arr.shape[0])
    return arr[r.y_b : r.y_t, r.x_l : r.x_r].copy()


def center_crop_region(img_w: int, img_h: int, out_w: int, out_h: int) -> Region:
    """Centered out_w x out_h region; ties fall toward the origin."""
    if not (1 <= out_w <= img_w and 1 <= out_h <= img_h):
        raise ValueError(
            f"crop {out_w}x{out_h} does not fit a {img_w}x{img_h} image"
        )
    x_l = (img_w - out_w) // 2
    y_b = (img_h - out_h) // 2
    return Region(x_l, x_l + out_w, y_b, y_b + out_h)


def center_crop(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    arr = ensure_image(img)
    return crop(arr, center_crop_region(arr.shape[1], arr.shape[0], out_w, out_h))


def load_image(path) -> np.ndarray:
    """Read an 8-bit grayscale or RGB PNG into a (H, W, C) uint8 array.

    Anything else (other formats, 16-bit depth, palette or alpha modes) raises
    DecodeError naming the offending file.
    """
    p = Path(path)
    try:
        with _PILImage.open(p) as im:
            if im.format != "PNG":
                raise DecodeError(
                    f"{p}: expected a PNG file, found {im.format or 'unrecognized data'}"
                )
            if im.mode in _SIXTEEN_BIT_MODES:
                raise DecodeError(
                    f"{p}: unsupported bit depth (16-bit); only 8-bit PNGs are supported"
                )
            if im.mode == "L":
                arr = np.asarray(im, dtype=np.uint8)[:, :, None]
            elif im.mode == "RGB":
                arr = np.asarray(im, dtype=np.uint8)
            else:
                raise DecodeError(
                    f"{p}: unsupported PNG mode {im.mode!r}; "
                    "only 8-bit grayscale and RGB are supported"
                )
            return np.ascontiguousarray(arr)
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"{p}: {exc}") from exc


def save_image(img: np.ndarray, path) -> None:
    """Write an image as PNG atomically (temp file, then rename)."""
    arr = ensure_image(img)
    p = Path(path)
    if arr.shape[2] == 1:
        pil = _PILImage.fromarray(arr[:, :, 0], mode="L")
    else:
        pil = _PILImage.fromarray(arr, mode="RGB")
    tmp = p.with_name(p.name + ".tmp")
    try:
        pil.save(tmp, format="PNG")
        os.replace(tmp, p)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def load_heatmap(path) -> np.ndarray:
    """Read an 8-bit grayscale PNG as activations: value / 255 in [0, 1]."""
    p = Path(path)
    try:
        with _PILImage.open(p) as im:
            if im.format != "PNG":
                raise DecodeError(
                    f"{p}: expected a PNG file, found {im.format or 'unrecognized data'}"
                )
            if im.mode in _SIXTEEN_BIT_MODES:
                raise DecodeError(
                    f"{p}: unsupported bit depth (16-bit); only 8-bit PNGs are supported"
                )
            if im.mode != "L":
                raise DecodeError(
                    f"{p}: heatmaps must be 8-bit grayscale PNG, found mode {im.mode!r}"
                )
            return np.asarray(im, dtype=np.uint8).astype(np.float64) / 255.0
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"{p}: {exc}") from exc
