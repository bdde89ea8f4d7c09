"""Rectangular regions, activation-extrema coordinate sets, and patch placement.

Coordinates follow the package convention: x indexes columns, y indexes rows,
origin at the top-left. A region is half-open on both axes, covering
``[x_l, x_r) x [y_b, y_t)``, so ``width = x_r - x_l`` and pixel (x, y) lies
inside iff ``x_l <= x < x_r and y_b <= y < y_t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "Region",
    "SaliencySets",
    "ensure_heatmap",
    "ensure_region",
    "region_from_center",
    "saliency_sets",
    "sample_center",
    "sample_region",
]

CENTER_STRATEGIES = ("salient", "non_salient", "random")


class Region(NamedTuple):
    x_l: int
    x_r: int
    y_b: int
    y_t: int

    def width(self) -> int:
        return self.x_r - self.x_l

    def height(self) -> int:
        return self.y_t - self.y_b

    def area(self) -> int:
        return self.width() * self.height()

    def center(self) -> tuple[float, float]:
        return ((self.x_l + self.x_r) / 2, (self.y_b + self.y_t) / 2)


def ensure_region(r: Region, img_w: int | None = None, img_h: int | None = None) -> Region:
    """Validate that a region is nonempty and, if bounds are given, in-bounds."""
    if not all(isinstance(v, int) for v in r):
        raise ValueError(f"region bounds must be integers, got {r!r}")
    if r.x_l >= r.x_r or r.y_b >= r.y_t:
        raise ValueError(f"region must be nonempty, got {r!r}")
    if img_w is not None and (r.x_l < 0 or r.x_r > img_w):
        raise ValueError(f"region {r!r} exceeds image width {img_w}")
    if img_h is not None and (r.y_b < 0 or r.y_t > img_h):
        raise ValueError(f"region {r!r} exceeds image height {img_h}")
    return r


def ensure_heatmap(
    hm: np.ndarray, width: int | None = None, height: int | None = None
) -> np.ndarray:
    """Validate a 2-D float activation map with values in [0, 1]."""
    arr = np.asarray(hm, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"heatmap must be a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("heatmap contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("heatmap values must lie in [0, 1]")
    if width is not None and arr.shape[1] != width:
        raise ValueError(f"heatmap width {arr.shape[1]} does not match image width {width}")
    if height is not None and arr.shape[0] != height:
        raise ValueError(f"heatmap height {arr.shape[0]} does not match image height {height}")
    return arr


@dataclass(frozen=True)
class SaliencySets:
    """Coordinates of the activation extrema of one heatmap.

    ``salient`` holds every (x, y) whose activation reaches the map maximum
    ``t_u``; ``non_salient`` every (x, y) at the map minimum ``t_l``. Both are
    (n, 2) int arrays in row-major scan order, so ties resolve the same way
    on every run.
    """

    salient: np.ndarray
    non_salient: np.ndarray
    t_u: float
    t_l: float


def saliency_sets(heatmap: np.ndarray) -> SaliencySets:
    hm = ensure_heatmap(heatmap)
    t_u = float(hm.max())
    t_l = float(hm.min())
    ys, xs = np.nonzero(hm >= t_u)
    salient = np.stack([xs, ys], axis=1)
    ys, xs = np.nonzero(hm <= t_l)
    non_salient = np.stack([xs, ys], axis=1)
    return SaliencySets(salient=salient, non_salient=non_salient, t_u=t_u, t_l=t_l)


def region_from_center(
    center: tuple[int, int], w_p: int, h_p: int, img_w: int, img_h: int
) -> Region:
    """Place a w_p x h_p patch around a center pixel, shifted fully in-bounds.

    The raw span is ``[ceil(c - extent/2), floor(c + extent/2))``. A span that
    underruns the image is pinned to the leading edge, one that overruns is
    pinned to the trailing edge, and the realized extent always equals the
    requested extent exactly.
    """
    x_c, y_c = center
    if not (1 <= w_p <= img_w and 1 <= h_p <= img_h):
        raise ValueError(
            f"patch {w_p}x{h_p} does not fit a {img_w}x{img_h} image"
        )
    if not (0 <= x_c < img_w and 0 <= y_c < img_h):
        raise ValueError(f"center {center!r} lies outside a {img_w}x{img_h} image")
    x_l = math.ceil(x_c - w_p / 2)
    x_r = math.floor(x_c + w_p / 2)
    x_l, x_r = _clamp_span(x_l, x_r, w_p, img_w)
    y_b = math.ceil(y_c - h_p / 2)
    y_t = math.floor(y_c + h_p / 2)
    y_b, y_t = _clamp_span(y_b, y_t, h_p, img_h)
    return Region(x_l, x_r, y_b, y_t)


def _clamp_span(lo: int, hi: int, extent: int, limit: int) -> tuple[int, int]:
    if lo <= 0:
        lo, hi = 0, extent
    elif hi >= limit:
        lo, hi = limit - extent, limit
    if hi - lo != extent:
        # odd extents lose one pixel to the ceil/floor pair; extend the far edge
        hi += 1
        if hi >= limit:
            lo, hi = limit - extent, limit
    return lo, hi


def sample_center(
    strategy: str,
    sets: SaliencySets | None,
    img_w: int,
    img_h: int,
    rng: np.random.Generator,
) -> tuple[int, int]:
    """Draw a patch center pixel.

    ``random`` draws x then y uniformly over the image. ``salient`` and
    ``non_salient`` draw uniformly from the matching coordinate set, one rng
    draw per call even when the set is a singleton.
    """
    if strategy == "random":
        x = int(rng.integers(0, img_w))
        y = int(rng.integers(0, img_h))
        return x, y
    if strategy not in ("salient", "non_salient"):
        raise ValueError(f"unknown center strategy {strategy!r}")
    if sets is None:
        raise ValueError(f"{strategy} center sampling requires saliency sets")
    coords = sets.salient if strategy == "salient" else sets.non_salient
    if len(coords) == 0:
        raise ValueError(f"{strategy} coordinate set is empty")
    i = int(rng.integers(0, len(coords)))
    return int(coords[i, 0]), int(coords[i, 1])


def sample_region(
    strategy: str,
    w_p: int,
    h_p: int,
    sets: SaliencySets | None,
    img_w: int,
    img_h: int,
    rng: np.random.Generator,
) -> Region:
    """Sample a center with the given strategy and place the patch around it."""
    center = sample_center(strategy, sets, img_w, img_h, rng)
    return region_from_center(center, w_p, h_p, img_w, img_h)
