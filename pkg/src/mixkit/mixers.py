"""Pairwise image mixing strategies and exact soft-label allocation.

The general operation obtains a patch from a source image (cut a region, or
resize the whole frame) and pastes it somewhere on a target image; the mixed
label weights the source class by the realized patch-area fraction of the
target frame. Classic cut-and-paste mixing and resize-and-paste mixing are
specific cells of that obtain x paste matrix; pixel blending (mixup) is the
degenerate whole-frame case.

Mixing ratios are kept as exact rationals: lambda is always
``Fraction(patch_area, frame_area)`` computed from realized integer patch
extents, never from the continuous draw that produced them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels, imgcore
from .region import (
    Region,
    SaliencySets,
    ensure_heatmap,
    ensure_region,
    region_from_center,
    sample_center,
    saliency_sets,
)

__all__ = [
    "HALFRES_MODES",
    "OBTAIN_MODES",
    "PASTE_MODES",
    "MixConfig",
    "MixResult",
    "MixedLabel",
    "cutmix",
    "halfres_transform",
    "mix_labels",
    "mix_matrix",
    "mixup",
    "paste",
    "resizemix",
]

OBTAIN_MODES = ("cut_random", "cut_salient", "cut_non_salient", "resize_whole")
PASTE_MODES = ("corresponding", "random", "salient", "non_salient")
HALFRES_MODES = ("rand_crop", "resize", "center_crop")

_OBTAIN_CENTER_STRATEGY = {
    "cut_random": "random",
    "cut_salient": "salient",
    "cut_non_salient": "non_salient",
}


@dataclass(frozen=True)
class MixedLabel:
    """Sparse soft label: (class_id, weight) pairs, weights summing to 1.

    Entries are sorted by class id, merged per class, and zero weights are
    dropped, so equal labels compare equal. Weights are Fractions; the sum
    constraint is exact, not approximate.
    """

    entries: tuple[tuple[int, Fraction], ...]

    def __post_init__(self):
        total = Fraction(0)
        prev = None
        for class_id, weight in self.entries:
            if not isinstance(class_id, int) or class_id < 0:
                raise ValueError(f"class ids must be non-negative integers, got {class_id!r}")
            if prev is not None and class_id <= prev:
                raise ValueError("label entries must be sorted by class id and unique")
            if not isinstance(weight, Fraction) or not (0 < weight <= 1):
                raise ValueError(f"label weights must be Fractions in (0, 1], got {weight!r}")
            total += weight
            prev = class_id
        if total != 1:
            raise ValueError(f"label weights must sum to 1, got {total}")

    @classmethod
    def one_hot(cls, class_id: int) -> "MixedLabel":
        return cls(((int(class_id), Fraction(1)),))

    @classmethod
    def from_pairs(cls, pairs) -> "MixedLabel":
        """Build a label from (class_id, weight) pairs, merging repeats."""
        merged: dict[int, Fraction] = {}
        for class_id, weight in pairs:
            key = int(class_id)
            merged[key] = merged.get(key, Fraction(0)) + _as_fraction(weight)
        entries = tuple(
            (c, w) for c, w in sorted(merged.items()) if w != 0
        )
        return cls(entries)

    def weight(self, class_id: int) -> Fraction:
        for c, w in self.entries:
            if c == class_id:
                return w
        return Fraction(0)

    def to_json(self) -> list[list]:
        return [[c, float(w)] for c, w in self.entries]


@dataclass(frozen=True)
class MixResult:
    """One mixed image plus the provenance needed to audit or replay it.

    ``lam`` is the mixing ratio as an exact Fraction. For region mixers it
    equals paste_region.area() over the frame area; for mixup it is the blend
    weight and paste_region is recorded as the full frame. ``tau`` is the
    scale rate for resize-obtained patches, None otherwise. ``source_region``
    is None when the patch was not cut from the source.
    """

    image: np.ndarray
    label: MixedLabel
    tau: float | None
    lam: Fraction
    source_region: Region | None
    paste_region: Region


@dataclass(frozen=True)
class MixConfig:
    """Obtain/paste strategy selection for the mixing matrix.

    ``alpha`` and ``beta`` bound the scale-rate draw for resize_whole.
    ``area_lambda_law`` names the patch-size law for cut modes and admits
    only "uniform" (target area fraction drawn uniformly from [0, 1]); it is
    a config field so manifests record the law in force.
    """

    obtain: str
    paste_to: str
    alpha: float = 0.1
    beta: float = 0.8
    area_lambda_law: str = "uniform"

    def validate(self) -> "MixConfig":
        if self.obtain not in OBTAIN_MODES:
            raise ValueError(f"unknown obtain mode {self.obtain!r}; expected one of {OBTAIN_MODES}")
        if self.paste_to not in PASTE_MODES:
            raise ValueError(f"unknown paste mode {self.paste_to!r}; expected one of {PASTE_MODES}")
        if self.area_lambda_law != "uniform":
            raise ValueError(f"unsupported area lambda law {self.area_lambda_law!r}")
        if not (0.0 < self.alpha <= self.beta <= 1.0):
            raise ValueError(
                f"scale range must satisfy 0 < alpha <= beta <= 1, got ({self.alpha}, {self.beta})"
            )
        if self.obtain == "resize_whole" and self.paste_to == "corresponding":
            if self.alpha != 1.0 or self.beta != 1.0:
                raise ValueError(
                    "resize_whole with corresponding paste needs matching sizes; "
                    "a scale rate below 1 shrinks the patch, so it is only valid "
                    "with alpha == beta == 1"
                )
        return self

    def needs_source_heatmap(self) -> bool:
        return self.obtain in ("cut_salient", "cut_non_salient")

    def needs_target_heatmap(self) -> bool:
        return self.paste_to in ("salient", "non_salient")

    def summary(self) -> dict:
        return {
            "obtain": self.obtain,
            "paste_to": self.paste_to,
            "alpha": self.alpha,
            "beta": self.beta,
            "area_lambda_law": self.area_lambda_law,
        }


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    raise ValueError(f"cannot interpret {value!r} as an exact weight")


def _as_label(value) -> MixedLabel:
    if isinstance(value, MixedLabel):
        return value
    if isinstance(value, (int, np.integer)):
        return MixedLabel.one_hot(int(value))
    raise ValueError(f"labels must be class ids or MixedLabel, got {value!r}")


def mix_labels(l_s, l_t, lam) -> MixedLabel:
    """Weight the source label by lam and the target label by 1 - lam.

    Inputs may be bare class ids or already-soft MixedLabels. The arithmetic
    is exact: same-class mass merges and the output weights sum to 1.
    """
    frac = _as_fraction(lam)
    if not (0 <= frac <= 1):
        raise ValueError(f"mixing ratio must lie in [0, 1], got {lam!r}")
    src = _as_label(l_s)
    tgt = _as_label(l_t)
    pairs = [(c, w * frac) for c, w in src.entries]
    pairs += [(c, w * (1 - frac)) for c, w in tgt.entries]
    return MixedLabel.from_pairs(pairs)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _check_same_frame(src: np.ndarray, tgt: np.ndarray) -> tuple[int, int]:
    if src.shape != tgt.shape:
        raise ValueError(
            f"source and target must share one resolution, got {src.shape} vs {tgt.shape}"
        )
    return src.shape[1], src.shape[0]


def paste(patch: np.ndarray, target: np.ndarray, r: Region) -> np.ndarray:
    """Overwrite region r of a copy of target with the patch pixels."""
    patch = imgcore.ensure_image(patch)
    target = imgcore.ensure_image(target)
    ensure_region(r, target.shape[1], target.shape[0])
    if patch.shape[0] != r.height() or patch.shape[1] != r.width():
        raise ValueError(
            f"patch shape {patch.shape[1]}x{patch.shape[0]} does not match "
            f"region extent {r.width()}x{r.height()}"
        )
    if patch.shape[2] != target.shape[2]:
        raise ValueError("patch and target must have the same channel count")
    out = target.copy()
    out[r.y_b : r.y_t, r.x_l : r.x_r] = patch
    return out


def _cut_extents(w: int, h: int, rng: np.random.Generator) -> tuple[int, int]:
    # target area fraction ~ U(0,1); side lengths scale with its square root
    lam_target = float(rng.random())
    side = math.sqrt(lam_target)
    w_p = min(max(_round_half_up(w * side), 1), w)
    h_p = min(max(_round_half_up(h * side), 1), h)
    return w_p, h_p


def cutmix(src, tgt, src_label, tgt_label, rng: np.random.Generator) -> MixResult:
    """Cut a random region from src and paste it at the same place on tgt.

    Draw order: area fraction, then center x, then center y. The label mixes
    by the realized region area, not the drawn fraction.
    """
    src = imgcore.ensure_image(src)
    tgt = imgcore.ensure_image(tgt)
    w, h = _check_same_frame(src, tgt)
    w_p, h_p = _cut_extents(w, h, rng)
    center = sample_center("random", None, w, h, rng)
    r = region_from_center(center, w_p, h_p, w, h)
    out = paste(imgcore.crop(src, r), tgt, r)
    lam = Fraction(w_p * h_p, w * h)
    return MixResult(
        image=out,
        label=mix_labels(src_label, tgt_label, lam),
        tau=None,
        lam=lam,
        source_region=r,
        paste_region=r,
    )


def mix_matrix(
    src,
    tgt,
    src_label,
    tgt_label,
    cfg: MixConfig,
    src_heatmap: np.ndarray | None = None,
    tgt_heatmap: np.ndarray | None = None,
    *,
    rng: np.random.Generator,
) -> MixResult:
    """Run one obtain x paste cell of the mixing matrix.

    Draw order is fixed: (1) the size draw (scale rate for resize_whole, area
    fraction for cut modes), (2) the source center when the patch is cut,
    (3) the target center when paste_to is not corresponding. With
    (cut_random, corresponding) the stream and the output match cutmix
    exactly.
    """
    cfg.validate()
    src = imgcore.ensure_image(src)
    tgt = imgcore.ensure_image(tgt)
    w, h = _check_same_frame(src, tgt)

    src_sets = tgt_sets = None
    if cfg.needs_source_heatmap():
        if src_heatmap is None:
            raise ValueError(f"obtain mode {cfg.obtain!r} requires a source heatmap")
        src_sets = saliency_sets(ensure_heatmap(src_heatmap, width=w, height=h))
    if cfg.needs_target_heatmap():
        if tgt_heatmap is None:
            raise ValueError(f"paste mode {cfg.paste_to!r} requires a target heatmap")
        tgt_sets = saliency_sets(ensure_heatmap(tgt_heatmap, width=w, height=h))

    if cfg.obtain == "resize_whole":
        tau = float(rng.uniform(cfg.alpha, cfg.beta))
        p_w = max(1, _round_half_up(tau * w))
        p_h = max(1, _round_half_up(tau * h))
        patch = imgcore.resize(src, p_w, p_h)
        source_region = None
    else:
        tau = None
        p_w, p_h = _cut_extents(w, h, rng)
        center = sample_center(_OBTAIN_CENTER_STRATEGY[cfg.obtain], src_sets, w, h, rng)
        source_region = region_from_center(center, p_w, p_h, w, h)
        patch = imgcore.crop(src, source_region)

    if cfg.paste_to == "corresponding":
        if source_region is not None:
            paste_region = source_region
        else:
            if (p_w, p_h) != (w, h):
                raise ValueError(
                    f"corresponding paste needs a full-size patch, got {p_w}x{p_h} "
                    f"for a {w}x{h} frame (scale rate {tau})"
                )
            paste_region = Region(0, w, 0, h)
    else:
        strategy = "random" if cfg.paste_to == "random" else cfg.paste_to
        center = sample_center(strategy, tgt_sets, w, h, rng)
        paste_region = region_from_center(center, p_w, p_h, w, h)

    out = paste(patch, tgt, paste_region)
    lam = Fraction(p_w * p_h, w * h)
    return MixResult(
        image=out,
        label=mix_labels(src_label, tgt_label, lam),
        tau=tau,
        lam=lam,
        source_region=source_region,
        paste_region=paste_region,
    )


def resizemix(
    src,
    tgt,
    src_label,
    tgt_label,
    alpha: float = 0.1,
    beta: float = 0.8,
    *,
    rng: np.random.Generator,
) -> MixResult:
    """Resize the whole source by a scale rate drawn from [alpha, beta] and
    paste it at a random spot on the target. Equivalent to mix_matrix with
    (resize_whole, random)."""
    cfg = MixConfig(obtain="resize_whole", paste_to="random", alpha=alpha, beta=beta)
    return mix_matrix(src, tgt, src_label, tgt_label, cfg, rng=rng)


def mixup(src, tgt, src_label, tgt_label, lam) -> MixResult:
    """Blend two frames pixel-wise: round(lam * src + (1 - lam) * tgt).

    The paste region is recorded as the full frame; lam here is the blend
    weight supplied by the caller, not an area ratio.
    """
    src = imgcore.ensure_image(src)
    tgt = imgcore.ensure_image(tgt)
    w, h = _check_same_frame(src, tgt)
    frac = _as_fraction(lam)
    if not (0 <= frac <= 1):
        raise ValueError(f"blend weight must lie in [0, 1], got {lam!r}")
    out = _kernels.blend(src, tgt, float(lam))
    return MixResult(
        image=out,
        label=mix_labels(src_label, tgt_label, frac),
        tau=None,
        lam=frac,
        source_region=None,
        paste_region=Region(0, w, 0, h),
    )


def halfres_transform(img, mode: str, rng: np.random.Generator | None = None) -> np.ndarray:
    """Reduce an image to exactly floor(W/2) x floor(H/2) pixels.

    ``rand_crop`` cuts a uniformly placed window (draws x then y), ``resize``
    downsamples bilinearly, ``center_crop`` cuts the centered window.
    """
    arr = imgcore.ensure_image(img)
    w, h = arr.shape[1], arr.shape[0]
    if w < 2 or h < 2:
        raise ValueError(f"image must be at least 2x2 to halve, got {w}x{h}")
    out_w, out_h = w // 2, h // 2
    if mode == "resize":
        return imgcore.resize(arr, out_w, out_h)
    if mode == "center_crop":
        return imgcore.center_crop(arr, out_w, out_h)
    if mode == "rand_crop":
        if rng is None:
            raise ValueError("rand_crop requires an rng")
        x0 = int(rng.integers(0, w - out_w + 1))
        y0 = int(rng.integers(0, h - out_h + 1))
        return imgcore.crop(arr, Region(x0, x0 + out_w, y0, y0 + out_h))
    raise ValueError(f"unknown half-resolution mode {mode!r}; expected one of {HALFRES_MODES}")
