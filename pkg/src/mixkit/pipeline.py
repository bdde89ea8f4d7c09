"""Corpus-scale mixing: manifest ingestion, deterministic seeding, batch
execution, geometry statistics, and half-resolution preprocessing.

Seeding scheme (stated here and in the README because replay depends on it):
``split_seed(seed, k)`` is a SplitMix64 step, state ``seed + (k+1) *
0x9E3779B97F4A7C15`` pushed through the standard 64-bit avalanche
(xor-shift 30, * 0xBF58476D1CE4E5B9, xor-shift 27, * 0x94D049BB133111EB,
xor-shift 31). Output k of a batch uses ``pair_seed = split_seed(global_seed,
k)``; pair selection runs on a PCG64 stream seeded with ``split_seed(pair_seed,
0)`` (source index drawn before target index, uniform with replacement), and
the mixing draws run on a separate stream seeded with ``split_seed(pair_seed,
1)`` so a manifest record can be replayed without knowing the dataset size.
Results depend only on (global_seed, k), never on the worker count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import imgcore
from .mixers import HALFRES_MODES, MixConfig, MixedLabel, halfres_transform, mix_matrix
from .region import Region

__all__ = [
    "DatasetIndex",
    "IndexItem",
    "MixRecord",
    "load_index",
    "mix_stream",
    "replay_record",
    "run_batch",
    "run_halfres",
    "split_seed",
    "stats_report",
]

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_SELECT_STREAM = 0
_MIX_STREAM = 1


def split_seed(seed: int, k: int) -> int:
    """Mix a global seed and an output index into an independent 64-bit seed."""
    z = (seed + (k + 1) * _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def mix_stream(pair_seed: int) -> np.random.Generator:
    """The rng that drives the mixing draws for one output."""
    return np.random.Generator(np.random.PCG64(split_seed(pair_seed, _MIX_STREAM)))


def _select_stream(pair_seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(split_seed(pair_seed, _SELECT_STREAM)))


@dataclass(frozen=True)
class IndexItem:
    image_path: str
    class_id: int
    heatmap_path: str | None
    abs_image: Path
    abs_heatmap: Path | None


@dataclass(frozen=True)
class DatasetIndex:
    """Parsed dataset manifest. Paths resolve against the manifest's directory."""

    items: tuple[IndexItem, ...]
    class_count: int
    root: Path


def load_index(manifest_path) -> DatasetIndex:
    """Parse a TSV manifest: image_path<TAB>class_id[<TAB>heatmap_path].

    Every referenced file must exist; malformed lines fail with their line
    number. An empty file is a valid empty index.
    """
    p = Path(manifest_path)
    root = p.parent
    items = []
    with open(p, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            fields = line.split("\t")
            if len(fields) not in (2, 3):
                raise ValueError(
                    f"{p}:{lineno}: expected 2 or 3 tab-separated fields, found {len(fields)}"
                )
            image_rel = fields[0]
            if not image_rel:
                raise ValueError(f"{p}:{lineno}: empty image path")
            try:
                class_id = int(fields[1])
            except ValueError:
                raise ValueError(
                    f"{p}:{lineno}: class id must be an integer, found {fields[1]!r}"
                ) from None
            if class_id < 0:
                raise ValueError(f"{p}:{lineno}: class id must be non-negative, found {class_id}")
            heatmap_rel = fields[2] if len(fields) == 3 else None
            if heatmap_rel == "":
                raise ValueError(f"{p}:{lineno}: empty heatmap path")
            abs_image = root / image_rel
            if not abs_image.is_file():
                raise ValueError(f"{p}:{lineno}: image file not found: {image_rel}")
            abs_heatmap = None
            if heatmap_rel is not None:
                abs_heatmap = root / heatmap_rel
                if not abs_heatmap.is_file():
                    raise ValueError(f"{p}:{lineno}: heatmap file not found: {heatmap_rel}")
            items.append(
                IndexItem(
                    image_path=image_rel,
                    class_id=class_id,
                    heatmap_path=heatmap_rel,
                    abs_image=abs_image,
                    abs_heatmap=abs_heatmap,
                )
            )
    class_count = max((it.class_id for it in items), default=-1) + 1
    return DatasetIndex(items=tuple(items), class_count=class_count, root=root)


@dataclass(frozen=True)
class MixRecord:
    """Provenance for one batch output, serialized as one JSONL line."""

    output_path: str
    source_path: str
    target_path: str
    strategy: dict
    tau: float | None
    lam: Fraction
    source_region: Region | None
    paste_region: Region
    label: MixedLabel
    pair_seed: int

    def to_json_obj(self) -> dict:
        return {
            "output_path": self.output_path,
            "source_path": self.source_path,
            "target_path": self.target_path,
            "strategy": self.strategy,
            "tau": self.tau,
            "lambda": float(self.lam),
            "source_region": list(self.source_region) if self.source_region else None,
            "paste_region": list(self.paste_region),
            "label": self.label.to_json(),
            "pair_seed": self.pair_seed,
        }


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _check_frame(img: np.ndarray, ref_shape: tuple, path: str) -> None:
    if img.shape != ref_shape:
        raise ValueError(
            f"all images in a batch must share one resolution; {path} has shape "
            f"{img.shape}, expected {ref_shape}"
        )


def _load_pair_heatmap(item: IndexItem, side: str):
    if item.abs_heatmap is None:
        raise ValueError(
            f"strategy requires a {side} heatmap but the manifest lists none for "
            f"{item.image_path}"
        )
    return imgcore.load_heatmap(item.abs_heatmap)


def run_batch(
    index: DatasetIndex,
    cfg: MixConfig,
    n_outputs: int,
    global_seed: int,
    out_dir,
    workers: int = 1,
) -> list[MixRecord]:
    """Generate n_outputs mixed images plus manifest.jsonl under out_dir.

    Output k is a pure function of (global_seed, k) and the dataset, so any
    worker count gives byte-identical results. Images and the manifest are
    written atomically; on error nothing half-written remains and the
    manifest is not produced.
    """
    cfg.validate()
    if n_outputs < 0:
        raise ValueError(f"n_outputs must be non-negative, got {n_outputs}")
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    if not index.items:
        raise ValueError("empty dataset: the index lists no images")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    global_seed = int(global_seed) & _MASK64

    ref_shape = imgcore.load_image(index.items[0].abs_image).shape
    n_items = len(index.items)

    def one(k: int) -> MixRecord:
        pair_seed = split_seed(global_seed, k)
        select = _select_stream(pair_seed)
        src_item = index.items[int(select.integers(0, n_items))]
        tgt_item = index.items[int(select.integers(0, n_items))]
        src = imgcore.load_image(src_item.abs_image)
        _check_frame(src, ref_shape, src_item.image_path)
        tgt = imgcore.load_image(tgt_item.abs_image)
        _check_frame(tgt, ref_shape, tgt_item.image_path)
        src_hm = _load_pair_heatmap(src_item, "source") if cfg.needs_source_heatmap() else None
        tgt_hm = _load_pair_heatmap(tgt_item, "target") if cfg.needs_target_heatmap() else None
        result = mix_matrix(
            src,
            tgt,
            src_item.class_id,
            tgt_item.class_id,
            cfg,
            src_hm,
            tgt_hm,
            rng=mix_stream(pair_seed),
        )
        name = f"mix_{k:06d}.png"
        imgcore.save_image(result.image, out / name)
        return MixRecord(
            output_path=name,
            source_path=src_item.image_path,
            target_path=tgt_item.image_path,
            strategy=cfg.summary(),
            tau=result.tau,
            lam=result.lam,
            source_region=result.source_region,
            paste_region=result.paste_region,
            label=result.label,
            pair_seed=pair_seed,
        )

    records: list = [None] * n_outputs
    if workers == 1:
        for k in range(n_outputs):
            records[k] = one(k)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(one, k): k for k in range(n_outputs)}
            for fut in as_completed(futures):
                records[futures[fut]] = fut.result()

    lines = "".join(json.dumps(r.to_json_obj()) + "\n" for r in records)
    _atomic_write_text(out / "manifest.jsonl", lines)
    return records


def replay_record(record: dict, index: DatasetIndex) -> np.ndarray:
    """Re-run one parsed manifest record; returns the mixed image.

    The mixing stream is rebuilt from the recorded pair_seed, so the result
    is byte-identical to the stored output.
    """
    strategy = record["strategy"]
    cfg = MixConfig(
        obtain=strategy["obtain"],
        paste_to=strategy["paste_to"],
        alpha=strategy["alpha"],
        beta=strategy["beta"],
        area_lambda_law=strategy.get("area_lambda_law", "uniform"),
    )
    by_path = {it.image_path: it for it in index.items}
    src_item = by_path[record["source_path"]]
    tgt_item = by_path[record["target_path"]]
    src = imgcore.load_image(src_item.abs_image)
    tgt = imgcore.load_image(tgt_item.abs_image)
    src_hm = _load_pair_heatmap(src_item, "source") if cfg.needs_source_heatmap() else None
    tgt_hm = _load_pair_heatmap(tgt_item, "target") if cfg.needs_target_heatmap() else None
    result = mix_matrix(
        src,
        tgt,
        src_item.class_id,
        tgt_item.class_id,
        cfg,
        src_hm,
        tgt_hm,
        rng=mix_stream(record["pair_seed"]),
    )
    return result.image


def stats_report(
    cfg: MixConfig, n_samples: int, image_dims: tuple[int, int], global_seed: int
) -> dict:
    """Simulate mixing geometry without pixel data and summarize it.

    Covers the heatmap-free strategies (cut_random and resize_whole obtains,
    corresponding and random pastes); saliency strategies need real
    activations and are rejected. Draws run vectorized on a single PCG64
    stream seeded by global_seed, in blocks: size draws, then source center
    x and y when a region is cut, then target center x and y when pasting at
    a random spot.
    """
    cfg.validate()
    if cfg.needs_source_heatmap() or cfg.needs_target_heatmap():
        raise ValueError("geometry statistics support only non-saliency strategies")
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    w, h = int(image_dims[0]), int(image_dims[1])
    if w < 1 or h < 1:
        raise ValueError(f"image dims must be at least 1x1, got {w}x{h}")

    rng = np.random.Generator(np.random.PCG64(int(global_seed) & _MASK64))

    if cfg.obtain == "resize_whole":
        tau = rng.uniform(cfg.alpha, cfg.beta, size=n_samples)
        p_w = np.maximum(1, np.floor(tau * w + 0.5).astype(np.int64))
        p_h = np.maximum(1, np.floor(tau * h + 0.5).astype(np.int64))
        analytic = (cfg.alpha**2 + cfg.alpha * cfg.beta + cfg.beta**2) / 3.0
    else:
        lam_target = rng.random(size=n_samples)
        side = np.sqrt(lam_target)
        p_w = np.clip(np.floor(w * side + 0.5).astype(np.int64), 1, w)
        p_h = np.clip(np.floor(h * side + 0.5).astype(np.int64), 1, h)
        tau = None
        analytic = 0.5

    lam = (p_w * p_h) / float(w * h)

    if cfg.obtain != "resize_whole":
        src_cx = rng.integers(0, w, size=n_samples)
        src_cy = rng.integers(0, h, size=n_samples)
    else:
        src_cx = src_cy = None

    if cfg.paste_to == "random":
        paste_cx = rng.integers(0, w, size=n_samples)
        paste_cy = rng.integers(0, h, size=n_samples)
    elif src_cx is not None:
        paste_cx, paste_cy = src_cx, src_cy
    else:
        # resize_whole + corresponding: the paste covers the full frame
        paste_cx = np.full(n_samples, w // 2, dtype=np.int64)
        paste_cy = np.full(n_samples, h // 2, dtype=np.int64)

    grid_w = min(w, 16)
    grid_h = min(h, 16)
    gx = paste_cx * grid_w // w
    gy = paste_cy * grid_h // h
    coverage = np.zeros((grid_h, grid_w), dtype=np.int64)
    np.add.at(coverage, (gy, gx), 1)

    edges = np.linspace(0.0, 1.0, 21)
    lam_counts, _ = np.histogram(lam, bins=edges)

    def moments(a: np.ndarray) -> dict:
        return {
            "mean": float(a.mean()),
            "stddev": float(a.std()),
            "min": float(a.min()),
            "max": float(a.max()),
        }

    report = {
        "strategy": cfg.summary(),
        "n_samples": int(n_samples),
        "width": w,
        "height": h,
        "seed": int(global_seed),
        "lambda": {**moments(lam), "histogram": {"bin_edges": edges.tolist(), "counts": lam_counts.tolist()}},
        "tau": moments(tau) if tau is not None else None,
        "analytic_mean_lambda": analytic,
        "paste_center_coverage": {
            "grid_width": grid_w,
            "grid_height": grid_h,
            "counts": coverage.tolist(),
        },
    }
    return report


def run_halfres(
    index: DatasetIndex,
    train_mode: str,
    val_mode: str,
    global_seed: int,
    out_dir,
) -> list[dict]:
    """Write half-resolution variants of every indexed image plus a manifest.

    Item i runs on its own stream seeded by split_seed(global_seed, i); the
    train transform draws before the val transform. Outputs land as
    train_<i>.png and val_<i>.png with one JSONL manifest line per item.
    """
    for mode in (train_mode, val_mode):
        if mode not in HALFRES_MODES:
            raise ValueError(f"unknown half-resolution mode {mode!r}; expected one of {HALFRES_MODES}")
    if not index.items:
        raise ValueError("empty dataset: the index lists no images")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    global_seed = int(global_seed) & _MASK64

    records = []
    for i, item in enumerate(index.items):
        item_seed = split_seed(global_seed, i)
        rng = np.random.Generator(np.random.PCG64(item_seed))
        img = imgcore.load_image(item.abs_image)
        train_img = halfres_transform(img, train_mode, rng)
        val_img = halfres_transform(img, val_mode, rng)
        train_name = f"train_{i:06d}.png"
        val_name = f"val_{i:06d}.png"
        imgcore.save_image(train_img, out / train_name)
        imgcore.save_image(val_img, out / val_name)
        records.append(
            {
                "index": i,
                "input_path": item.image_path,
                "class_id": item.class_id,
                "train_mode": train_mode,
                "val_mode": val_mode,
                "train_path": train_name,
                "val_path": val_name,
                "item_seed": item_seed,
            }
        )

    lines = "".join(json.dumps(r) + "\n" for r in records)
    _atomic_write_text(out / "manifest.jsonl", lines)
    return records
