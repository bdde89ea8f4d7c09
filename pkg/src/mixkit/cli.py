"""Command-line front end.

Subcommands: ``mix`` (one pair), ``batch`` (corpus run), ``halfres``
(half-resolution preprocessing), ``stats`` (geometry simulation), ``grid``
(contact sheet from a batch manifest). Machine-readable JSON goes to stdout,
diagnostics to stderr. Exit codes: 0 success, 1 flag or usage error, 2 file
I/O or decode error, 3 dimension or heatmap contract violation. ``--seed``
falls back to the MIXKIT_SEED environment variable, then to 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import imgcore, pipeline
from .mixers import (
    HALFRES_MODES,
    OBTAIN_MODES,
    PASTE_MODES,
    MixConfig,
    cutmix,
    mix_matrix,
    mixup,
    resizemix,
)

__all__ = ["main", "entry"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CONTRACT = 3

_MASK64 = (1 << 64) - 1

STRATEGIES = ("resizemix", "cutmix", "mixup", "matrix")


class CliError(Exception):
    """Flag or usage problem; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value & _MASK64
    env = os.environ.get("MIXKIT_SEED")
    if env is not None and env != "":
        try:
            return int(env) & _MASK64
        except ValueError:
            raise CliError(f"MIXKIT_SEED must be an integer, found {env!r}") from None
    return 0


def _parse_dims(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise CliError(f"dims must look like WIDTHxHEIGHT, got {text!r}")
    try:
        w, h = int(parts[0]), int(parts[1])
    except ValueError:
        raise CliError(f"dims must look like WIDTHxHEIGHT, got {text!r}") from None
    if w < 1 or h < 1:
        raise CliError(f"dims must be at least 1x1, got {text!r}")
    return w, h


def _add_strategy_flags(sub, include_mixup: bool):
    choices = STRATEGIES if include_mixup else tuple(s for s in STRATEGIES if s != "mixup")
    sub.add_argument("--strategy", required=True, choices=choices)
    sub.add_argument("--alpha", type=float, default=0.1, help="lower scale-rate bound")
    sub.add_argument("--beta", type=float, default=0.8, help="upper scale-rate bound")
    sub.add_argument("--obtain", choices=OBTAIN_MODES, help="matrix: how to obtain the patch")
    sub.add_argument("--paste", choices=PASTE_MODES, help="matrix: where to paste it")
    sub.add_argument("--seed", type=int, default=None)


def _config_from_args(args) -> MixConfig:
    if args.strategy == "matrix":
        if args.obtain is None or args.paste is None:
            raise CliError("--strategy matrix requires --obtain and --paste")
        return MixConfig(obtain=args.obtain, paste_to=args.paste, alpha=args.alpha, beta=args.beta)
    if args.obtain is not None or args.paste is not None:
        raise CliError("--obtain/--paste apply only to --strategy matrix")
    if args.strategy == "resizemix":
        return MixConfig(obtain="resize_whole", paste_to="random", alpha=args.alpha, beta=args.beta)
    if args.strategy == "cutmix":
        return MixConfig(obtain="cut_random", paste_to="corresponding", alpha=1.0, beta=1.0)
    raise CliError(f"--strategy {args.strategy} is not a batch strategy")


def build_parser() -> _Parser:
    parser = _Parser(prog="mixkit", description="Image data-mixing toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    p_mix = subs.add_parser("mix", help="mix one source/target image pair")
    p_mix.add_argument("source", help="source image (PNG)")
    p_mix.add_argument("target", help="target image (PNG)")
    p_mix.add_argument("-o", "--out", required=True, help="output PNG path")
    _add_strategy_flags(p_mix, include_mixup=True)
    p_mix.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="mixup blend weight in [0, 1]")
    p_mix.add_argument("--src-heatmap", default=None, help="grayscale PNG activations for the source")
    p_mix.add_argument("--tgt-heatmap", default=None, help="grayscale PNG activations for the target")
    p_mix.add_argument("--upscale-heatmaps", action="store_true",
                       help="nearest-neighbor rescale heatmaps to the image size")
    p_mix.add_argument("--src-class", type=int, default=0)
    p_mix.add_argument("--tgt-class", type=int, default=1)
    p_mix.set_defaults(func=cmd_mix)

    p_batch = subs.add_parser("batch", help="mix a whole corpus from a TSV manifest")
    p_batch.add_argument("manifest", help="TSV: image_path<TAB>class_id[<TAB>heatmap_path]")
    p_batch.add_argument("--out-dir", required=True)
    p_batch.add_argument("--n", type=int, required=True, help="number of mixed outputs")
    p_batch.add_argument("--workers", type=int, default=1)
    _add_strategy_flags(p_batch, include_mixup=False)
    p_batch.set_defaults(func=cmd_batch)

    p_half = subs.add_parser("halfres", help="half-resolution preprocessing for a corpus")
    p_half.add_argument("manifest")
    p_half.add_argument("--out-dir", required=True)
    p_half.add_argument("--train-mode", required=True, choices=HALFRES_MODES)
    p_half.add_argument("--val-mode", required=True, choices=HALFRES_MODES)
    p_half.add_argument("--seed", type=int, default=None)
    p_half.set_defaults(func=cmd_halfres)

    p_stats = subs.add_parser("stats", help="simulate mixing geometry, no pixels")
    p_stats.add_argument("--n", type=int, required=True)
    p_stats.add_argument("--dims", required=True, help="frame size as WIDTHxHEIGHT")
    _add_strategy_flags(p_stats, include_mixup=False)
    p_stats.set_defaults(func=cmd_stats)

    p_grid = subs.add_parser("grid", help="tile batch outputs into a contact sheet")
    p_grid.add_argument("manifest", help="manifest.jsonl produced by batch")
    p_grid.add_argument("--rows", type=int, required=True)
    p_grid.add_argument("--cols", type=int, required=True)
    p_grid.add_argument("-o", "--out", required=True, help="output PNG path")
    p_grid.set_defaults(func=cmd_grid)

    return parser


def _load_heatmap_arg(path: str | None, flag: str, w: int, h: int, upscale: bool):
    if path is None:
        return None
    hm = imgcore.load_heatmap(path)
    if upscale and hm.shape != (h, w):
        hm = imgcore.resize_heatmap_nearest(hm, w, h)
    return hm


def cmd_mix(args) -> int:
    if args.strategy == "mixup" and args.lam is None:
        raise CliError("--strategy mixup requires --lambda")
    if args.strategy != "mixup" and args.lam is not None:
        raise CliError("--lambda applies only to --strategy mixup")
    cfg = None
    if args.strategy != "mixup":
        cfg = _config_from_args(args)
        if cfg.needs_source_heatmap() and args.src_heatmap is None:
            raise ValueError(f"obtain mode {cfg.obtain!r} requires --src-heatmap")
        if cfg.needs_target_heatmap() and args.tgt_heatmap is None:
            raise ValueError(f"paste mode {cfg.paste_to!r} requires --tgt-heatmap")
    seed = _resolve_seed(args.seed)

    src = imgcore.load_image(args.source)
    tgt = imgcore.load_image(args.target)
    w, h = src.shape[1], src.shape[0]
    src_hm = _load_heatmap_arg(args.src_heatmap, "--src-heatmap", w, h, args.upscale_heatmaps)
    tgt_hm = _load_heatmap_arg(args.tgt_heatmap, "--tgt-heatmap", w, h, args.upscale_heatmaps)

    if args.strategy == "mixup":
        result = mixup(src, tgt, args.src_class, args.tgt_class, args.lam)
    else:
        rng = pipeline.mix_stream(seed)
        if args.strategy == "resizemix":
            result = resizemix(
                src, tgt, args.src_class, args.tgt_class, args.alpha, args.beta, rng=rng
            )
        elif args.strategy == "cutmix":
            result = cutmix(src, tgt, args.src_class, args.tgt_class, rng)
        else:
            result = mix_matrix(
                src, tgt, args.src_class, args.tgt_class, cfg, src_hm, tgt_hm, rng=rng
            )

    imgcore.save_image(result.image, args.out)
    record = pipeline.MixRecord(
        output_path=args.out,
        source_path=args.source,
        target_path=args.target,
        strategy=cfg.summary() if cfg is not None else {"obtain": "mixup", "paste_to": "full"},
        tau=result.tau,
        lam=result.lam,
        source_region=result.source_region,
        paste_region=result.paste_region,
        label=result.label,
        pair_seed=seed,
    )
    print(json.dumps(record.to_json_obj()))
    return EXIT_OK


def cmd_batch(args) -> int:
    cfg = _config_from_args(args)
    if args.n < 0:
        raise CliError(f"--n must be non-negative, got {args.n}")
    if args.workers < 1:
        raise CliError(f"--workers must be at least 1, got {args.workers}")
    seed = _resolve_seed(args.seed)
    index = pipeline.load_index(args.manifest)
    records = pipeline.run_batch(index, cfg, args.n, seed, args.out_dir, workers=args.workers)
    print(
        json.dumps(
            {
                "outputs": len(records),
                "out_dir": args.out_dir,
                "manifest": str(Path(args.out_dir) / "manifest.jsonl"),
                "seed": seed,
            }
        )
    )
    return EXIT_OK


def cmd_halfres(args) -> int:
    seed = _resolve_seed(args.seed)
    index = pipeline.load_index(args.manifest)
    records = pipeline.run_halfres(index, args.train_mode, args.val_mode, seed, args.out_dir)
    print(
        json.dumps(
            {
                "items": len(records),
                "out_dir": args.out_dir,
                "manifest": str(Path(args.out_dir) / "manifest.jsonl"),
                "seed": seed,
            }
        )
    )
    return EXIT_OK


def cmd_stats(args) -> int:
    cfg = _config_from_args(args)
    if args.n < 1:
        raise CliError(f"--n must be positive, got {args.n}")
    dims = _parse_dims(args.dims)
    seed = _resolve_seed(args.seed)
    report = pipeline.stats_report(cfg, args.n, dims, seed)
    print(json.dumps(report))
    return EXIT_OK


def cmd_grid(args) -> int:
    if args.rows < 1 or args.cols < 1:
        raise CliError("--rows and --cols must be at least 1")
    manifest = Path(args.manifest)
    try:
        lines = [ln for ln in manifest.read_text(encoding="utf-8").splitlines() if ln.strip()]
    except OSError as exc:
        raise imgcore.DecodeError(f"{manifest}: {exc}") from exc
    needed = args.rows * args.cols
    if len(lines) < needed:
        raise ValueError(
            f"grid needs {needed} manifest entries, found only {len(lines)}"
        )
    images = []
    for ln in lines[:needed]:
        try:
            rec = json.loads(ln)
            rel = rec["output_path"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"{manifest}: malformed manifest line: {exc}") from exc
        images.append(imgcore.load_image(manifest.parent / rel))
    first = images[0].shape
    for img, ln in zip(images, lines):
        if img.shape != first:
            raise ValueError(
                f"grid tiles must share one resolution, found {img.shape} and {first}"
            )
    sep = 2
    h, w, c = first
    sheet = np.zeros(
        (args.rows * h + (args.rows - 1) * sep, args.cols * w + (args.cols - 1) * sep, c),
        dtype=np.uint8,
    )
    for i, img in enumerate(images):
        r, col = divmod(i, args.cols)
        y0 = r * (h + sep)
        x0 = col * (w + sep)
        sheet[y0 : y0 + h, x0 : x0 + w] = img
    imgcore.save_image(sheet, args.out)
    print(
        json.dumps(
            {
                "out": args.out,
                "rows": args.rows,
                "cols": args.cols,
                "tile_width": w,
                "tile_height": h,
                "sheet_width": int(sheet.shape[1]),
                "sheet_height": int(sheet.shape[0]),
            }
        )
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (imgcore.DecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
