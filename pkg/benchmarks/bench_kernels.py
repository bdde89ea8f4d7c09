"""Benchmark the jit-compiled resize/blend kernels against the NumPy fallback.

Run: python benchmarks/bench_kernels.py
"""
from __future__ import annotations

import time

import numpy as np

from mixkit import _kernels


def _time_ms(fn, n_runs):
    times = []
    for _ in range(n_runs):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return np.mean(times) * 1000, np.std(times) * 1000


def bench_resize(in_side=512, out_side=224, channels=3, n_warmup=3, n_runs=20):
    rng = np.random.default_rng(0)
    src = rng.integers(0, 256, size=(in_side, in_side, channels), dtype=np.uint8)

    print(f"resize {in_side}x{in_side}x{channels} -> {out_side}x{out_side}")
    for _ in range(n_warmup):
        _kernels.resize_bilinear_numba(src, out_side, out_side)
        _kernels.resize_bilinear_numpy(src, out_side, out_side)

    jit_mean, jit_std = _time_ms(
        lambda: _kernels.resize_bilinear_numba(src, out_side, out_side), n_runs
    )
    np_mean, np_std = _time_ms(
        lambda: _kernels.resize_bilinear_numpy(src, out_side, out_side), n_runs
    )
    print(f"  numba:  {jit_mean:8.3f} +- {jit_std:.3f} ms")
    print(f"  numpy:  {np_mean:8.3f} +- {np_std:.3f} ms")
    print(f"  speedup: {np_mean / jit_mean:.2f}x")

    same = np.array_equal(
        _kernels.resize_bilinear_numba(src, out_side, out_side),
        _kernels.resize_bilinear_numpy(src, out_side, out_side),
    )
    print(f"  outputs bit-identical: {same}")
    print()


def bench_blend(side=512, channels=3, n_warmup=3, n_runs=20):
    rng = np.random.default_rng(1)
    a = rng.integers(0, 256, size=(side, side, channels), dtype=np.uint8)
    b = rng.integers(0, 256, size=(side, side, channels), dtype=np.uint8)
    lam = 0.37

    print(f"blend {side}x{side}x{channels}, lam={lam}")
    for _ in range(n_warmup):
        _kernels.blend_numba(a, b, lam)
        _kernels.blend_numpy(a, b, lam)

    jit_mean, jit_std = _time_ms(lambda: _kernels.blend_numba(a, b, lam), n_runs)
    np_mean, np_std = _time_ms(lambda: _kernels.blend_numpy(a, b, lam), n_runs)
    print(f"  numba:  {jit_mean:8.3f} +- {jit_std:.3f} ms")
    print(f"  numpy:  {np_mean:8.3f} +- {np_std:.3f} ms")
    print(f"  speedup: {np_mean / jit_mean:.2f}x")

    same = np.array_equal(_kernels.blend_numba(a, b, lam), _kernels.blend_numpy(a, b, lam))
    print(f"  outputs bit-identical: {same}")
    print()


def main():
    if not _kernels.HAS_NUMBA:
        print("numba is not installed; nothing to compare.")
        return
    print(f"active backend: {_kernels.active_backend()}")
    print()
    bench_resize()
    bench_resize(in_side=224, out_side=112)
    bench_blend()
    bench_blend(side=224)


if __name__ == "__main__":
    main()
