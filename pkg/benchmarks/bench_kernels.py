"""Time the jitted kernels against their pure-numpy twins.

Usage:
    python3 benchmarks/bench_kernels.py [--quick] [--repeat N]

Each kernel runs once for JIT warmup, then ``--repeat`` times per
backend; the table reports the best wall time and the speedup.
"""

import argparse
import time

import numpy as np


def build_cases(quick):
    h, w = (120, 160) if quick else (240, 320)
    frames = 60 if quick else 300
    rng = np.random.default_rng(0)

    frame = rng.uniform(0.1, 1.0, (h, w)).astype(np.float32)
    frame[rng.random((h, w)) < 0.05] = 0.0

    cube_u16 = rng.integers(500, 3000, (30, h, w)).astype(np.uint16)
    cube_u16[rng.random(cube_u16.shape) < 0.05] = 0

    seg = (0.7 + 0.01 * rng.standard_normal((frames, h, w))).astype(np.float32)
    window = np.ones(frames, dtype=np.float64)
    skip = np.zeros((h, w), dtype=bool)
    k_lo, k_hi = max(1, frames // 50), frames // 30

    mask = rng.random((h, w)) < 0.3
    gx = rng.standard_normal((h, w))
    gy = rng.standard_normal((h, w))
    mag = np.hypot(gx, gy)
    weak = mag > 0.8
    strong = mag > 2.0

    roi = np.zeros((h, w), dtype=bool)
    roi[h // 3:2 * h // 3, w // 3:2 * w // 3] = True
    cube_f32 = rng.uniform(0.2, 0.9, (frames, h, w)).astype(np.float32)
    cube_f32[rng.random(cube_f32.shape) < 0.02] = 0.0

    out = np.empty(cube_u16.shape, dtype=np.float32)
    return [
        ("median_inpaint r=10", lambda m: m.median_inpaint(frame, 10)),
        ("preprocess_cube 30f", lambda m: m.preprocess_cube(cube_u16, 3000.0, 10, out)),
        ("binary_dilate r=4", lambda m: m.binary_dilate(mask, 4)),
        ("binary_erode r=4", lambda m: m.binary_erode(mask, 4)),
        ("label_components", lambda m: m.label_components(mask)),
        ("flood_from_border", lambda m: m.flood_from_border(~mask)),
        ("nms_gradient", lambda m: m.nms_gradient(mag, gx, gy)),
        ("hysteresis", lambda m: m.hysteresis(strong, weak)),
        ("band_magnitude_max %df" % frames,
         lambda m: m.band_magnitude_max(seg, k_lo, k_hi, window, skip)),
        ("masked_mean_inpainted %df" % frames,
         lambda m: m.masked_mean_inpainted(cube_f32, roi, 10)),
    ]


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true",
                        help="smaller inputs, fewer repetitions")
    parser.add_argument("--repeat", type=int, default=None,
                        help="timed repetitions per kernel (default 5, quick 2)")
    args = parser.parse_args()
    repeat = args.repeat or (2 if args.quick else 5)

    try:
        from chestseg._kernels import numba_impl
    except ImportError:
        parser.error("numba backend unavailable; nothing to compare")
    from chestseg._kernels import numpy_impl

    cases = build_cases(args.quick)
    print("warming up the jit...")
    for _, call in cases:
        call(numba_impl)

    name_w = max(len(name) for name, _ in cases)
    print("%-*s %12s %12s %9s" % (name_w, "kernel", "numba [ms]",
                                  "numpy [ms]", "speedup"))
    for name, call in cases:
        t_nb = best_time(lambda: call(numba_impl), repeat)
        t_np = best_time(lambda: call(numpy_impl), repeat)
        print("%-*s %12.2f %12.2f %8.1fx"
              % (name_w, name, t_nb * 1e3, t_np * 1e3, t_np / t_nb))


if __name__ == "__main__":
    main()
