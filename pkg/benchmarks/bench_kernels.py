"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run with:

    python benchmarks/bench_kernels.py

Shapes mirror the real extraction workload: a 48x128 image, the 165-patch
grid, 512-bin joint histograms, SILTP codes and the 16-color soft
assignment over one stripe region.
"""

import time

import numpy as np

from reidpipe import kernels
from reidpipe.features.grid import patch_grid

REPEATS = 200


def timeit(fn, *args, repeats=REPEATS):
    fn(*args)  # warm-up (also triggers JIT compilation)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def main():
    if not kernels.USE_NUMBA:
        print("numba path disabled (REIDPIPE_NO_NUMBA set or numba missing);")
        print("only the numpy fallback can be timed.\n")

    rng = np.random.default_rng(0)
    grid = patch_grid()
    rects = grid.rects

    bin_idx = rng.integers(0, 512, size=(128, 48))
    weights = rng.random((128, 48))
    gray = rng.random((128, 48))
    pixels = rng.random((32 * 48, 3))
    palette = rng.random((16, 3))
    pix_weights = rng.random(32 * 48)

    cases = [
        (
            "patch_histograms (165 rects, 512 bins)",
            kernels.patch_histograms,
            kernels.patch_histograms_numpy,
            (bin_idx, weights, rects, 512),
        ),
        (
            "siltp_codes (128x48)",
            kernels.siltp_codes,
            kernels.siltp_codes_numpy,
            (gray, 0.3),
        ),
        (
            "scncd_accumulate (1536 px, 16 names)",
            kernels.scncd_accumulate,
            kernels.scncd_accumulate_numpy,
            (pixels, palette, pix_weights, 0.125, 3),
        ),
    ]

    print(f"{'kernel':<42}{'numpy':>12}{'numba':>12}{'speedup':>10}")
    for name, fast, reference, args in cases:
        t_numpy = timeit(reference, *args)
        if kernels.USE_NUMBA:
            t_fast = timeit(fast, *args)
            np.testing.assert_allclose(fast(*args), reference(*args), atol=1e-9)
            print(
                f"{name:<42}{t_numpy * 1e6:>10.1f}us{t_fast * 1e6:>10.1f}us"
                f"{t_numpy / t_fast:>9.1f}x"
            )
        else:
            print(f"{name:<42}{t_numpy * 1e6:>10.1f}us{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
