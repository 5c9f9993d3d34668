"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run:  python benchmarks/bench_kernels.py
The active path inside the package is chosen by BGKLAB_NUMBA at import
time; this script imports both implementations directly, checks they agree,
and times them on representative workloads.
"""

import time

import numpy as np

from bgklab import accel, kernels


def timeit(fn, *args, repeat=5, warmup=1):
    for _ in range(warmup):
        fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def row(name, t_numpy, t_numba):
    speedup = t_numpy / t_numba if t_numba > 0 else float("inf")
    print(f"{name:<34} {t_numpy * 1e3:>10.3f} {t_numba * 1e3:>10.3f} {speedup:>8.1f}x")


def main():
    if not accel.NUMBA_ENABLED:
        print("numba path unavailable (BGKLAB_NUMBA=0 or import failure); "
              "nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'kernel':<34} {'numpy ms':>10} {'numba ms':>10} {'speedup':>9}")

    # per-jump empirical fields, the dominant cost of the particle runs
    n = 100_000
    pos = rng.uniform(-0.5, 0.5, (n, 1))
    vel = rng.standard_normal((n, 1))
    x = np.array([0.12])
    args = (pos, vel, x, kernels.KIND_BUMP, 0.2, 4.5)
    a = kernels._point_fields_numba(*args)
    b = kernels._point_fields_numpy(*args)
    assert abs(a[0] - b[0]) < 1e-9 * abs(b[0])
    row("point_fields (N=1e5, bump)",
        timeit(kernels._point_fields_numpy, *args),
        timeit(kernels._point_fields_numba, *args))

    # batched fields over a spatial grid
    n = 2048
    pos = rng.uniform(-0.5, 0.5, (n, 1))
    vel = rng.standard_normal((n, 1))
    nodes = np.ascontiguousarray(np.linspace(-0.5, 0.5, 129)[:-1][:, None])
    args = (pos, vel, nodes, kernels.KIND_BUMP, 0.2, 4.5)
    row("grid_fields (N=2048, 128 nodes)",
        timeit(kernels._grid_fields_numpy, *args),
        timeit(kernels._grid_fields_numba, *args))

    # one solver transport sweep
    vals = rng.random((256, 128))
    k = rng.integers(-40, 40, 128)
    fr = rng.random(128)
    assert np.array_equal(kernels._transport_1d_numba(vals, k, fr),
                          kernels._transport_1d_numpy(vals, k, fr))
    row("transport_1d (256 x 128)",
        timeit(kernels._transport_1d_numpy, vals, k, fr),
        timeit(kernels._transport_1d_numba, vals, k, fr))

    # one relaxation sweep
    ftr = rng.random((256, 128))
    rho = rng.random(256) + 0.5
    u = 0.3 * rng.standard_normal(256)
    temp = rng.random(256) + 0.4
    vg = np.linspace(-6.5, 6.5, 128)
    row("relax_1d (256 x 128)",
        timeit(kernels._relax_1d_numpy, ftr, rho, u, temp, vg, 0.99, 0.01),
        timeit(kernels._relax_1d_numba, ftr, rho, u, temp, vg, 0.99, 0.01))


if __name__ == "__main__":
    main()
