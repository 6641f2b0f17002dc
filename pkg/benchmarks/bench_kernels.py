"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run:  python benchmarks/bench_kernels.py
The numba path is timed after a warm-up call so compilation is excluded.
"""

import time

import numpy as np

from mcfli import _kernels


def timeit(fn, *args, repeat=20):
    fn(*args)  # warm-up (JIT compile / cache load)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def main():
    rng = np.random.default_rng(0)
    m, q, n = 2000, 64, 65536
    alphas = np.exp(1j * rng.uniform(0, 2 * np.pi, (m, q)))
    h = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    h = 0.5 * (h + h.conj().T)
    weights = rng.standard_normal(m)
    values = (rng.standard_normal(q * q) + 1j * rng.standard_normal(q * q))
    bins = rng.integers(0, n, q * q)
    freqs = rng.uniform(-30, 30, (q, 2))
    points = rng.uniform(-0.5, 0.5, (4096, 2))
    alpha = alphas[0]

    cases = [
        ("srop_quadratic (m=2000, q=64)",
         _kernels.srop_quadratic_numpy, _kernels.srop_quadratic_numba,
         (alphas, h)),
        ("srop_accumulate (m=2000, q=64)",
         _kernels.srop_accumulate_numpy, _kernels.srop_accumulate_numba,
         (alphas, weights)),
        ("scatter_bins (4096 entries)",
         _kernels.scatter_bins_numpy, _kernels.scatter_bins_numba,
         (values, bins, n)),
        ("field_direct (q=64, 4096 px)",
         _kernels.field_direct_numpy, _kernels.field_direct_numba,
         (freqs, alpha, points)),
    ]

    print(f"numba dispatch active: {_kernels.using_numba()}")
    print(f"{'kernel':38s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}")
    for name, f_np, f_nb, args in cases:
        t_np = timeit(f_np, *args)
        t_nb = timeit(f_nb, *args)
        print(f"{name:38s} {t_np*1e3:9.3f}ms {t_nb*1e3:9.3f}ms {t_np/t_nb:7.2f}x")


if __name__ == "__main__":
    main()
