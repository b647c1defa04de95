"""Time the numba and pure-numpy permanent kernels side by side.

    python benchmarks/bench_kernels.py [--sizes 6 8 10 12 14] [--repeat 5]

Also times a full sector transition matrix (4 photons, 8 modes) through
``optics.transition_matrix`` with each backend selected.
"""

import argparse
import time

import numpy as np

from fockbench import _kernels, optics


def best_of(fn, repeat):
    fn()  # warm-up, includes JIT compilation
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def bench_permanent(sizes, repeat, rng):
    print(f"{'n':>3} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8} {'rel.diff':>10}")
    for n in sizes:
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        t_np = best_of(lambda: _kernels.permanent_numpy(a), repeat)
        t_nb = best_of(lambda: _kernels.permanent_numba(a), repeat)
        p_np, p_nb = _kernels.permanent_numpy(a), _kernels.permanent_numba(a)
        diff = abs(p_np - p_nb) / max(abs(p_np), 1e-300)
        print(f"{n:>3} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} {t_np / t_nb:>8.1f} {diff:>10.2e}")


def bench_sector(repeat, rng):
    u = optics.random_unitary(8, rng)
    saved = _kernels.USE_NUMBA
    try:
        results = {}
        for flag in (False, True):
            _kernels.USE_NUMBA = flag
            results[flag] = best_of(lambda: optics.transition_matrix(u, 4), repeat)
    finally:
        _kernels.USE_NUMBA = saved
    print(f"sector 4 photons / 8 modes: numpy {results[False] * 1e3:.1f} ms, "
          f"numba {results[True] * 1e3:.1f} ms, speedup {results[False] / results[True]:.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 6, 8, 10, 12, 14])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if _kernels.permanent_numba is None:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(args.seed)
    bench_permanent(args.sizes, args.repeat, rng)
    bench_sector(args.repeat, rng)


if __name__ == "__main__":
    main()
