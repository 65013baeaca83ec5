"""Benchmark the hot kernels: numba @njit vs the pure-numpy fallback.

The package picks its backend once at import time (ZENTROPY_NUMBA=0 forces
the fallback); this script times both implementations side by side in one
process and checks they agree. Run:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from zentropy import _kernels


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_walk(n_samples=200_000, size=64, k=4):
    rng = np.random.default_rng(0)
    m = rng.random((size, size)) + 1e-3
    m /= m.sum(axis=1, keepdims=True)
    cum = _kernels.cumulative_rows(m)
    cum_start = _kernels.cumulative_vector(np.full(size, 1.0 / size))
    u = rng.random((n_samples, 2 + k))
    out_nb = np.empty(n_samples, dtype=np.int64)
    out_np = np.empty(n_samples, dtype=np.int64)

    _kernels._walk_outcomes_jit(cum_start, cum, 1, cum, k, u, out_nb)  # compile
    t_nb = timeit(_kernels._walk_outcomes_jit, cum_start, cum, 1, cum, k, u, out_nb)
    t_np = timeit(_kernels._walk_outcomes_np, cum_start, cum, 1, cum, k, u, out_np)
    assert np.array_equal(out_nb, out_np), "walk kernels disagree"
    return f"categorical walk ({n_samples} x {k + 1} steps, {size} states)", t_nb, t_np


def bench_stream(n_events=200_000, window=64, bins=4):
    rng = np.random.default_rng(1)
    values = rng.random(n_events) * 4.0

    def run(fn):
        win = np.zeros(window, dtype=np.int64)
        counts = np.zeros(bins, dtype=np.int64)
        zring = np.zeros(window, dtype=np.float64)
        state = np.zeros(5, dtype=np.int64)
        outs = (np.empty(n_events, dtype=np.int64), np.empty(n_events),
                np.empty(n_events), np.empty(n_events),
                np.empty(n_events, dtype=np.bool_))
        fn(values, 0.0, 1.0, bins, 1.0, 3.0, window, win, counts, zring,
           state, *outs)
        return outs[1]

    run(_kernels._stream_scores_jit)  # compile
    t0 = time.perf_counter()
    z_nb = run(_kernels._stream_scores_jit)
    t_nb = time.perf_counter() - t0
    t0 = time.perf_counter()
    z_py = run(_kernels._stream_scores_impl)
    t_py = time.perf_counter() - t0
    assert np.max(np.abs(z_nb - z_py)) <= 1e-12, "stream kernels disagree"
    return f"stream scoring ({n_events} events, W={window}, B={bins})", t_nb, t_py


def main():
    if not _kernels._HAVE_NUMBA:
        raise SystemExit("numba backend unavailable (ZENTROPY_NUMBA=0?); "
                         "nothing to compare")
    print(f"{'kernel':<55} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for bench in (bench_walk, bench_stream):
        name, t_nb, t_np = bench()
        print(f"{name:<55} {t_nb * 1e3:>8.1f}ms {t_np * 1e3:>8.1f}ms "
              f"{t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
