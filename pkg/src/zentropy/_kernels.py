"""Hot numeric kernels with numba acceleration and a pure-numpy fallback.

Set ZENTROPY_NUMBA=0 to force the fallback path (useful for debugging and
for the benchmark in benchmarks/bench_kernels.py). Selection happens once
at import time.

Determinism notes:
  - walk_outcomes consumes pre-drawn uniforms and only compares floats, so
    the numba and numpy paths return bit-identical outcome arrays.
  - stream_scores does real arithmetic; the two paths execute the same
    statements in the same order, but libm vs LLVM log2 may differ in the
    last ulp. Within one selected path results are exactly reproducible,
    which is what the online/offline-equivalence contract requires.
"""

from __future__ import annotations

import math
import os

import numpy as np

_flag = os.environ.get("ZENTROPY_NUMBA", "1").strip().lower()
if _flag in ("0", "false", "off", "no"):
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _HAVE_NUMBA = False


def active_backend() -> str:
    return "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# Categorical walk: start draw, optional first-step kernel, k repeats of a
# second kernel. Covers Markov-chain branches (event kernel then base
# dynamics) and grid-world branches (first action then policy mixture).
# ---------------------------------------------------------------------------

def _walk_outcomes_loop(cum_start, cum_first, n_first, cum_rest, n_rest, u, out):
    # cum_* rows are nondecreasing with last entry pinned to 1.0; the sampled
    # index is the count of entries <= u (searchsorted side='right').
    n = u.shape[0]
    size = cum_start.shape[0]
    for i in range(n):
        v = u[i, 0]
        lo = 0
        hi = size
        while lo < hi:
            mid = (lo + hi) // 2
            if cum_start[mid] <= v:
                lo = mid + 1
            else:
                hi = mid
        s = min(lo, size - 1)
        col = 1
        for _ in range(n_first):
            row = cum_first[s]
            v = u[i, col]
            lo = 0
            hi = size
            while lo < hi:
                mid = (lo + hi) // 2
                if row[mid] <= v:
                    lo = mid + 1
                else:
                    hi = mid
            s = min(lo, size - 1)
            col += 1
        for _ in range(n_rest):
            row = cum_rest[s]
            v = u[i, col]
            lo = 0
            hi = size
            while lo < hi:
                mid = (lo + hi) // 2
                if row[mid] <= v:
                    lo = mid + 1
                else:
                    hi = mid
            s = min(lo, size - 1)
            col += 1
        out[i] = s


def _walk_outcomes_np(cum_start, cum_first, n_first, cum_rest, n_rest, u, out):
    # Vectorized per step; chunked so the (chunk, size) gather stays small.
    n = u.shape[0]
    size = cum_start.shape[0]
    chunk = max(1, (1 << 22) // size)
    for a in range(0, n, chunk):
        b = min(n, a + chunk)
        s = np.searchsorted(cum_start, u[a:b, 0], side="right")
        np.minimum(s, size - 1, out=s)
        col = 1
        for _ in range(n_first):
            s = (cum_first[s] <= u[a:b, col, None]).sum(axis=1)
            np.minimum(s, size - 1, out=s)
            col += 1
        for _ in range(n_rest):
            s = (cum_rest[s] <= u[a:b, col, None]).sum(axis=1)
            np.minimum(s, size - 1, out=s)
            col += 1
        out[a:b] = s


if _HAVE_NUMBA:
    _walk_outcomes_jit = njit(cache=True)(_walk_outcomes_loop)


def walk_outcomes(cum_start, cum_first, n_first, cum_rest, n_rest, u) -> np.ndarray:
    """Sample final states of n categorical walks from pre-drawn uniforms.

    cum_start: (S,) cumulative initial distribution.
    cum_first/cum_rest: (S, S) cumulative transition rows, applied n_first
    then n_rest times. u: (n, 1 + n_first + n_rest) uniforms in [0, 1).
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.shape[1] != 1 + n_first + n_rest:
        raise ValueError("uniform array width does not match walk length")
    out = np.empty(u.shape[0], dtype=np.int64)
    if _HAVE_NUMBA:
        _walk_outcomes_jit(cum_start, cum_first, n_first, cum_rest, n_rest, u, out)
    else:
        _walk_outcomes_np(cum_start, cum_first, n_first, cum_rest, n_rest, u, out)
    return out


def cumulative_rows(matrix: np.ndarray) -> np.ndarray:
    """Row-wise cumulative sums with the last column pinned to exactly 1.0."""
    cum = np.cumsum(np.asarray(matrix, dtype=np.float64), axis=1)
    cum[:, -1] = 1.0
    return np.ascontiguousarray(cum)


def cumulative_vector(probs: np.ndarray) -> np.ndarray:
    cum = np.cumsum(np.asarray(probs, dtype=np.float64))
    cum[-1] = 1.0
    return np.ascontiguousarray(cum)


# ---------------------------------------------------------------------------
# Streaming anomaly scoring. One function is both the online single-event
# step and the offline batch replay: state arrays are carried between calls,
# so folding ingest over a stream and replaying it in one call execute the
# exact same statement sequence.
# ---------------------------------------------------------------------------

def _stream_scores_impl(values, lo, width, n_bins, alpha, kappa, warmup,
                        window, counts, z_ring, state,
                        out_bin, out_z, out_mean, out_std, out_flag):
    # state: int64 [win_len, win_pos, z_len, z_pos, n_seen]
    cap = window.shape[0]
    for i in range(values.shape[0]):
        x = values[i]
        b = int(math.floor((x - lo) / width))
        if b < 0:
            b = 0
        if b > n_bins - 1:
            b = n_bins - 1

        win_len = state[0]
        win_pos = state[1]
        denom = win_len + n_bins * alpha
        h_pre = 0.0
        for j in range(n_bins):
            p = (counts[j] + alpha) / denom
            h_pre -= p * math.log2(p)

        # insert the candidate; a full buffer evicts its oldest symbol first
        if win_len == cap:
            counts[window[win_pos]] -= 1
            new_len = win_len
        else:
            new_len = win_len + 1
        counts[b] += 1
        denom = new_len + n_bins * alpha
        h_post = 0.0
        for j in range(n_bins):
            p = (counts[j] + alpha) / denom
            h_post -= p * math.log2(p)
        z = h_post - h_pre

        window[win_pos] = b
        win_pos += 1
        if win_pos == cap:
            win_pos = 0
        state[0] = new_len
        state[1] = win_pos

        # rolling stats over the last <=cap scores, current one included
        z_len = state[2]
        z_pos = state[3]
        z_ring[z_pos] = z
        z_pos += 1
        if z_pos == cap:
            z_pos = 0
        if z_len < cap:
            z_len += 1
        state[2] = z_len
        state[3] = z_pos

        first = z_pos - z_len
        if first < 0:
            first += cap
        total = 0.0
        idx = first
        for _ in range(z_len):
            total += z_ring[idx]
            idx += 1
            if idx == cap:
                idx = 0
        mean = total / z_len
        sq = 0.0
        idx = first
        for _ in range(z_len):
            d = z_ring[idx] - mean
            sq += d * d
            idx += 1
            if idx == cap:
                idx = 0
        std = math.sqrt(sq / z_len)

        n_seen = state[4]
        out_bin[i] = b
        out_z[i] = z
        out_mean[i] = mean
        out_std[i] = std
        out_flag[i] = (n_seen >= warmup) and (z > mean + kappa * std)
        state[4] = n_seen + 1


if _HAVE_NUMBA:
    _stream_scores_jit = njit(cache=True)(_stream_scores_impl)


def stream_scores(values, lo, width, n_bins, alpha, kappa, warmup,
                  window, counts, z_ring, state):
    """Score a batch of sensor values against carried detector state.

    Mutates window/counts/z_ring/state in place and returns per-event
    (bin, z, rolling_mean, rolling_std, flagged) arrays.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    n = values.shape[0]
    out_bin = np.empty(n, dtype=np.int64)
    out_z = np.empty(n, dtype=np.float64)
    out_mean = np.empty(n, dtype=np.float64)
    out_std = np.empty(n, dtype=np.float64)
    out_flag = np.empty(n, dtype=np.bool_)
    fn = _stream_scores_jit if _HAVE_NUMBA else _stream_scores_impl
    fn(values, lo, width, n_bins, alpha, kappa, warmup,
       window, counts, z_ring, state, out_bin, out_z, out_mean, out_std, out_flag)
    return out_bin, out_z, out_mean, out_std, out_flag
