"""Compiled simulation kernels.

The reinforced uniform-history pick is the throughput bottleneck, so the
step loops are numba-jitted and release the GIL (trajectories parallelize
across threads).  The SplitMix64 stream here is bit-identical to
`rng.RandomStream`; the pure-Python engine path is the reference the
kernels are tested against.

Decision stream per step (fixed order, replayable):
  u < p*alpha           -> copy a uniformly chosen past step
  p*alpha <= u < alpha  -> copy with flipped sign
  otherwise             -> fresh innovation (drawn lazily, only here)

Discrete laws use a count table over the negation-closed support (flipped
copies can leave the declared atom set), which makes the uniform pick over
the whole history an O(#atoms) categorical pick by counts.
"""

from __future__ import annotations

import numba as nb
import numpy as np

U64 = np.uint64

_GOLDEN = U64(0x9E3779B97F4A7C15)
_STREAM_INIT = U64(0x6A09E667F3BCC909)
_INV_2_53 = 1.1102230246251565e-16  # 2**-53

DIST_UNIFORM = 0
DIST_GAUSSIAN = 1


@nb.njit(nb.uint64(nb.uint64), cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@nb.njit(nb.uint64(nb.uint64), cache=True, inline="always")
def stream_init(seed):
    return _mix(seed ^ _STREAM_INIT)


@nb.njit(cache=True, inline="always")
def _uniform(state):
    state = state + _GOLDEN
    return state, float(_mix(state) >> U64(11)) * _INV_2_53


@nb.njit(cache=True, inline="always")
def _innovate_discrete(state, wcum, inn_atoms):
    state, u = _uniform(state)
    for t in range(len(wcum)):
        if u < wcum[t]:
            return state, inn_atoms[t]
    return state, inn_atoms[len(inn_atoms) - 1]


@nb.njit(cache=True, inline="always")
def _innovate_flat(state, kind, par0, par1):
    if kind == DIST_UNIFORM:
        state, u = _uniform(state)
        return state, par0 + (par1 - par0) * u
    state, u1 = _uniform(state)
    state, u2 = _uniform(state)
    z = np.sqrt(-2.0 * np.log(1.0 - u1)) * np.cos(2.0 * np.pi * u2)
    return state, par0 + par1 * z


@nb.njit(cache=True, inline="always")
def _pick_counts(state, counts, sup_atoms, n):
    # canonical uniform-history pick: inverse CDF over support counts
    # in the fixed support order
    state, u = _uniform(state)
    j = int(u * n)
    if j >= n:
        j = n - 1
    acc = 0
    t = 0
    for t in range(len(counts)):
        acc += counts[t]
        if j < acc:
            break
    return state, sup_atoms[t]


@nb.njit(cache=True, inline="always")
def _record(counts, sup_atoms, x):
    for t in range(len(sup_atoms)):
        if sup_atoms[t] == x:
            counts[t] += 1
            return


@nb.njit(cache=True, inline="always")
def _step_discrete(state, counts, sup_atoms, wcum, inn_atoms, p_alpha, alpha, n):
    state, u = _uniform(state)
    if u < alpha:
        state, x = _pick_counts(state, counts, sup_atoms, n)
        if u >= p_alpha:
            x = -x
    else:
        state, x = _innovate_discrete(state, wcum, inn_atoms)
    return state, x


@nb.njit(cache=True, nogil=True)
def walk_discrete(seed, horizon, cps, p_alpha, alpha, inn_atoms, wcum, sup_atoms):
    """Count-table backend: O(#atoms) memory, exact running sums.

    Returns (T, sum_sq) evaluated at the strictly increasing checkpoints.
    """
    state = stream_init(seed)
    counts = np.zeros(len(sup_atoms), dtype=np.int64)

    state, x = _innovate_discrete(state, wcum, inn_atoms)
    _record(counts, sup_atoms, x)
    T = x
    S = x * x

    out_T = np.empty(len(cps), dtype=np.float64)
    out_S = np.empty(len(cps), dtype=np.float64)
    ci = 0
    if ci < len(cps) and cps[ci] == 1:
        out_T[ci] = T
        out_S[ci] = S
        ci += 1

    n = 1
    while n < horizon:
        state, x = _step_discrete(state, counts, sup_atoms, wcum, inn_atoms, p_alpha, alpha, n)
        _record(counts, sup_atoms, x)
        T += x
        S += x * x
        n += 1
        if ci < len(cps) and cps[ci] == n:
            out_T[ci] = T
            out_S[ci] = S
            ci += 1
    return out_T, out_S


@nb.njit(cache=True, inline="always")
def _step_flat(state, hist, p_alpha, alpha, kind, par0, par1, n):
    state, u = _uniform(state)
    if u < alpha:
        state, v = _uniform(state)
        j = int(v * n)
        if j >= n:
            j = n - 1
        x = hist[j] if u < p_alpha else -hist[j]
    else:
        state, x = _innovate_flat(state, kind, par0, par1)
    return state, x


@nb.njit(cache=True, nogil=True)
def walk_flat(seed, horizon, cps, p_alpha, alpha, kind, par0, par1):
    """Flat-history backend for continuous innovation laws (8 bytes/step)."""
    state = stream_init(seed)
    hist = np.empty(horizon, dtype=np.float64)

    state, x = _innovate_flat(state, kind, par0, par1)
    hist[0] = x
    T = x
    S = x * x

    out_T = np.empty(len(cps), dtype=np.float64)
    out_S = np.empty(len(cps), dtype=np.float64)
    ci = 0
    if ci < len(cps) and cps[ci] == 1:
        out_T[ci] = T
        out_S[ci] = S
        ci += 1

    n = 1
    while n < horizon:
        state, x = _step_flat(state, hist, p_alpha, alpha, kind, par0, par1, n)
        hist[n] = x
        T += x
        S += x * x
        n += 1
        if ci < len(cps) and cps[ci] == n:
            out_T[ci] = T
            out_S[ci] = S
            ci += 1
    return out_T, out_S


@nb.njit(cache=True, nogil=True)
def gradual_discrete(seed, n, m, extend, p_alpha, alpha, inn_atoms, wcum, sup_atoms):
    """Gradually-increasing-memory walk, count-table backend.

    Phase 1 runs the standard recursion to m.  The base walk is then
    optionally extended to `extend` >= m (consumed from the stream before
    the tail so both results are deterministic), and finally the tail
    steps j in (m, n] each pick uniformly from the first m steps only.

    Returns (S_n, T_m, T_extend); T_extend = T_m when extend == m.
    """
    state = stream_init(seed)
    counts = np.zeros(len(sup_atoms), dtype=np.int64)

    state, x = _innovate_discrete(state, wcum, inn_atoms)
    _record(counts, sup_atoms, x)
    T = x

    k = 1
    while k < m:
        state, x = _step_discrete(state, counts, sup_atoms, wcum, inn_atoms, p_alpha, alpha, k)
        _record(counts, sup_atoms, x)
        T += x
        k += 1
    T_m = T

    counts_m = counts.copy()
    while k < extend:
        state, x = _step_discrete(state, counts, sup_atoms, wcum, inn_atoms, p_alpha, alpha, k)
        _record(counts, sup_atoms, x)
        T += x
        k += 1
    T_ext = T

    S = T_m
    for _ in range(n - m):
        state, x = _step_discrete(state, counts_m, sup_atoms, wcum, inn_atoms, p_alpha, alpha, m)
        S += x
    return S, T_m, T_ext


@nb.njit(cache=True, nogil=True)
def gradual_flat(seed, n, m, extend, p_alpha, alpha, kind, par0, par1):
    """Gradual walk, flat-history backend.  See `gradual_discrete`."""
    state = stream_init(seed)
    hist = np.empty(extend, dtype=np.float64)

    state, x = _innovate_flat(state, kind, par0, par1)
    hist[0] = x
    T = x

    k = 1
    while k < m:
        state, x = _step_flat(state, hist, p_alpha, alpha, kind, par0, par1, k)
        hist[k] = x
        T += x
        k += 1
    T_m = T

    while k < extend:
        state, x = _step_flat(state, hist, p_alpha, alpha, kind, par0, par1, k)
        hist[k] = x
        T += x
        k += 1
    T_ext = T

    S = T_m
    for _ in range(n - m):
        state, x = _step_flat(state, hist, p_alpha, alpha, kind, par0, par1, m)
        S += x
    return S, T_m, T_ext
