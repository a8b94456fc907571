"""Trajectory generation for the standard and gradually-increasing-memory walks.

Two history backends implement the same canonical decision stream:

* count-table (discrete innovation laws): O(#atoms) memory, enables
  1e8-step runs; the uniform pick over the whole history is a categorical
  pick by support counts.
* flat array (continuous laws): 8 bytes/step, positional uniform pick.

`WalkState`/`advance` form the pure-Python reference path; the compiled
kernels are tested against it for bit-identical step sequences.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .distributions import (
    Gaussian,
    StepDistribution,
    UniformInterval,
    atoms_and_weights,
    is_discrete,
    sample_step,
)
from .errors import CheckpointOutOfRange, DomainError, InvalidMemoryCutoff
from .model import WalkParams, memory_index
from .rng import MASK64, RandomStream


def support_atoms(dist: StepDistribution) -> tuple[float, ...]:
    """Negation-closed support in canonical order: declared atoms first,
    then missing negations in declared order.  Sign-flipped copies stay
    inside this set, so count tables are exact."""
    values, _ = atoms_and_weights(dist)
    support = list(values)
    seen = set(values)
    for v in values:
        if -v not in seen:
            support.append(-v)
            seen.add(-v)
    return tuple(support)


def _flat_kind_params(dist: StepDistribution) -> tuple[int, float, float]:
    if isinstance(dist, UniformInterval):
        return _kernels.DIST_UNIFORM, dist.lo, dist.hi
    if isinstance(dist, Gaussian):
        return _kernels.DIST_GAUSSIAN, dist.mean, dist.stddev
    raise TypeError(f"no flat kernel for {dist!r}")


def _discrete_arrays(dist: StepDistribution):
    values, weights = atoms_and_weights(dist)
    inn_atoms = np.asarray(values, dtype=np.float64)
    wcum = np.cumsum(np.asarray(weights, dtype=np.float64))
    wcum[-1] = 1.0  # guard accumulated rounding at the top of the CDF
    sup = np.asarray(support_atoms(dist), dtype=np.float64)
    return inn_atoms, wcum, sup


class WalkState:
    """Evolving walk history with running sums.  Single-owner, not shared.

    Reference implementation of one reinforcement step; consumes the
    random stream exactly like the compiled kernels.
    """

    __slots__ = ("params", "n", "history", "counts", "_support", "_support_index",
                 "running_sum", "running_sum_sq", "branch_tally")

    def __init__(self, params: WalkParams, rng: RandomStream):
        self.params = params
        self.history: list[float] = []
        if is_discrete(params.dist):
            self._support = support_atoms(params.dist)
            self._support_index = {v: i for i, v in enumerate(self._support)}
            self.counts = [0] * len(self._support)
        else:
            self._support = None
            self._support_index = None
            self.counts = None
        self.n = 0
        self.running_sum = 0.0
        self.running_sum_sq = 0.0
        self.branch_tally = [0, 0, 0]  # copy, flip-copy, innovate
        x1 = sample_step(params.dist, rng)  # X_1 = xi_1 always
        self._append(x1)

    def _append(self, x: float) -> None:
        self.history.append(x)
        if self.counts is not None:
            self.counts[self._support_index[x]] += 1
        self.n += 1
        self.running_sum += x
        self.running_sum_sq += x * x

    def _pick_uniform(self, rng: RandomStream) -> float:
        u = rng.next_uniform()
        j = min(int(u * self.n), self.n - 1)
        if self.counts is not None:
            acc = 0
            for value, c in zip(self._support, self.counts):
                acc += c
                if j < acc:
                    return value
            return self._support[-1]
        return self.history[j]


def advance(state: WalkState, params: WalkParams, rng: RandomStream) -> float:
    """One reinforcement step: copy w.p. p*alpha, flip-copy w.p. (1-p)*alpha,
    fresh innovation w.p. 1-alpha.  Updates the state and returns X_{n+1}."""
    p_alpha = params.p * params.alpha
    u = rng.next_uniform()
    if u < params.alpha:
        x = state._pick_uniform(rng)
        if u < p_alpha:
            state.branch_tally[0] += 1
        else:
            state.branch_tally[1] += 1
            x = -x
    else:
        state.branch_tally[2] += 1
        x = sample_step(params.dist, rng)
    state._append(x)
    return x


def conditional_mean(state: WalkState, constants) -> float:
    """E[X_{n+1} | F_n] = a * T_n / n + (1 - alpha) * mu1.  Valid for all a."""
    return constants.a * state.running_sum / state.n + (1.0 - state.params.alpha) * constants.mu1


@dataclass(frozen=True)
class Trajectory:
    """Checkpointed record of one trajectory: T_n and sum of X_k^2."""

    params: WalkParams
    seed: int
    checkpoints: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)
    sum_sq: np.ndarray = field(repr=False)

    @property
    def horizon(self) -> int:
        return int(self.checkpoints[-1])

    def position_at(self, n: int) -> float:
        idx = np.searchsorted(self.checkpoints, n)
        if idx >= len(self.checkpoints) or self.checkpoints[idx] != n:
            raise CheckpointOutOfRange(f"{n} is not a recorded checkpoint")
        return float(self.positions[idx])


def geometric_checkpoints(horizon: int, ratio: float = 1.2) -> np.ndarray:
    """Default checkpoint schedule: floor(ratio**k) deduplicated, plus the
    horizon, for log-scale convergence plots."""
    cps = {horizon}
    x = 1.0
    while x < horizon:
        cps.add(int(x))
        x *= ratio
    return np.array(sorted(cps), dtype=np.int64)


def decade_checkpoints(horizon: int) -> np.ndarray:
    """Powers of ten up to the horizon, plus the horizon."""
    cps = {horizon}
    d = 1
    while d <= horizon:
        cps.add(d)
        d *= 10
    return np.array(sorted(cps), dtype=np.int64)


def _validate_checkpoints(checkpoints, horizon: int) -> np.ndarray:
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    if checkpoints is None:
        return geometric_checkpoints(horizon)
    cps = np.unique(np.asarray(list(checkpoints), dtype=np.int64))
    if len(cps) == 0:
        cps = np.array([horizon], dtype=np.int64)
    if cps[0] < 1 or cps[-1] > horizon:
        raise CheckpointOutOfRange(
            f"checkpoints must lie in [1, {horizon}], got range [{cps[0]}, {cps[-1]}]")
    if cps[-1] != horizon:
        cps = np.append(cps, horizon)
    return cps


def simulate_trajectory(params: WalkParams, horizon: int, checkpoints=None,
                        seed: int = 0) -> Trajectory:
    """Deterministic function of (params, horizon, checkpoints, seed)."""
    cps = _validate_checkpoints(checkpoints, horizon)
    seed = int(seed) & MASK64
    if is_discrete(params.dist):
        inn_atoms, wcum, sup = _discrete_arrays(params.dist)
        T, S = _kernels.walk_discrete(
            np.uint64(seed), horizon, cps, params.p * params.alpha, params.alpha,
            inn_atoms, wcum, sup)
    else:
        kind, par0, par1 = _flat_kind_params(params.dist)
        T, S = _kernels.walk_flat(
            np.uint64(seed), horizon, cps, params.p * params.alpha, params.alpha,
            kind, par0, par1)
    return Trajectory(params=params, seed=seed, checkpoints=cps, positions=T, sum_sq=S)


@dataclass(frozen=True)
class GradualMemorySpec:
    """Horizon n, memory cutoff m_n < n, and the target theta = lim m_n/n."""

    n: int
    m_n: int
    theta_hint: float = 0.0

    def __post_init__(self):
        if not 1 <= self.m_n < self.n:
            raise InvalidMemoryCutoff(f"require 1 <= m_n < n, got m_n={self.m_n}, n={self.n}")
        if not 0.0 <= self.theta_hint <= 1.0:
            raise DomainError(f"theta_hint must be in [0, 1], got {self.theta_hint}")


def simulate_gradual_coupled(params: WalkParams, n: int, m: int, extend: int,
                             seed: int = 0) -> tuple[float, float, float]:
    """Gradual walk coupled with an extension of the base walk to `extend`
    steps (used to estimate the base walk's superdiffusive limit).

    Returns (S_n, T_m, T_extend).
    """
    if not 1 <= m < n:
        raise InvalidMemoryCutoff(f"require 1 <= m_n < n, got m_n={m}, n={n}")
    if extend < m:
        raise DomainError(f"extension horizon must be >= m_n, got {extend} < {m}")
    seed = int(seed) & MASK64
    if is_discrete(params.dist):
        inn_atoms, wcum, sup = _discrete_arrays(params.dist)
        return _kernels.gradual_discrete(
            np.uint64(seed), n, m, extend, params.p * params.alpha, params.alpha,
            inn_atoms, wcum, sup)
    kind, par0, par1 = _flat_kind_params(params.dist)
    return _kernels.gradual_flat(
        np.uint64(seed), n, m, extend, params.p * params.alpha, params.alpha,
        kind, par0, par1)


def simulate_gradual(params: WalkParams, spec: GradualMemorySpec,
                     seed: int = 0) -> tuple[float, float]:
    """Gradually-increasing-memory walk: the first m_n steps follow the
    standard recursion, later steps reinforce only from those first m_n.

    Returns (S_n, T_{m_n})."""
    S, T_m, _ = simulate_gradual_coupled(params, spec.n, spec.m_n, spec.m_n, seed)
    return S, T_m


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per checkpoint: n, T_n, sum of squares, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "T_n", "sum_sq"])
        for n, t, s in zip(traj.checkpoints, traj.positions, traj.sum_sq):
            writer.writerow([int(n), f"{t:.17g}", f"{s:.17g}"])
