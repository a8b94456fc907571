"""Martingale weights, regime scalings, and the associated diagnostics.

The centered walk T~_n = T_n - n*drift becomes a martingale M_n = a_n*T~_n
under the Gamma-ratio weights a_n; v_n = sum(a_k^2) is its variance scale.
Everything here is pure and shareable read-only across threads.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateMemory, DomainError, WrongRegime
from .model import DerivedConstants, Regime


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0, relative error below 1e-13."""
    if not x > 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def _check_memory_index(a: float) -> None:
    if not -1.0 <= a < 1.0:
        raise DomainError(f"memory index must lie in [-1, 1), got {a}")
    if a == -1.0:
        # The product factor (1 + a/1) vanishes and the Gamma form hits the
        # Gamma(0) pole: the weights diverge at a = -1 and are excluded from
        # diagnostics.  Use a near-boundary value such as -0.99 instead.
        raise DomainError("martingale weights are degenerate at a = -1 exactly")


@dataclass(frozen=True)
class MartingaleWeights:
    """Weights a_n with prefix sums A_n and v_n = sum of a_k^2."""

    a: float
    upto: int
    a_n: np.ndarray = field(repr=False)
    A_n: np.ndarray = field(repr=False)
    v_n: np.ndarray = field(repr=False)


def weight_sequence(a: float, upto: int) -> np.ndarray:
    """a_k = Gamma(k)Gamma(a+1)/Gamma(k+a), k = 1..upto, evaluated in
    log space to avoid overflow/underflow at large k."""
    _check_memory_index(a)
    if upto < 1:
        raise DomainError(f"upto must be >= 1, got {upto}")
    k = np.arange(1, upto + 1, dtype=np.float64)
    return np.exp(gammaln(k) + gammaln(a + 1.0) - gammaln(k + a))


def weight_sequence_product(a: float, upto: int) -> np.ndarray:
    """Product form a_n = prod_{k<n} (1 + a/k)^{-1}; cross-check for the
    Gamma form (use at moderate n only, the rounding error accumulates)."""
    _check_memory_index(a)
    if upto < 1:
        raise DomainError(f"upto must be >= 1, got {upto}")
    k = np.arange(1, upto, dtype=np.float64)
    out = np.empty(upto, dtype=np.float64)
    out[0] = 1.0
    if upto > 1:
        out[1:] = np.cumprod(1.0 / (1.0 + a / k))
    return out


def weights(a: float, upto: int) -> MartingaleWeights:
    """Weights plus exact prefix sums A_n and v_n."""
    a_n = weight_sequence(a, upto)
    return MartingaleWeights(a=a, upto=upto, a_n=a_n,
                             A_n=np.cumsum(a_n), v_n=np.cumsum(a_n**2))


#: Truncation horizon for the convergent series sum(a_k^2), a > 1/2.  The
#: remainder past this point is added analytically (Euler-Maclaurin), so the
#: truncation error is far below the series tail itself.
_SERIES_CUTOFF = 10**7


@lru_cache(maxsize=32)
def _v_infinity(a: float) -> float:
    g2 = math.exp(2.0 * math.lgamma(a + 1.0))
    head = 0.0
    chunk = 10**6
    for start in range(1, _SERIES_CUTOFF + 1, chunk):
        k = np.arange(start, min(start + chunk, _SERIES_CUTOFF + 1), dtype=np.float64)
        head += float(np.sum(np.exp(2.0 * (gammaln(k) + math.lgamma(a + 1.0) - gammaln(k + a)))))
    K = float(_SERIES_CUTOFF)
    tail = g2 * (K ** (1.0 - 2.0 * a) / (2.0 * a - 1.0) - K ** (-2.0 * a) / 2.0)
    return head + tail


def r_n(a: float, n: int) -> float:
    """Regime-appropriate asymptotic scale of v_n:

    n^{1-2a} Gamma(a+1)^2 / (1-2a)   for a < 1/2,
    (pi/4) log n                     at a = 1/2,
    sum_{k>=1} a_k^2 (convergent)    for a > 1/2.
    """
    _check_memory_index(a)
    if n < 2:
        raise DomainError(f"r_n requires n >= 2, got {n}")
    if a < 0.5:
        return n ** (1.0 - 2.0 * a) * math.exp(2.0 * math.lgamma(a + 1.0)) / (1.0 - 2.0 * a)
    if a == 0.5:
        return math.pi / 4.0 * math.log(n)
    return _v_infinity(a)


@dataclass(frozen=True)
class MartingalePath:
    """M_n = a_n * (T_n - n*drift) along a trajectory's checkpoints."""

    constants: DerivedConstants
    steps: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)
    centered: np.ndarray = field(repr=False)  # T~_n = T_n - n*drift
    values: np.ndarray = field(repr=False)  # M_n


def martingale_path(traj, constants: DerivedConstants) -> MartingalePath:
    """Martingale values at each checkpoint of a trajectory."""
    if constants.regime is Regime.DEGENERATE:
        raise DegenerateMemory("martingale diagnostics are undefined at a = 1")
    steps = np.asarray(traj.checkpoints, dtype=np.float64)
    a_cp = np.exp(gammaln(steps) + math.lgamma(constants.a + 1.0) - gammaln(steps + constants.a))
    centered = traj.positions - steps * constants.drift
    return MartingalePath(constants=constants, steps=traj.checkpoints,
                          positions=traj.positions, centered=centered,
                          values=a_cp * centered)


def limit_statistic(n, T_n, constants: DerivedConstants):
    """Lambda(n) = n^{1-a} (T_n/n - drift), the superdiffusive limit statistic."""
    n = np.asarray(n, dtype=np.float64)
    return n ** (1.0 - constants.a) * (np.asarray(T_n) / n - constants.drift)


def estimate_L(traj, constants: DerivedConstants) -> float:
    """Realization of the a.s. limit L, estimated as Lambda at the final
    checkpoint (no tail averaging: it would bias the fluctuation tests)."""
    if constants.regime is not Regime.SUPERDIFFUSIVE:
        raise WrongRegime(f"L exists only in the superdiffusive regime, got {constants.regime}")
    if traj.horizon < 1000:
        raise DomainError(f"horizon must be >= 1000 for a stable estimate, got {traj.horizon}")
    return float(limit_statistic(traj.horizon, traj.positions[-1], constants))


def recursion_limit(x1: float, t: float, s_seq, steps: int) -> float:
    """Iterate x_{k+1} = s_k + (t/k) * sum_{j<=k} x_j exactly and return
    x_steps.  For convergent s_k -> s the limit is s/(1-t).

    s_seq may be a scalar, a sequence indexed from k=1, or a callable k -> s_k.
    """
    if not -1.0 <= t < 1.0:
        raise DomainError(f"t must lie in [-1, 1), got {t}")
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")
    if callable(s_seq):
        s_at = s_seq
    elif isinstance(s_seq, (int, float)):
        s_at = lambda k: s_seq
    else:
        s_at = lambda k, _seq=list(s_seq): _seq[k - 1]
    x = float(x1)
    total = x
    for k in range(1, steps):
        x = float(s_at(k)) + t * total / k
        total += x
    return x


def write_weights_csv(w: MartingaleWeights, path) -> None:
    """Diagnostic dump: n, a_n, A_n, v_n."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "a_n", "A_n", "v_n"])
        for i in range(w.upto):
            writer.writerow([i + 1, f"{w.a_n[i]:.17g}", f"{w.A_n[i]:.17g}", f"{w.v_n[i]:.17g}"])
