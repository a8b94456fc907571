"""Streaming moments and distributional tests for the verification experiments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptySample, NonpositiveScale

_SQRT2 = math.sqrt(2.0)


class MomentAccumulator:
    """Single-pass (Welford) mean/variance accumulator with an explicit
    merge, so per-shard accumulators combine associatively."""

    __slots__ = ("count", "mean", "m2")

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, x: float) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)

    def add_many(self, values) -> None:
        for x in np.asarray(values, dtype=np.float64).ravel():
            self.add(float(x))

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Chan's parallel combination; either side may be empty."""
        if other.count == 0:
            return self
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return self
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.count = total
        return self

    @property
    def variance(self) -> float:
        if self.count < 2:
            return float("nan")
        return self.m2 / (self.count - 1)

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return float("nan")
        return math.sqrt(self.variance / self.count)


def normal_cdf(x: float) -> float:
    """Standard normal CDF, absolute error well below 1e-10."""
    return 0.5 * (1.0 + math.erf(x / _SQRT2))


def normal_cdf_array(x: np.ndarray) -> np.ndarray:
    from scipy.special import erf

    return 0.5 * (1.0 + erf(np.asarray(x, dtype=np.float64) / _SQRT2))


def ks_statistic(sample, cdf=None) -> float:
    """D = sup |F_emp - F| against a fully specified CDF.

    `cdf` defaults to the standard normal; it may be a scalar function or a
    vectorized one.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64).ravel())
    n = len(x)
    if n == 0:
        raise EmptySample("KS statistic needs a nonempty sample")
    if cdf is None:
        F = normal_cdf_array(x)
    else:
        try:
            F = np.asarray(cdf(x), dtype=np.float64)
            if F.shape != x.shape:
                raise TypeError
        except (TypeError, ValueError):  # scalar-only cdf
            F = np.array([cdf(float(v)) for v in x], dtype=np.float64)
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(max(np.max(i / n - F), np.max(F - (i - 1.0) / n)))


def kolmogorov_critical(level: float = 0.01) -> float:
    """c such that the asymptotic Kolmogorov tail K(c) equals `level`;
    the KS acceptance threshold is c/sqrt(n).  level=0.01 gives c ~ 1.628."""
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must be in (0, 1), got {level}")

    def sf(y: float) -> float:
        total = 0.0
        for r in range(1, 101):
            term = (-1.0) ** (r - 1) * math.exp(-2.0 * r * r * y * y)
            total += term
            if abs(term) < 1e-16:
                break
        return 2.0 * total

    lo, hi = 0.3, 4.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sf(mid) > level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class KsResult:
    d_statistic: float
    n: int
    threshold: float

    @property
    def passed(self) -> bool:
        return self.d_statistic <= self.threshold


def ks_test(sample, cdf=None, threshold: float | None = None,
            level: float = 0.01) -> KsResult:
    """KS test against a fully specified CDF at the asymptotic critical
    value `kolmogorov_critical(level)/sqrt(n)` unless `threshold` is given."""
    d = ks_statistic(sample, cdf)
    n = len(np.asarray(sample).ravel())
    if threshold is None:
        threshold = kolmogorov_critical(level) / math.sqrt(n)
    return KsResult(d_statistic=d, n=n, threshold=threshold)


def standardize(values, center: float, scale: float) -> np.ndarray:
    """(v - center) / scale elementwise."""
    if not scale > 0.0:
        raise NonpositiveScale(f"scale must be positive, got {scale}")
    return (np.asarray(values, dtype=np.float64) - center) / scale


@dataclass(frozen=True)
class MomentCheck:
    k: int
    mean: float
    target: float
    stderr: float

    @property
    def passed(self) -> bool:
        return abs(self.mean - self.target) <= 5.0 * self.stderr


def even_moment_check(samples_by_k: dict[int, np.ndarray], mu2: float) -> list[MomentCheck]:
    """Per step index k: is the ensemble mean of X_k^2 within 5 standard
    errors of mu2?  (X_k and the innovation share every even functional.)"""
    out = []
    for k in sorted(samples_by_k):
        sq = np.asarray(samples_by_k[k], dtype=np.float64) ** 2
        if len(sq) < 2:
            raise EmptySample(f"need at least 2 samples at k={k}")
        # stderr can be exactly 0 (Rademacher: X_k^2 = 1); the check then
        # demands an exact match, which is the intended behavior
        stderr = float(sq.std(ddof=1) / math.sqrt(len(sq)))
        out.append(MomentCheck(k=k, mean=float(sq.mean()), target=mu2, stderr=stderr))
    return out
