"""Innovation (step) distributions with closed-form first and second moments.

Every supported law has finite second moment by construction; moments are
exact, never estimated, because all verification tolerances depend on them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import DomainError
from .rng import RandomStream

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Rademacher:
    """+1 with probability s, -1 with probability 1 - s."""

    s: float

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise DomainError(f"Rademacher probability must be in [0, 1], got {self.s}")


@dataclass(frozen=True)
class DiscreteFinite:
    """Finite atom law; weights must sum to 1."""

    values: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.values) == 0 or len(self.values) != len(self.weights):
            raise DomainError("values and weights must be nonempty and equal-length")
        if any(not 0.0 <= w <= 1.0 for w in self.weights):
            raise DomainError("weights must lie in [0, 1]")
        if abs(math.fsum(self.weights) - 1.0) > _WEIGHT_TOL:
            raise DomainError(f"weights must sum to 1 within {_WEIGHT_TOL}")
        if any(not math.isfinite(v) for v in self.values):
            raise DomainError("atom values must be finite")


@dataclass(frozen=True)
class UniformInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise DomainError(f"require finite lo < hi, got ({self.lo}, {self.hi})")


@dataclass(frozen=True)
class Gaussian:
    mean: float
    stddev: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.stddev) and self.stddev >= 0.0):
            raise DomainError(f"require finite mean and stddev >= 0, got ({self.mean}, {self.stddev})")


StepDistribution = Union[Rademacher, DiscreteFinite, UniformInterval, Gaussian]


def moments(dist: StepDistribution) -> tuple[float, float]:
    """Exact (E[xi], E[xi^2]) of the innovation law."""
    if isinstance(dist, Rademacher):
        return 2.0 * dist.s - 1.0, 1.0
    if isinstance(dist, DiscreteFinite):
        mu1 = math.fsum(w * v for v, w in zip(dist.values, dist.weights))
        mu2 = math.fsum(w * v * v for v, w in zip(dist.values, dist.weights))
        return mu1, mu2
    if isinstance(dist, UniformInterval):
        lo, hi = dist.lo, dist.hi
        return (lo + hi) / 2.0, (lo * lo + lo * hi + hi * hi) / 3.0
    if isinstance(dist, Gaussian):
        return dist.mean, dist.mean**2 + dist.stddev**2
    raise TypeError(f"unsupported distribution {dist!r}")


def abs_moment(dist: StepDistribution) -> float:
    """Exact E[|xi|], used by the even-functional diagnostics."""
    if isinstance(dist, Rademacher):
        return 1.0
    if isinstance(dist, DiscreteFinite):
        return math.fsum(w * abs(v) for v, w in zip(dist.values, dist.weights))
    if isinstance(dist, UniformInterval):
        lo, hi = dist.lo, dist.hi
        if lo >= 0.0 or hi <= 0.0:
            return abs(lo + hi) / 2.0
        return (lo * lo + hi * hi) / (2.0 * (hi - lo))
    if isinstance(dist, Gaussian):
        m, s = dist.mean, dist.stddev
        if s == 0.0:
            return abs(m)
        # folded-normal mean
        phi = math.exp(-0.5 * (m / s) ** 2) / math.sqrt(2.0 * math.pi)
        return 2.0 * s * phi + m * math.erf(m / (s * math.sqrt(2.0)))
    raise TypeError(f"unsupported distribution {dist!r}")


def is_discrete(dist: StepDistribution) -> bool:
    """True when the law has finitely many atoms (count-table backend applies)."""
    return isinstance(dist, (Rademacher, DiscreteFinite))


def atoms_and_weights(dist: StepDistribution) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Atoms in declared order with their weights, for discrete laws only.

    The declared order is canonical: both the innovation inverse-CDF and
    the history count-table pick walk atoms in this order.
    """
    if isinstance(dist, Rademacher):
        return (1.0, -1.0), (dist.s, 1.0 - dist.s)
    if isinstance(dist, DiscreteFinite):
        return dist.values, dist.weights
    raise TypeError(f"{dist!r} is not a discrete distribution")


def sample_step(dist: StepDistribution, rng: RandomStream) -> float:
    """One innovation draw; inverse-CDF over cumulative weights for atoms."""
    if isinstance(dist, (Rademacher, DiscreteFinite)):
        values, weights = atoms_and_weights(dist)
        u = rng.next_uniform()
        acc = 0.0
        for v, w in zip(values, weights):
            acc += w
            if u < acc:
                return v
        return values[-1]
    if isinstance(dist, UniformInterval):
        return dist.lo + (dist.hi - dist.lo) * rng.next_uniform()
    if isinstance(dist, Gaussian):
        return rng.next_normal(dist.mean, dist.stddev)
    raise TypeError(f"unsupported distribution {dist!r}")


def parse_distribution(text: str) -> StepDistribution:
    """Parse CLI/config syntax:

        rademacher:0.7
        uniform:-1:1
        gaussian:0:1
        discrete:v1,v2,...@w1,w2,...
    """
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    try:
        if name == "rademacher":
            return Rademacher(float(rest))
        if name == "uniform":
            lo, hi = rest.split(":")
            return UniformInterval(float(lo), float(hi))
        if name == "gaussian":
            mean, stddev = rest.split(":")
            return Gaussian(float(mean), float(stddev))
        if name == "discrete":
            vals, _, wts = rest.partition("@")
            values = tuple(float(v) for v in vals.split(","))
            weights = tuple(float(w) for w in wts.split(","))
            return DiscreteFinite(values, weights)
    except DomainError:
        raise
    except ValueError as exc:
        raise DomainError(f"cannot parse distribution {text!r}: {exc}") from exc
    raise DomainError(f"unknown distribution kind {name!r} in {text!r}")


def format_distribution(dist: StepDistribution) -> str:
    """Inverse of `parse_distribution`."""
    if isinstance(dist, Rademacher):
        return f"rademacher:{dist.s!r}"
    if isinstance(dist, UniformInterval):
        return f"uniform:{dist.lo!r}:{dist.hi!r}"
    if isinstance(dist, Gaussian):
        return f"gaussian:{dist.mean!r}:{dist.stddev!r}"
    if isinstance(dist, DiscreteFinite):
        vals = ",".join(repr(v) for v in dist.values)
        wts = ",".join(repr(w) for w in dist.weights)
        return f"discrete:{vals}@{wts}"
    raise TypeError(f"unsupported distribution {dist!r}")
