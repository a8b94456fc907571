"""Walk parameters and the closed-form constants the limit theorems reference."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .distributions import StepDistribution, moments
from .errors import DegenerateMemory, DomainError

#: Half-width of the critical band around a = 1/2.  Parameters are exact
#: rationals in practice, so this only guards float noise in computed inputs.
EPS_REGIME = 1e-12


class Regime(str, Enum):
    DIFFUSIVE = "diffusive"
    CRITICAL = "critical"
    SUPERDIFFUSIVE = "superdiffusive"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class WalkParams:
    """(p, alpha) and the innovation law.

    p is the sign-keep probability of a reinforced step, alpha the
    reinforcement probability.
    """

    p: float
    alpha: float
    dist: StepDistribution

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must be in [0, 1], got {self.p}")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must be in [0, 1], got {self.alpha}")


def memory_index(p: float, alpha: float) -> float:
    """a = (2p - 1) * alpha, the scalar governing drift, scaling and regime."""
    return (2.0 * p - 1.0) * alpha


def classify_regime(a: float) -> Regime:
    if a == 1.0:
        return Regime.DEGENERATE
    if a < 0.5 - EPS_REGIME:
        return Regime.DIFFUSIVE
    if abs(a - 0.5) <= EPS_REGIME:
        return Regime.CRITICAL
    return Regime.SUPERDIFFUSIVE


@dataclass(frozen=True)
class DerivedConstants:
    """Memory index, moments, drift and limit variance for a parameter set.

    drift and sigma2 are undefined in the degenerate regime (a = 1);
    accessing them there raises DegenerateMemory.
    """

    a: float
    mu1: float
    mu2: float
    regime: Regime
    _drift: float | None = field(repr=False, default=None)
    _sigma2: float | None = field(repr=False, default=None)

    @property
    def drift(self) -> float:
        if self._drift is None:
            raise DegenerateMemory("drift is undefined at a = 1")
        return self._drift

    @property
    def sigma2(self) -> float:
        if self._sigma2 is None:
            raise DegenerateMemory("sigma2 is undefined at a = 1")
        return self._sigma2

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def derive_constants(params: WalkParams) -> DerivedConstants:
    """All closed-form constants: a, mu1, mu2, drift = (1-alpha)mu1/(1-a),
    sigma2 = mu2 - (1-alpha)^2 mu1^2 / (1-a)^2, and the regime tag.

    Pure function: identical inputs yield bit-identical outputs.
    """
    mu1, mu2 = moments(params.dist)
    a = memory_index(params.p, params.alpha)
    regime = classify_regime(a)
    if regime is Regime.DEGENERATE:
        return DerivedConstants(a=a, mu1=mu1, mu2=mu2, regime=regime)
    drift = (1.0 - params.alpha) * mu1 / (1.0 - a)
    sigma2 = mu2 - (1.0 - params.alpha) ** 2 * mu1**2 / (1.0 - a) ** 2
    return DerivedConstants(a=a, mu1=mu1, mu2=mu2, regime=regime, _drift=drift, _sigma2=sigma2)
