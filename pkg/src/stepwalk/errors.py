"""Exception types shared across the package."""


class StepwalkError(Exception):
    """Base class for all stepwalk errors."""


class DomainError(StepwalkError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateMemory(StepwalkError):
    """Raised when a = 1 (p = 1, alpha = 1): drift and the limit variance
    are undefined and every theorem-verification path is barred."""


class CheckpointOutOfRange(StepwalkError, ValueError):
    """A requested checkpoint lies outside [1, horizon]."""


class InvalidMemoryCutoff(StepwalkError, ValueError):
    """Gradual-memory cutoff m_n must satisfy 1 <= m_n < n."""


class WrongRegime(StepwalkError):
    """An operation was invoked outside the regime it is defined for."""


class EmptySample(StepwalkError, ValueError):
    """A statistic was requested on an empty sample."""


class NonpositiveScale(StepwalkError, ValueError):
    """Standardization requires a strictly positive scale."""


class InsufficientEnsemble(StepwalkError, ValueError):
    """Distributional checks need a minimum ensemble size."""


class ConfigError(StepwalkError, ValueError):
    """Invalid experiment configuration or CLI usage."""
