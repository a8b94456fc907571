"""stepwalk: simulation and statistical verification of step-reinforced
random walks with sign-unbalanced reinforcement.

The walk starts at X_1 = xi_1 and at each later step copies a uniformly
chosen past step with probability p*alpha, copies it with flipped sign with
probability (1-p)*alpha, and otherwise draws a fresh innovation.  The
memory index a = (2p-1)*alpha splits the long-run behavior into diffusive
(a < 1/2), critical (a = 1/2), and superdiffusive (1/2 < a < 1) regimes;
this package simulates the walk at scale and checks the corresponding
limit theorems by Monte Carlo.
"""

from .distributions import (
    DiscreteFinite,
    Gaussian,
    Rademacher,
    StepDistribution,
    UniformInterval,
    abs_moment,
    format_distribution,
    moments,
    parse_distribution,
)
from .engine import (
    GradualMemorySpec,
    Trajectory,
    WalkState,
    advance,
    conditional_mean,
    decade_checkpoints,
    geometric_checkpoints,
    simulate_gradual,
    simulate_gradual_coupled,
    simulate_trajectory,
    write_trajectory_csv,
)
from .errors import (
    CheckpointOutOfRange,
    ConfigError,
    DegenerateMemory,
    DomainError,
    EmptySample,
    InsufficientEnsemble,
    InvalidMemoryCutoff,
    NonpositiveScale,
    StepwalkError,
    WrongRegime,
)
from .harness import (
    Check,
    EnsembleResult,
    ExperimentConfig,
    ExperimentKind,
    Tolerances,
    VerificationReport,
    run_ensemble,
    verify,
    verify_clt,
    verify_gradual_clt,
    verify_l2_lln,
    verify_lemma_even,
    verify_mz_rate,
    verify_slln,
    verify_weights,
    worker_count,
    write_ensemble_csv,
)
from .martingale import (
    MartingalePath,
    MartingaleWeights,
    estimate_L,
    limit_statistic,
    log_gamma,
    martingale_path,
    r_n,
    recursion_limit,
    weight_sequence,
    weight_sequence_product,
    weights,
    write_weights_csv,
)
from .model import (
    EPS_REGIME,
    DerivedConstants,
    Regime,
    WalkParams,
    classify_regime,
    derive_constants,
    memory_index,
)
from .rng import RandomStream, derive_seed
from .stats import (
    KsResult,
    MomentAccumulator,
    MomentCheck,
    even_moment_check,
    kolmogorov_critical,
    ks_statistic,
    ks_test,
    normal_cdf,
    standardize,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
