"""Steepest-entropy-ascent thermodynamics of finite energy spectra."""
from .core import (
    EnergySpectrum,
    ModelConstants,
    StateDistribution,
    StateError,
    Trajectory,
    TrajectoryPoint,
    energy,
    entropy,
    product_distribution,
    pure_state,
    uniform_state,
    validate_state,
    xlogx,
)
from .sea_dynamics import (
    IntegrationError,
    IntegratorConfig,
    Method,
    entropy_production,
    integrate,
    sea_rate,
    sea_rate_oracle,
)
from .equilibrium import (
    EquilibriumSolution,
    PartitionFunction,
    Verdict,
    beta_from_energy,
    canonical_distribution,
    is_equilibrium,
    partition_function,
    temperature_of_stable_state,
)
from .statespace import (
    DiagramCurve,
    FeasibilityVerdict,
    ReservoirSpec,
    adiabatic_availability,
    available_energy,
    concavity_violation,
    demon_check,
    is_feasible_point,
    maximize_entropy,
    min_energy_at_entropy,
    smax_curve,
    state_point,
)
from .criteria import (
    CheckResult,
    CompositeResult,
    CriteriaReport,
    EntropyCandidate,
    builtin_candidates,
    candidate_by_name,
    composite_temperature_check,
    replay_counterexample,
    run_criteria,
)

__version__ = "0.1.0"
