"""Online belief-space planning with information-theoretic rewards.

Forward-search sparse sampling over particle beliefs, with an abstract
observation model that clusters sampled observations to cut the cost of
expected-entropy rewards while keeping the chosen action unchanged.
"""

from .abstraction import (
    AbstractObsModel,
    ClusterPartition,
    RewardBounds,
    abstract_expected_entropy,
    abstract_expected_state_reward,
    build_abstract_model,
    refine_reward,
    reward_bounds,
)
from .core import DegenerateBelief, DomainError, History, PomdpModel, RewardSpec, compose_reward
from .filtering import (
    ParticleBelief,
    PredictedBelief,
    expected_entropy_estimate,
    expected_state_reward,
    maybe_resample,
    posterior,
    predict,
    sample_observation_set,
)
from .planner import ForwardSearch, PftDpw, PlannerConfig, pft_dpw_plan, solve

__version__ = "0.1.0"

__all__ = [
    "AbstractObsModel",
    "ClusterPartition",
    "DegenerateBelief",
    "DomainError",
    "ForwardSearch",
    "History",
    "ParticleBelief",
    "PftDpw",
    "PlannerConfig",
    "PomdpModel",
    "PredictedBelief",
    "RewardBounds",
    "RewardSpec",
    "abstract_expected_entropy",
    "abstract_expected_state_reward",
    "build_abstract_model",
    "compose_reward",
    "expected_entropy_estimate",
    "expected_state_reward",
    "maybe_resample",
    "pft_dpw_plan",
    "posterior",
    "predict",
    "refine_reward",
    "reward_bounds",
    "sample_observation_set",
    "solve",
]
