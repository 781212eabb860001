"""Cluster-uniform abstract observation model and the reward bounds it induces."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DegenerateBelief, PomdpModel, RewardSpec, compose_reward
from .filtering import PredictedBelief, posterior_entropy_term


@dataclass(frozen=True)
class ClusterPartition:
    """``clusters`` groups of ``size`` consecutive observation samples."""

    clusters: int
    size: int

    def __post_init__(self):
        if self.clusters < 1 or self.size < 1:
            raise ValueError("cluster count and size must be positive")

    @property
    def total(self) -> int:
        return self.clusters * self.size

    def assignment(self) -> np.ndarray:
        """Cluster index of every observation, by sample order."""
        return np.repeat(np.arange(self.clusters), self.size)

    def members(self, c: int) -> range:
        return range(c * self.size, (c + 1) * self.size)


@dataclass(frozen=True, eq=False)
class AbstractObsModel:
    """Cluster-uniform likelihoods: ``means[c, i]`` averages ``Z[m, i]`` over cluster ``c``.

    ``likelihood`` keeps the original ``Z[m, i]`` so refinement needs no
    further observation-model queries.
    """

    means: np.ndarray
    likelihood: np.ndarray
    partition: ClusterPartition

    @property
    def zbar(self) -> np.ndarray:
        """The abstract likelihood expanded to one row per sampled observation."""
        return np.repeat(self.means, self.partition.size, axis=0)

    def cluster_row(self, c: int) -> np.ndarray:
        return self.means[c]


@dataclass(frozen=True)
class RewardBounds:
    lb: float
    ub: float
    k: int

    @property
    def width(self) -> float:
        return self.ub - self.lb


def build_abstract_model(bp: PredictedBelief, observations, partition: ClusterPartition,
                         model: PomdpModel) -> AbstractObsModel:
    obs = np.atleast_2d(np.asarray(observations, dtype=float))
    if obs.shape[0] != partition.total:
        raise ValueError(f"expected {partition.total} observations, got {obs.shape[0]}")
    lik = model.observation_density(obs, bp.states)
    return abstract_from_likelihood(lik, partition)


def abstract_from_likelihood(lik: np.ndarray, partition: ClusterPartition) -> AbstractObsModel:
    if lik.shape[0] != partition.total:
        raise ValueError(f"expected {partition.total} likelihood rows, got {lik.shape[0]}")
    if partition.size == 1:
        means = lik
    else:
        means = lik.reshape(partition.clusters, partition.size, lik.shape[1]).mean(axis=1)
    return AbstractObsModel(means, lik, partition)


def abstract_expected_entropy(bp: PredictedBelief, amodel: AbstractObsModel, model: PomdpModel) -> float:
    """Expected entropy under the abstract model, one evaluation per cluster.

    Members of a cluster share the same likelihood row and therefore the
    same posterior, so each cluster is evaluated once and weighted by K.
    """
    part = amodel.partition
    mass = part.size * float(np.sum(amodel.means @ bp.weights))
    if not mass > 0.0:
        raise DegenerateBelief("abstract observation model has zero mass")
    total = 0.0
    for c in range(part.clusters):
        total += part.size * posterior_entropy_term(amodel.cluster_row(c), bp, model)
    return -total / mass


def abstract_expected_state_reward(bp: PredictedBelief, amodel: AbstractObsModel, action: int,
                                   model: PomdpModel) -> float:
    # the common factor K cancels between numerator and normaliser
    mass_per_particle = amodel.means.sum(axis=0) * bp.weights
    mass = float(mass_per_particle.sum())
    if not mass > 0.0:
        raise DegenerateBelief("abstract observation model has zero mass")
    return float(mass_per_particle @ model.state_reward(bp.states, action)) / mass


def reward_bounds(abstract_reward: float, k: int, spec: RewardSpec) -> RewardBounds:
    """Interval guaranteed to contain the unabstracted expected reward.

    The abstract entropy overestimates the true one by at most ``log K``;
    the sign of ``omega2`` decides which side of the interval moves.
    """
    if k < 1:
        raise ValueError("cluster size must be at least one")
    slack = math.log(k)
    lb = abstract_reward - max(0.0, spec.omega2) * slack
    ub = abstract_reward + max(0.0, -spec.omega2) * slack
    return RewardBounds(lb, ub, k)


def refine_reward(r_old: float, exact_exp_entropy: float, abstract_exp_entropy: float,
                  spec: RewardSpec) -> float:
    """Swap the abstract entropy inside a stored reward for the exact one."""
    return r_old + spec.omega2 * (exact_exp_entropy - abstract_exp_entropy)


def abstract_reward(bp: PredictedBelief, amodel: AbstractObsModel, action: int, model: PomdpModel,
                    spec: RewardSpec) -> tuple[float, float, float]:
    """``(reward, state_term, entropy)`` under the abstract model."""
    state = abstract_expected_state_reward(bp, amodel, action, model) if spec.omega1 else 0.0
    entropy = abstract_expected_entropy(bp, amodel, model) if spec.omega2 else 0.0
    return compose_reward(state, entropy, spec), state, entropy
