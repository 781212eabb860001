"""POMDP interfaces, histories and reward composition shared by every module."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DomainError(ValueError):
    """Raised for non-finite or otherwise invalid numeric inputs."""


class DegenerateBelief(ArithmeticError):
    """An observation has zero likelihood under every particle of a belief."""


@dataclass(frozen=True)
class RewardSpec:
    """Weights of the state-dependent reward and of the entropy term.

    ``omega2`` is signed: information-gathering tasks that penalise
    uncertainty use a negative value.
    """

    omega1: float = 1.0
    omega2: float = -1.0

    def __post_init__(self):
        if not (math.isfinite(self.omega1) and math.isfinite(self.omega2)):
            raise DomainError("reward weights must be finite")
        if self.omega1 == 0.0 and self.omega2 == 0.0:
            raise DomainError("at least one reward weight must be nonzero")


def compose_reward(exp_state_reward: float, exp_entropy: float, spec: RewardSpec) -> float:
    """Weighted sum ``omega1 * E[r] + omega2 * E[H]``."""
    if not (math.isfinite(exp_state_reward) and math.isfinite(exp_entropy)):
        raise DomainError(f"non-finite reward input ({exp_state_reward}, {exp_entropy})")
    return spec.omega1 * exp_state_reward + spec.omega2 * exp_entropy


@dataclass(frozen=True)
class History:
    """Action/observation sequence ``(a0, o1, ..., a_{t-1}[, o_t])``.

    ``minus`` is true when the last action has no observation yet.
    """

    steps: tuple = ()
    minus: bool = False

    def append_action(self, action: int) -> "History":
        if self.minus:
            raise ValueError("history already ends with an unobserved action")
        return History(self.steps + ((int(action), None),), minus=True)

    def append_observation(self, observation) -> "History":
        if not self.minus:
            raise ValueError("no pending action to attach the observation to")
        action, _ = self.steps[-1]
        obs = tuple(np.asarray(observation, dtype=float).ravel())
        return History(self.steps[:-1] + ((action, obs),), minus=False)

    def strip_observation(self) -> "History":
        """The same history without its last observation."""
        if self.minus or not self.steps:
            raise ValueError("history has no trailing observation")
        action, _ = self.steps[-1]
        return History(self.steps[:-1] + ((action, None),), minus=True)

    def __len__(self):
        return len(self.steps)


class PomdpModel:
    """Generative and density interface of a POMDP.

    States and observations are rows of 2-D float arrays so particle sets
    can be pushed through in one call.  Subclasses implement the
    ``sample_*`` / ``*_density`` / ``state_reward`` hooks.
    """

    n_actions: int = 1
    gamma: float = 1.0
    reward: RewardSpec = RewardSpec()

    def actions(self) -> Sequence[int]:
        return range(self.n_actions)

    def sample_transition(self, states: np.ndarray, action: int, rng: np.random.Generator) -> np.ndarray:
        """Next states, one row per input row."""
        raise NotImplementedError

    def transition_density(self, next_states: np.ndarray, prev_states: np.ndarray, action: int) -> np.ndarray:
        """Matrix ``T[i, j] = T(next_i | prev_j, action)``."""
        raise NotImplementedError

    def sample_observation(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def observation_density(self, observations: np.ndarray, states: np.ndarray) -> np.ndarray:
        """Matrix ``Z[m, i] = Z(o_m | s_i)``."""
        raise NotImplementedError

    def state_reward(self, states: np.ndarray, action: int) -> np.ndarray:
        raise NotImplementedError


def check_finite(name: str, values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite entries")
    return arr
