import numpy as np
import pytest

from infoplan.core import PomdpModel, RewardSpec
from infoplan.domains import LightDark2D, LinearGaussianModel
from infoplan.filtering import ParticleBelief


class StaticModel(PomdpModel):
    """States never move; observations reveal the state exactly (unit densities)."""

    def __init__(self, n_actions=1, reward=0.0, spec=RewardSpec(1.0, -1.0)):
        self.n_actions = n_actions
        self._r = reward
        self.reward = spec

    def sample_transition(self, states, action, rng):
        return np.array(states, dtype=float)

    def transition_density(self, next_states, prev_states, action):
        return np.ones((len(next_states), len(prev_states)))

    def sample_observation(self, states, rng):
        return np.array(states, dtype=float)

    def observation_density(self, observations, states):
        return np.ones((len(np.atleast_2d(observations)), len(states)))

    def state_reward(self, states, action):
        return np.full(len(states), float(self._r))


@pytest.fixture
def static_model():
    return StaticModel()


@pytest.fixture
def lightdark():
    return LightDark2D()


@pytest.fixture
def lg_model():
    return LinearGaussianModel([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]], 0.2 * np.eye(2), 0.5 * np.eye(2))


def random_belief(rng, n, dim=2, scale=1.0):
    return ParticleBelief(rng.normal(scale=scale, size=(n, dim)), rng.dirichlet(np.ones(n)))
