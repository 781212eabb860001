"""Linear-Gaussian POMDP with a closed-form (Kalman) expected posterior entropy."""

from __future__ import annotations

import math

import numpy as np

from ..core import PomdpModel, RewardSpec


class LinearGaussianModel(PomdpModel):
    """``x' = x + u_a + w``, ``o = x + v`` with ``w ~ N(0, Q)``, ``v ~ N(0, R)``.

    Used as a small verification domain: it is cheap, any dimension works,
    and every density is Gaussian.
    """

    def __init__(self, displacements, transition_cov, observation_cov, goal=None,
                 reward: RewardSpec = RewardSpec(1.0, -1.0), gamma: float = 1.0):
        self.displacements = np.atleast_2d(np.asarray(displacements, dtype=float))
        self.dim = self.displacements.shape[1]
        self.n_actions = self.displacements.shape[0]
        self.transition_cov = np.atleast_2d(np.asarray(transition_cov, dtype=float))
        self.observation_cov = np.atleast_2d(np.asarray(observation_cov, dtype=float))
        self.goal = np.zeros(self.dim) if goal is None else np.asarray(goal, dtype=float)
        self.reward = reward
        self.gamma = gamma
        self._t = _Gaussian(self.transition_cov)
        self._z = _Gaussian(self.observation_cov)

    def sample_transition(self, states, action, rng):
        states = np.atleast_2d(states)
        return states + self.displacements[action] + self._t.sample(len(states), rng)

    def transition_density(self, next_states, prev_states, action):
        mean = np.atleast_2d(prev_states) + self.displacements[action]
        return self._t.density(np.atleast_2d(next_states)[:, None, :] - mean[None, :, :])

    def sample_observation(self, states, rng):
        states = np.atleast_2d(states)
        return states + self._z.sample(len(states), rng)

    def observation_density(self, observations, states):
        diff = np.atleast_2d(observations)[:, None, :] - np.atleast_2d(states)[None, :, :]
        return self._z.density(diff)

    def state_reward(self, states, action):
        return -np.linalg.norm(np.atleast_2d(states) - self.goal, axis=1)

    def expected_posterior_entropy(self, prior_cov) -> float:
        """Kalman closed form; independent of the observation value."""
        predicted = np.atleast_2d(prior_cov) + self.transition_cov
        post = np.linalg.inv(np.linalg.inv(predicted) + np.linalg.inv(self.observation_cov))
        _, logdet = np.linalg.slogdet(2 * math.pi * math.e * post)
        return 0.5 * logdet


class _Gaussian:
    def __init__(self, cov):
        self.cov = cov
        self.chol = np.linalg.cholesky(cov)
        self.prec = np.linalg.inv(cov)
        d = cov.shape[0]
        self.log_norm = -0.5 * (d * math.log(2 * math.pi) + np.linalg.slogdet(cov)[1])

    def sample(self, n, rng):
        return rng.standard_normal((n, self.cov.shape[0])) @ self.chol.T

    def density(self, diff):
        quad = np.einsum("...i,ij,...j->...", diff, self.prec, diff)
        return np.exp(self.log_norm - 0.5 * quad)
