"""Small tabular POMDP with exact (enumerated) belief quantities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import PomdpModel, RewardSpec

ROW_ATOL = 1e-12


def _check_stochastic(name, table, axis=-1):
    if np.any(table < 0) or not np.allclose(table.sum(axis=axis), 1.0, atol=ROW_ATOL, rtol=0):
        raise ValueError(f"{name} rows must be probability vectors")


@dataclass(eq=False)
class DiscreteGridPomdp(PomdpModel):
    """Tables ``T[a, s, s']``, ``Z[s, o]``, ``r[s, a]`` and prior ``b0``.

    As a :class:`PomdpModel`, states and observations are indices stored in
    single-column float arrays and densities are probability masses.
    """

    T: np.ndarray
    Z: np.ndarray
    r: np.ndarray
    b0: np.ndarray
    reward: RewardSpec = RewardSpec(1.0, -1.0)
    gamma: float = 1.0

    def __post_init__(self):
        self.T = np.asarray(self.T, dtype=float)
        self.Z = np.asarray(self.Z, dtype=float)
        self.r = np.asarray(self.r, dtype=float)
        self.b0 = np.asarray(self.b0, dtype=float)
        self.n_actions, self.n_states, _ = self.T.shape
        self.n_obs = self.Z.shape[1]
        _check_stochastic("T", self.T)
        _check_stochastic("Z", self.Z)
        _check_stochastic("b0", self.b0)

    @classmethod
    def random(cls, rng: np.random.Generator, n_states=5, n_obs=6, n_actions=2,
               concentration=1.0, reward: RewardSpec = RewardSpec(1.0, -1.0)) -> "DiscreteGridPomdp":
        T = rng.dirichlet(np.full(n_states, concentration), size=(n_actions, n_states))
        Z = rng.dirichlet(np.full(n_obs, concentration), size=n_states)
        r = rng.normal(size=(n_states, n_actions))
        b0 = rng.dirichlet(np.ones(n_states))
        return cls(T, Z, r, b0, reward=reward)

    # generative interface over index particles ---------------------------

    def sample_transition(self, states, action, rng):
        idx = np.asarray(states, dtype=int).ravel()
        cdf = np.cumsum(self.T[action, idx], axis=1)
        nxt = (rng.random((len(idx), 1)) > cdf).sum(axis=1)
        return np.minimum(nxt, self.n_states - 1).astype(float)[:, None]

    def transition_density(self, next_states, prev_states, action):
        nxt = np.asarray(next_states, dtype=int).ravel()
        prev = np.asarray(prev_states, dtype=int).ravel()
        return self.T[action][prev[None, :], nxt[:, None]]

    def sample_observation(self, states, rng):
        idx = np.asarray(states, dtype=int).ravel()
        cdf = np.cumsum(self.Z[idx], axis=1)
        obs = (rng.random((len(idx), 1)) > cdf).sum(axis=1)
        return np.minimum(obs, self.n_obs - 1).astype(float)[:, None]

    def observation_density(self, observations, states):
        obs = np.asarray(observations, dtype=int).ravel()
        idx = np.asarray(states, dtype=int).ravel()
        return self.Z[idx[None, :], obs[:, None]]

    def state_reward(self, states, action):
        return self.r[np.asarray(states, dtype=int).ravel(), action]


def abstract_observation_table(Z: np.ndarray, k: int) -> np.ndarray:
    """Replace each consecutive block of ``k`` observation columns by its mean."""
    n_states, n_obs = Z.shape
    if n_obs % k:
        raise ValueError(f"{n_obs} observations do not split into clusters of {k}")
    means = Z.reshape(n_states, n_obs // k, k).mean(axis=2)
    return np.repeat(means, k, axis=1)


def shannon_entropy(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def discrete_exact_predict(model: DiscreteGridPomdp, b: np.ndarray, action: int) -> np.ndarray:
    return b @ model.T[action]


def discrete_exact_posterior(model: DiscreteGridPomdp, b_pred: np.ndarray, obs: int,
                             Z: np.ndarray | None = None) -> np.ndarray:
    Z = model.Z if Z is None else Z
    unnorm = Z[:, obs] * b_pred
    total = unnorm.sum()
    if total <= 0:
        raise ZeroDivisionError("observation has zero probability")
    return unnorm / total


def discrete_exact_expected_entropy(model: DiscreteGridPomdp, b: np.ndarray, action: int,
                                    Z: np.ndarray | None = None) -> float:
    """``sum_o P(o | H-) H(b_o)`` by enumeration; zero-probability branches skipped."""
    Z = model.Z if Z is None else Z
    b_pred = discrete_exact_predict(model, b, action)
    p_obs = b_pred @ Z
    total = 0.0
    for o in np.flatnonzero(p_obs > 0):
        total += p_obs[o] * shannon_entropy(discrete_exact_posterior(model, b_pred, o, Z))
    return total


def discrete_exact_state_reward(model: DiscreteGridPomdp, b: np.ndarray, action: int,
                                Z: np.ndarray | None = None) -> float:
    """``E_o[E_{s ~ b_o}[r(s, a)]]`` by enumeration."""
    Z = model.Z if Z is None else Z
    b_pred = discrete_exact_predict(model, b, action)
    p_obs = b_pred @ Z
    total = 0.0
    for o in np.flatnonzero(p_obs > 0):
        total += p_obs[o] * float(discrete_exact_posterior(model, b_pred, o, Z) @ model.r[:, action])
    return total
