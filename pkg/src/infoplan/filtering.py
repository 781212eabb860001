"""Particle beliefs, the bootstrap filter and the expected-entropy estimator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DegenerateBelief, DomainError, PomdpModel

LOG_FLOOR = 1e-300
WEIGHT_ATOL = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ParticleBelief:
    """Weighted particle set ``{(s_i, q_i)}``; ``states`` has shape (N, dim)."""

    states: np.ndarray
    weights: np.ndarray
    generation: int = 0

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        weights = np.array(self.weights, dtype=float).ravel()
        if states.shape[0] == 0:
            raise DomainError("belief needs at least one particle")
        if weights.shape[0] != states.shape[0]:
            raise DomainError("one weight per particle required")
        if not np.all(np.isfinite(states)):
            raise DomainError("particle states must be finite")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_ATOL:
            raise DomainError("weights must be nonnegative and sum to one")
        object.__setattr__(self, "states", _frozen(states))
        object.__setattr__(self, "weights", _frozen(weights))

    @classmethod
    def _trusted(cls, states: np.ndarray, weights: np.ndarray, generation: int) -> "ParticleBelief":
        """Skip validation for arrays produced inside the filter."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "states", states)
        object.__setattr__(obj, "weights", _frozen(weights))
        object.__setattr__(obj, "generation", generation)
        return obj

    @classmethod
    def uniform(cls, states, generation: int = 0) -> "ParticleBelief":
        states = np.asarray(states, dtype=float)
        n = states.shape[0]
        return cls(states, np.full(n, 1.0 / n), generation)

    def __len__(self):
        return self.states.shape[0]

    def mean(self) -> np.ndarray:
        return self.weights @ self.states

    def effective_sample_size(self) -> float:
        return 1.0 / float(np.sum(self.weights**2))


@dataclass(frozen=True, eq=False)
class PredictedBelief:
    """Belief after the transition, before the next observation.

    Propagated states keep the prior (unrenormalised) weights.
    """

    prior: ParticleBelief
    states: np.ndarray
    action: int

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if states.shape[0] != len(self.prior):
            raise DomainError("propagated set must match the prior particle count")
        object.__setattr__(self, "states", _frozen(states))

    @property
    def weights(self) -> np.ndarray:
        return self.prior.weights

    def __len__(self):
        return self.states.shape[0]


def predict(b: ParticleBelief, action: int, model: PomdpModel, rng: np.random.Generator) -> PredictedBelief:
    states = np.asarray(model.sample_transition(b.states, action, rng), dtype=float)
    if states.shape != b.states.shape:
        raise DomainError("transition sampler changed the particle array shape")
    obj = object.__new__(PredictedBelief)
    object.__setattr__(obj, "prior", b)
    object.__setattr__(obj, "states", _frozen(states))
    object.__setattr__(obj, "action", action)
    return obj


def posterior(bp: PredictedBelief, observation, model: PomdpModel) -> ParticleBelief:
    """Bayes reweighting of the propagated particles (no resampling)."""
    obs = np.atleast_2d(np.asarray(observation, dtype=float))
    return posterior_from_likelihood(bp, model.observation_density(obs, bp.states)[0])


def posterior_from_likelihood(bp: PredictedBelief, likelihood: np.ndarray) -> ParticleBelief:
    unnorm = likelihood * bp.weights
    total = unnorm.sum()
    if not total > 0.0:
        raise DegenerateBelief("observation has zero likelihood under every particle")
    return ParticleBelief._trusted(bp.states, unnorm / total, bp.prior.generation + 1)


def systematic_resample(b: ParticleBelief, rng: np.random.Generator) -> ParticleBelief:
    n = len(b)
    positions = (rng.random() + np.arange(n)) / n
    cumulative = np.cumsum(b.weights)
    cumulative[-1] = 1.0
    idx = np.searchsorted(cumulative, positions, side="right")
    return ParticleBelief.uniform(b.states[idx], b.generation)


def maybe_resample(b: ParticleBelief, rng: np.random.Generator, threshold: float = 0.5) -> ParticleBelief:
    """Systematic resampling when the effective sample size drops below ``threshold * N``."""
    if b.effective_sample_size() < threshold * len(b):
        return systematic_resample(b, rng)
    return b


def sample_observation_set(bp: PredictedBelief, m: int, rng: np.random.Generator, model: PomdpModel) -> np.ndarray:
    """Draw ``m`` observations: pick a particle by weight, then sample its sensor."""
    if m < 1:
        raise ValueError("need at least one observation sample")
    cdf = np.cumsum(bp.weights)
    idx = np.minimum(np.searchsorted(cdf, rng.random(m) * cdf[-1], side="right"), len(bp) - 1)
    return model.sample_observation(bp.states[idx], rng)


def predictive_density(bp: PredictedBelief, model: PomdpModel) -> np.ndarray:
    """``sum_j T(s_i | s_prev_j, a) q_j`` for every propagated particle ``i``."""
    dens = model.transition_density(bp.states, bp.prior.states, bp.action)
    return dens @ bp.weights


def posterior_entropy_term(likelihood: np.ndarray, bp: PredictedBelief, model: PomdpModel) -> float:
    """Unnormalised contribution of one observation to the entropy estimate.

    Returns ``sum_i Z_i q_i log(Z_i * sum_j T_ij q_j / sum_i' Z_i' q_i')``.
    This is a full reward evaluation of one posterior: it costs Theta(N^2).
    """
    prior = bp.prior
    q = prior.weights
    norm = float(likelihood @ q)
    if not norm > 0.0:
        return 0.0
    # same as predictive_density, inlined: this is the innermost call of the planner
    pred = model.transition_density(bp.states, prior.states, bp.action) @ q
    # zero-weight terms vanish (0 * log(floor) == 0), so no masking is needed
    pred *= likelihood
    np.maximum(pred, LOG_FLOOR, out=pred)
    np.log(pred, out=pred)
    return float((likelihood * q) @ pred) - norm * math.log(norm)


def expected_entropy_estimate(bp: PredictedBelief, observations, model: PomdpModel,
                              likelihood: np.ndarray | None = None) -> float:
    """Particle estimate of the expected posterior differential entropy.

    Every sampled observation is evaluated separately (observation-major,
    particle-minor accumulation), so the cost is Theta(M * N^2).
    ``likelihood`` may carry a precomputed ``Z[m, i]`` matrix.
    """
    if likelihood is None:
        obs = np.atleast_2d(np.asarray(observations, dtype=float))
        if obs.shape[0] < 1:
            raise ValueError("need at least one observation")
        likelihood = model.observation_density(obs, bp.states)
    lik = likelihood
    mass = float((lik @ bp.weights).sum())
    if not mass > 0.0:
        raise DegenerateBelief("all sampled observations have zero likelihood")
    total = 0.0
    for m in range(lik.shape[0]):
        total += posterior_entropy_term(lik[m], bp, model)
    return -total / mass


def expected_state_reward(bp: PredictedBelief, observations, action: int, model: PomdpModel,
                          likelihood: np.ndarray | None = None) -> float:
    """``eta * sum_m sum_i Z(o_m|s_i) q_i r(s_i, a)`` with the estimator's normaliser."""
    if likelihood is None:
        obs = np.atleast_2d(np.asarray(observations, dtype=float))
        likelihood = model.observation_density(obs, bp.states)
    mass_per_particle = likelihood.sum(axis=0) * bp.weights
    mass = float(mass_per_particle.sum())
    if not mass > 0.0:
        raise DegenerateBelief("all sampled observations have zero likelihood")
    rewards = model.state_reward(bp.states, action)
    return float(mass_per_particle @ rewards) / mass
