"""Particle Filter Tree with observation progressive widening (PFT-DPW)."""

from __future__ import annotations

import math
import time

import numpy as np

from ..core import PomdpModel, compose_reward
from ..filtering import (
    ParticleBelief,
    PredictedBelief,
    expected_entropy_estimate,
    expected_state_reward,
    posterior,
    predict,
    sample_observation_set,
)
from .config import PlannerConfig
from .fsss import _rollout_from


class PftBeliefNode:
    __slots__ = ("belief", "visits", "children")

    def __init__(self, belief: ParticleBelief):
        self.belief = belief
        self.visits = 0
        self.children: dict[int, PftActionNode] = {}


class PftActionNode:
    __slots__ = ("action", "predicted", "visits", "value", "children")

    def __init__(self, action: int, predicted: PredictedBelief):
        self.action = action
        self.predicted = predicted
        self.visits = 0
        self.value = 0.0
        self.children: list[tuple[PftBeliefNode, float]] = []


def widening_limit(visits: int, k_o: float, alpha_o: float) -> int:
    """Number of observation children allowed after ``visits`` visits."""
    return math.floor(k_o * visits**alpha_o)


class PftDpw:
    def __init__(self, model: PomdpModel, config: PlannerConfig):
        self.model = model
        self.cfg = config
        self.root: PftBeliefNode | None = None
        self.iterations = 0

    def _reward(self, bp: PredictedBelief, lik: np.ndarray, action: int):
        spec = self.cfg.reward
        state = expected_state_reward(bp, None, action, self.model, likelihood=lik) if spec.omega1 else 0.0
        entropy = expected_entropy_estimate(bp, None, self.model, likelihood=lik) if spec.omega2 else 0.0
        return compose_reward(state, entropy, spec), state, entropy

    def _observe(self, bp: PredictedBelief, m: int, rng):
        for _ in range(self.cfg.max_obs_retries + 1):
            obs = sample_observation_set(bp, m, rng, self.model)
            lik = self.model.observation_density(obs, bp.states)
            if np.all(lik @ bp.weights > 0.0):
                return obs, lik
        raise ArithmeticError("could not sample a compatible observation")

    def _select(self, node: PftBeliefNode) -> int:
        for a in self.model.actions():
            if a not in node.children:
                return a
        log_n = math.log(node.visits)
        best, best_score = None, -math.inf
        for a, child in node.children.items():
            score = child.value + self.cfg.c_ucb * math.sqrt(log_n / child.visits)
            if score > best_score:
                best, best_score = a, score
        return best

    def simulate(self, node: PftBeliefNode, d: int, rng) -> float:
        if d == 0:
            return 0.0
        a = self._select(node)
        anode = node.children.get(a)
        if anode is None:
            anode = node.children[a] = PftActionNode(a, predict(node.belief, a, self.model, rng))
        anode.visits += 1
        if len(anode.children) < widening_limit(anode.visits, self.cfg.k_o, self.cfg.alpha_o):
            obs, lik = self._observe(anode.predicted, 1, rng)
            reward = self._reward(anode.predicted, lik, a)[0]
            child = PftBeliefNode(posterior(anode.predicted, obs[0], self.model))
            anode.children.append((child, reward))
            future = _rollout_from(child.belief, d - 1, self.model, self.cfg, rng, self._observe, self._reward)
            child.visits += 1
        else:
            child, reward = anode.children[int(rng.integers(len(anode.children)))]
            future = self.simulate(child, d - 1, rng)
        ret = reward + self.cfg.gamma * future
        anode.value += (ret - anode.value) / anode.visits
        node.visits += 1
        return ret

    def build(self, belief: ParticleBelief, rng) -> PftBeliefNode:
        self.root = PftBeliefNode(belief)
        self.iterations = 0
        budget = self.cfg.budget
        start = time.perf_counter()
        for i in range(self.cfg.iterations):
            if i > 0 and budget is not None and time.perf_counter() - start >= budget:
                break
            self.simulate(self.root, self.cfg.depth, rng)
            self.iterations += 1
        return self.root

    def solve(self, belief: ParticleBelief, rng) -> int:
        self.build(belief, rng)
        best, best_val = None, -math.inf
        for a, child in sorted(self.root.children.items()):
            if child.value > best_val:
                best, best_val = a, child.value
        return best


def pft_dpw_plan(b_init: ParticleBelief, cfg: PlannerConfig, model: PomdpModel, rng) -> int:
    return PftDpw(model, cfg).solve(b_init, rng)
