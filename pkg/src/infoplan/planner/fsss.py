"""Forward-search sparse sampling over beliefs, with abstract rewards (AI-FSSS).

With ``cluster_size == 1`` the engine is plain FSSS with information
rewards.  With ``cluster_size = K > 1`` every action node's reward is first
evaluated with the cluster-uniform observation model, stored as a bracket
``[lb, ub]`` of width ``|omega2| log K``, and only made exact by
:meth:`ForwardSearch.refine` when the root decision needs it.

Node values are ``reward bound + gamma * mean(child bound)``, recomputed
from the children on every backup, so a child refined late feeds its new
bracket straight into its ancestors.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass

import numpy as np

from ..abstraction import (
    ClusterPartition,
    abstract_expected_entropy,
    abstract_expected_state_reward,
    abstract_from_likelihood,
    reward_bounds,
)
from ..core import DegenerateBelief, PomdpModel, compose_reward
from ..filtering import (
    ParticleBelief,
    PredictedBelief,
    expected_entropy_estimate,
    expected_state_reward,
    posterior_from_likelihood,
    predict,
    sample_observation_set,
)
from .config import PlannerConfig


class BeliefNode:
    __slots__ = ("belief", "depth", "visits", "lower", "upper", "children")

    def __init__(self, belief: ParticleBelief, depth: int):
        self.belief = belief
        self.depth = depth
        self.visits = 0
        self.lower = 0.0
        self.upper = 0.0
        self.children: dict[int, ActionNode] = {}

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def __repr__(self):
        return f"BeliefNode(depth={self.depth}, N={self.visits}, [{self.lower:.4g}, {self.upper:.4g}])"


class ActionNode:
    __slots__ = (
        "action", "predicted", "observations", "likelihood", "pending", "children",
        "visits", "lower", "upper", "lb", "ub", "reward", "state_term", "entropy",
        "is_abstract", "amodel", "rollout_value",
    )

    def __init__(self, action: int, predicted: PredictedBelief, observations: np.ndarray,
                 likelihood: np.ndarray):
        self.action = action
        self.predicted = predicted
        self.observations = observations
        self.likelihood = likelihood
        self.pending = deque(range(len(observations)))
        self.children: list[BeliefNode] = []
        self.visits = 0
        self.lower = self.upper = 0.0
        self.lb = self.ub = self.reward = 0.0
        self.state_term = self.entropy = 0.0
        self.is_abstract = False
        self.amodel = None
        self.rollout_value: float | None = None

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    def __repr__(self):
        tag = "abstract" if self.is_abstract else "exact"
        return f"ActionNode(a={self.action}, N={self.visits}, [{self.lower:.4g}, {self.upper:.4g}], {tag})"


@dataclass
class SearchStats:
    iterations: int = 0
    expansions: int = 0
    reward_evaluations: int = 0
    refinements: int = 0
    refine_calls: int = 0
    rollouts: int = 0


def _first_argmax(items, key):
    best, best_val = None, -math.inf
    for item in items:
        v = key(item)
        if v > best_val:
            best, best_val = item, v
    return best


def _first_argmin(items, key):
    best, best_val = None, math.inf
    for item in items:
        v = key(item)
        if v < best_val:
            best, best_val = item, v
    return best


class ForwardSearch:
    """FSSS (``cluster_size == 1``) and AI-FSSS (``cluster_size > 1``)."""

    def __init__(self, model: PomdpModel, config: PlannerConfig):
        self.model = model
        self.cfg = config
        self.partition = ClusterPartition(config.clusters, config.cluster_size)
        self.root: BeliefNode | None = None
        self.stats = SearchStats()

    @property
    def abstract(self) -> bool:
        return self.cfg.cluster_size > 1 and self.cfg.reward.omega2 != 0.0

    # expansion ------------------------------------------------------------

    def _observations(self, bp: PredictedBelief, m: int, rng: np.random.Generator):
        """``m`` observation samples, each with positive mass under ``bp``.

        A sample whose likelihood vanishes on every particle is redrawn up
        to ``max_obs_retries`` times.
        """
        obs = sample_observation_set(bp, m, rng, self.model)
        lik = self.model.observation_density(obs, bp.states)
        if np.all(lik @ bp.weights > 0.0):
            return obs, lik
        for k in range(m):
            tries = 0
            while not float(lik[k] @ bp.weights) > 0.0:
                if tries >= self.cfg.max_obs_retries:
                    raise DegenerateBelief("could not sample a compatible observation")
                obs[k] = sample_observation_set(bp, 1, rng, self.model)[0]
                lik[k] = self.model.observation_density(obs[k:k + 1], bp.states)[0]
                tries += 1
        return obs, lik

    def gen(self, node: BeliefNode, rng: np.random.Generator):
        """Next untried action, its predicted belief and ``C * K`` observations."""
        action = len(node.children)
        assert action < self.model.n_actions, "gen called on a fully expanded node"
        bp = predict(node.belief, action, self.model, rng)
        obs, lik = self._observations(bp, self.cfg.n_observations, rng)
        return action, bp, obs, lik

    def _exact_reward(self, bp: PredictedBelief, lik: np.ndarray, action: int):
        spec = self.cfg.reward
        state = expected_state_reward(bp, None, action, self.model, likelihood=lik) if spec.omega1 else 0.0
        entropy = expected_entropy_estimate(bp, None, self.model, likelihood=lik) if spec.omega2 else 0.0
        self.stats.reward_evaluations += lik.shape[0]
        return compose_reward(state, entropy, spec), state, entropy

    def expand(self, node: BeliefNode, rng: np.random.Generator) -> ActionNode:
        action, bp, obs, lik = self.gen(node, rng)
        anode = ActionNode(action, bp, obs, lik)
        spec = self.cfg.reward
        if self.abstract:
            amodel = abstract_from_likelihood(lik, self.partition)
            state = abstract_expected_state_reward(bp, amodel, action, self.model) if spec.omega1 else 0.0
            entropy = abstract_expected_entropy(bp, amodel, self.model)
            self.stats.reward_evaluations += self.partition.clusters
            reward = compose_reward(state, entropy, spec)
            anode.amodel = amodel
            anode.is_abstract = True
        else:
            reward, state, entropy = self._exact_reward(bp, lik, action)
        bounds = reward_bounds(reward, self.cfg.cluster_size if self.abstract else 1, spec)
        anode.reward, anode.state_term, anode.entropy = reward, state, entropy
        anode.lb, anode.ub = bounds.lb, bounds.ub
        node.children[action] = anode
        self.stats.expansions += 1
        return anode

    # traversal ------------------------------------------------------------

    def select_action(self, node: BeliefNode) -> ActionNode:
        children = node.children.values()
        if self.cfg.selection == "upper":
            return _first_argmax(children, lambda c: c.upper)
        return _first_argmin(children, lambda c: c.visits)

    def simulate(self, node: BeliefNode, d: int, rng: np.random.Generator) -> tuple[float, float]:
        if d == 0:
            return 0.0, 0.0
        if len(node.children) < self.model.n_actions:
            anode = self.expand(node, rng)
        else:
            anode = self.select_action(node)

        if anode.pending and (anode.visits > 0 or not self.cfg.rollouts):
            k = anode.pending.popleft()
            child = BeliefNode(posterior_from_likelihood(anode.predicted, anode.likelihood[k]), d - 1)
            anode.children.append(child)
            self.simulate(child, d - 1, rng)
        elif anode.children:
            self.simulate(_first_argmin(anode.children, lambda c: c.visits), d - 1, rng)
        else:
            anode.rollout_value = self.rollout(anode, d - 1, rng)[0]

        anode.visits += 1
        node.visits += 1
        self._backup_action(anode)
        self._backup_belief(node)
        return node.lower, node.upper

    def _backup_action(self, anode: ActionNode) -> None:
        gamma = self.cfg.gamma
        if anode.children:
            n = len(anode.children)
            lo = sum(c.lower for c in anode.children) / n
            hi = sum(c.upper for c in anode.children) / n
        elif anode.rollout_value is not None:
            lo = hi = anode.rollout_value
        else:
            lo = hi = 0.0
        anode.lower = anode.lb + gamma * lo
        anode.upper = anode.ub + gamma * hi

    @staticmethod
    def _backup_belief(node: BeliefNode) -> None:
        if node.children:
            node.lower = max(c.lower for c in node.children.values())
            node.upper = max(c.upper for c in node.children.values())

    # rollouts ---------------------------------------------------------------

    def rollout(self, anode: ActionNode, d: int, rng: np.random.Generator) -> tuple[float, float]:
        """Uniform-random policy from a sampled child of ``anode``; exact rewards, one observation per step."""
        if d <= 0:
            return 0.0, 0.0
        self.stats.rollouts += 1
        k = int(rng.integers(len(anode.observations)))
        belief = posterior_from_likelihood(anode.predicted, anode.likelihood[k])
        value = _rollout_from(belief, d, self.model, self.cfg, rng, self._observations, self._exact_reward)
        return value, value

    # refinement -------------------------------------------------------------

    def _refine_reward(self, anode: ActionNode) -> None:
        reward, state, entropy = self._exact_reward(anode.predicted, anode.likelihood, anode.action)
        anode.reward, anode.state_term, anode.entropy = reward, state, entropy
        anode.lb = anode.ub = reward
        anode.is_abstract = False
        self.stats.refinements += 1

    def refine(self, node: BeliefNode, anode: ActionNode, d: int) -> tuple[float, float]:
        """Make ``anode`` exact, then descend along the widest brackets."""
        if d == 0:
            return 0.0, 0.0
        self.stats.refine_calls += 1
        if anode.is_abstract:
            self._refine_reward(anode)
        if anode.children:
            child = _first_argmax(anode.children, lambda c: c.gap)
            if child.children:
                nxt = _first_argmax(child.children.values(), lambda c: c.gap)
                self.refine(child, nxt, d - 1)
        self._backup_action(anode)
        self._backup_belief(node)
        return node.lower, node.upper

    def adapt_bounds(self, root: BeliefNode) -> int:
        """Refine until the best lower bound dominates every other upper bound.

        The action with the highest lower bound is refined while it still
        has slack; once it is exact, the competitor with the highest upper
        bound is refined instead.
        """
        actions = list(root.children.values())
        if not actions:
            raise RuntimeError("root has no expanded actions")
        while True:
            best = _first_argmax(actions, lambda c: c.lower)
            rival_ub = max((c.upper for c in actions if c is not best), default=-math.inf)
            if not best.lower < rival_ub:
                return best.action
            if best.gap > 0.0:
                target = best
            else:
                open_rivals = [c for c in actions if c is not best and c.gap > 0.0]
                if not open_rivals:
                    raise RuntimeError("bounds overlap but every root action is exact")
                target = _first_argmax(open_rivals, lambda c: c.upper)
            self.refine(root, target, root.depth)

    def refine_everything(self, root: BeliefNode | None = None) -> None:
        """Exact rewards at every action node, bounds recomputed bottom-up."""
        root = self.root if root is None else root

        def sweep(node: BeliefNode):
            for anode in node.children.values():
                for child in anode.children:
                    sweep(child)
                if anode.is_abstract:
                    self._refine_reward(anode)
                self._backup_action(anode)
            self._backup_belief(node)

        sweep(root)

    # entry point -------------------------------------------------------------

    def build(self, belief: ParticleBelief, rng: np.random.Generator) -> BeliefNode:
        """Run the Simulate loop (iterations, optionally cut by the wall-clock budget)."""
        self.root = BeliefNode(belief, self.cfg.depth)
        self.stats = SearchStats()
        budget = self.cfg.budget
        start = time.perf_counter()
        for i in range(self.cfg.iterations):
            if i > 0 and budget is not None and time.perf_counter() - start >= budget:
                break
            self.simulate(self.root, self.cfg.depth, rng)
            self.stats.iterations += 1
        return self.root

    def solve(self, belief: ParticleBelief, rng: np.random.Generator) -> int:
        self.build(belief, rng)
        return self.adapt_bounds(self.root)


def _rollout_from(belief: ParticleBelief, d: int, model: PomdpModel, cfg: PlannerConfig,
                  rng: np.random.Generator, observe, reward_fn) -> float:
    value, discount = 0.0, 1.0
    for _ in range(d):
        action = int(rng.integers(model.n_actions))
        bp = predict(belief, action, model, rng)
        obs, lik = observe(bp, 1, rng)
        value += discount * reward_fn(bp, lik, action)[0]
        discount *= cfg.gamma
        belief = posterior_from_likelihood(bp, lik[0])
    return value


def solve(b_init: ParticleBelief, cfg: PlannerConfig, model: PomdpModel, rng: np.random.Generator) -> int:
    return ForwardSearch(model, cfg).solve(b_init, rng)


def count_nodes(root: BeliefNode) -> tuple[int, int]:
    """``(belief nodes, action nodes)`` in the subtree."""
    beliefs, actions = 1, 0
    for anode in root.children.values():
        actions += 1
        for child in anode.children:
            b, a = count_nodes(child)
            beliefs += b
            actions += a
    return beliefs, actions


def iter_action_nodes(root: BeliefNode):
    stack = [root]
    while stack:
        node = stack.pop()
        for anode in node.children.values():
            yield node, anode
            stack.extend(anode.children)
