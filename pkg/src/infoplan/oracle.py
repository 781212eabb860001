"""Brute-force reference computations for tests and acceptance checks.

Nothing here shares code with the estimator or the planner's backups:
rewards are recomputed from the particles and observations stored in a
tree with scalar loops, and discrete quantities are enumerated state by
state.  Only the model's density functions (the "physics") are reused.
Slow on purpose; keep instances small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import PomdpModel, RewardSpec

FLOOR = 1e-300


# particle estimator, transcribed literally ------------------------------------


def naive_expected_entropy(prior_states, prior_weights, states, observations, action, model: PomdpModel,
                           likelihood=None) -> float:
    """Triple loop over observations, particles and prior particles.

    ``likelihood[m][i]`` overrides ``Z(o_m | s_i)`` (used for abstract models).
    """
    n = len(states)
    if likelihood is None:
        likelihood = model.observation_density(np.atleast_2d(observations), states)
    T = model.transition_density(states, prior_states, action)
    q = [float(x) for x in prior_weights]
    mass = 0.0
    for row in likelihood:
        for i in range(n):
            mass += float(row[i]) * q[i]
    total = 0.0
    for row in likelihood:
        norm = 0.0
        for i in range(n):
            norm += float(row[i]) * q[i]
        if norm == 0.0:
            continue
        for i in range(n):
            z = float(row[i])
            if z * q[i] == 0.0:
                continue
            pred = 0.0
            for j in range(n):
                pred += float(T[i][j]) * q[j]
            total += z * q[i] * math.log(max(z * pred, FLOOR) / norm)
    return -total / mass


def naive_expected_state_reward(prior_weights, states, action, model: PomdpModel, likelihood) -> float:
    r = model.state_reward(states, action)
    num = den = 0.0
    for row in likelihood:
        for i in range(len(states)):
            w = float(row[i]) * float(prior_weights[i])
            num += w * float(r[i])
            den += w
    return num / den


def cluster_mean_likelihood(likelihood, k: int) -> list[list[float]]:
    """Row ``m`` becomes the average of the ``k`` rows in ``m``'s cluster."""
    rows = [[float(x) for x in row] for row in likelihood]
    if len(rows) % k:
        raise ValueError("observation count must be a multiple of the cluster size")
    out = []
    for start in range(0, len(rows), k):
        block = rows[start:start + k]
        mean = [sum(col) / k for col in zip(*block)]
        out.extend([list(mean) for _ in range(k)])
    return out


# discrete enumeration ------------------------------------------------------------


def enumerate_discrete(T, Z, r, b, action: int, k: int = 1) -> tuple[float, float]:
    """``(E[H], E[r])`` of the next posterior, summing over every observation.

    With ``k > 1`` the observation table is replaced column-block-wise by
    its cluster average before enumeration.
    """
    n_s, n_o = len(Z), len(Z[0])
    if n_o % k:
        raise ValueError("observation count must be a multiple of the cluster size")
    Zk = [[0.0] * n_o for _ in range(n_s)]
    for s in range(n_s):
        for start in range(0, n_o, k):
            avg = sum(Z[s][start:start + k]) / k
            for o in range(start, start + k):
                Zk[s][o] = avg
    pred = [sum(b[sp] * T[action][sp][s] for sp in range(n_s)) for s in range(n_s)]
    ent = rew = 0.0
    for o in range(n_o):
        joint = [Zk[s][o] * pred[s] for s in range(n_s)]
        p_o = sum(joint)
        if p_o <= 0.0:
            continue
        h = 0.0
        for s in range(n_s):
            p = joint[s] / p_o
            if p > 0.0:
                h -= p * math.log(p)
            rew += joint[s] * r[s][action]
        ent += p_o * h
    return ent, rew


# tree values ---------------------------------------------------------------------


@dataclass
class ExactTreeValue:
    """``V[path]`` for belief nodes and ``Q[path + (a,)]`` for action nodes.

    A path alternates action index and observation (child) index from the root.
    """

    V: dict = field(default_factory=dict)
    Q: dict = field(default_factory=dict)
    R: dict = field(default_factory=dict)

    @property
    def root(self) -> float:
        return self.V[()]


def _node_reward(anode, model: PomdpModel, spec: RewardSpec, k: int) -> float:
    bp = anode.predicted
    prior = bp.prior
    lik = model.observation_density(anode.observations, bp.states)
    if k > 1:
        lik = cluster_mean_likelihood(lik, k)
    state = naive_expected_state_reward(prior.weights, bp.states, anode.action, model, lik) if spec.omega1 else 0.0
    ent = 0.0
    if spec.omega2:
        ent = naive_expected_entropy(prior.states, prior.weights, bp.states, None, anode.action, model,
                                     likelihood=lik)
    return spec.omega1 * state + spec.omega2 * ent


def _evaluate(root, depth: int, model: PomdpModel, spec: RewardSpec, gamma: float, k: int) -> ExactTreeValue:
    out = ExactTreeValue()

    def visit(node, d, path):
        if d == 0 or not node.children:
            out.V[path] = 0.0
            return 0.0
        best = -math.inf
        for a, anode in sorted(node.children.items()):
            r = _node_reward(anode, model, spec, k)
            future = 0.0
            if anode.children:
                vals = [visit(c, d - 1, path + (a, j)) for j, c in enumerate(anode.children)]
                future = sum(vals) / len(vals)
            q = r + gamma * future
            out.R[path + (a,)] = r
            out.Q[path + (a,)] = q
            best = max(best, q)
        out.V[path] = best
        return best

    visit(root, depth, ())
    return out


def exact_sparse_sampling_value(root, depth: int, model: PomdpModel, reward: RewardSpec | None = None,
                                gamma: float | None = None) -> ExactTreeValue:
    """Bottom-up max/mean backup of a materialised tree with exact rewards."""
    spec = model.reward if reward is None else reward
    return _evaluate(root, depth, model, spec, model.gamma if gamma is None else gamma, 1)


def exact_abstract_tree_value(root, depth: int, model: PomdpModel, k: int, reward: RewardSpec | None = None,
                              gamma: float | None = None) -> ExactTreeValue:
    """Same backup, every reward computed under the cluster-averaged likelihood."""
    spec = model.reward if reward is None else reward
    return _evaluate(root, depth, model, spec, model.gamma if gamma is None else gamma, k)


def is_exhaustive(root, depth: int, n_actions: int, n_obs: int) -> bool:
    """Every action expanded and every observation branch materialised to ``depth``."""
    if depth == 0:
        return True
    if len(root.children) != n_actions:
        return False
    for anode in root.children.values():
        if depth > 1 and len(anode.children) != n_obs:
            return False
        if not all(is_exhaustive(c, depth - 1, n_actions, n_obs) for c in anode.children):
            return False
    return True
