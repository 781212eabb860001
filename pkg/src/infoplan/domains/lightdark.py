"""2-D Light-Dark localisation domain with optional forbidden regions."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.spatial.distance import cdist

try:  # the public wrapper's argument checks cost more than the kernel at N ~ 20
    from scipy.spatial._distance_pybind import cdist_euclidean as _dist
    from scipy.spatial._distance_pybind import cdist_sqeuclidean as _sqdist
except ImportError:  # pragma: no cover
    def _dist(a, b):
        return cdist(a, b)

    def _sqdist(a, b):
        return cdist(a, b, "sqeuclidean")

from ..core import PomdpModel, RewardSpec, compose_reward
from ..filtering import ParticleBelief

NULL_ACTION = 8
DIRECTIONS = np.array(
    [[math.cos(2 * math.pi * k / 8), math.sin(2 * math.pi * k / 8)] for k in range(8)] + [[0.0, 0.0]]
)
# cos/sin of multiples of pi/4 leave ~1e-16 residue on the axes
DIRECTIONS[np.abs(DIRECTIONS) < 1e-12] = 0.0


def _spd(name, mat) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.shape != (2, 2) or not np.allclose(mat, mat.T) or np.any(np.linalg.eigvalsh(mat) <= 0):
        raise ValueError(f"{name} must be a symmetric positive definite 2x2 matrix")
    return mat


@dataclass(eq=False)
class LightDark2D(PomdpModel):
    """Agent moves on the plane; sensing is sharp near beacons, poor far away.

    Action ``k < 8`` translates one unit at angle ``2*pi*k/8``; action 8
    stays put.  Observation noise is isotropic with standard deviation
    ``obs_noise_base * (distance to nearest beacon + obs_noise_floor)``.
    """

    goal: np.ndarray = field(default_factory=lambda: np.array([8.0, 8.0]))
    beacons: np.ndarray = field(default_factory=lambda: np.array([[0.0, 6.0], [6.0, 0.0], [8.0, 8.0]]))
    prior_mean: np.ndarray = field(default_factory=lambda: np.zeros(2))
    prior_cov: np.ndarray = field(default_factory=lambda: np.eye(2))
    transition_cov: np.ndarray = field(default_factory=lambda: 0.1 * np.eye(2))
    obs_noise_base: float = 0.3
    obs_noise_floor: float = 0.1
    forbidden: np.ndarray = field(default_factory=lambda: np.zeros((0, 4)))
    obstacles: bool = False
    forbidden_penalty: float = -10.0
    goal_bonus: float = 10.0
    goal_radius: float = 1.0
    horizon: int = 25
    reward: RewardSpec = field(default_factory=lambda: RewardSpec(1.0, -1.0))
    gamma: float = 1.0

    n_actions = 9

    def __post_init__(self):
        self.goal = np.asarray(self.goal, dtype=float).reshape(2)
        self.beacons = np.asarray(self.beacons, dtype=float).reshape(-1, 2)
        self.prior_mean = np.asarray(self.prior_mean, dtype=float).reshape(2)
        self.prior_cov = _spd("prior_cov", self.prior_cov)
        self.transition_cov = _spd("transition_cov", self.transition_cov)
        self.forbidden = np.asarray(self.forbidden, dtype=float).reshape(-1, 4)
        if len(self.beacons) == 0:
            raise ValueError("at least one beacon is required")
        if self.obs_noise_base < 0 or self.obs_noise_floor <= 0:
            raise ValueError("observation noise parameters must be positive")
        self._chol = np.linalg.cholesky(self.transition_cov)
        # whitening map: |W (x' - x - u)|^2 is the Mahalanobis distance
        self._whiten = np.linalg.inv(self._chol).T
        self._white_dirs = DIRECTIONS @ self._whiten
        self._norm = 1.0 / (2 * math.pi * math.sqrt(np.linalg.det(self.transition_cov)))
        tc = self.transition_cov
        # isotropic noise needs no whitening, only a scalar on the squared distance
        self._iso = -0.5 / tc[0, 0] if tc[0, 1] == 0.0 and tc[0, 0] == tc[1, 1] else None

    @classmethod
    def from_config(cls, cfg: dict) -> "LightDark2D":
        cfg = {k: v for k, v in cfg.items() if not k.startswith("_")}
        cfg.pop("name", None)
        omega1 = cfg.pop("omega1", 1.0)
        omega2 = cfg.pop("omega2", -1.0)
        known = set(cls.__dataclass_fields__)
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown domain keys: {sorted(unknown)}")
        return cls(reward=RewardSpec(omega1, omega2), **cfg)

    # dynamics -----------------------------------------------------------

    def move(self, states: np.ndarray, action: int) -> np.ndarray:
        return np.asarray(states, dtype=float) + DIRECTIONS[action]

    def sample_transition(self, states, action, rng):
        states = np.atleast_2d(states)
        return states + (DIRECTIONS[action] + rng.standard_normal(states.shape) @ self._chol.T)

    def transition_density(self, next_states, prev_states, action):
        if self._iso is not None:
            d = _sqdist(np.asarray(next_states, dtype=float), prev_states + DIRECTIONS[action])
            d *= self._iso
            np.exp(d, out=d)
            d *= self._norm
            return d
        nxt = next_states @ self._whiten
        mean = prev_states @ self._whiten + self._white_dirs[action]
        return self._norm * np.exp(-0.5 * _sqdist(nxt, mean))

    # sensing ------------------------------------------------------------

    def noise_scale(self, states) -> np.ndarray:
        nearest = _dist(np.atleast_2d(np.asarray(states, dtype=float)), self.beacons).min(axis=1)
        return self.obs_noise_base * (nearest + self.obs_noise_floor)

    def sample_observation(self, states, rng):
        states = np.atleast_2d(states)
        sigma = self.noise_scale(states)
        return states + sigma[:, None] * rng.standard_normal(states.shape)

    def observation_density(self, observations, states):
        states = np.atleast_2d(states)
        var = self.noise_scale(states) ** 2
        d2 = _sqdist(np.atleast_2d(np.asarray(observations, dtype=float)), np.asarray(states, dtype=float))
        return np.exp(-0.5 * d2 / var) / (2 * math.pi * var)

    # reward -------------------------------------------------------------

    def in_forbidden(self, states) -> np.ndarray:
        states = np.atleast_2d(states)
        if len(self.forbidden) == 0:
            return np.zeros(len(states), dtype=bool)
        x, y = states[:, 0:1], states[:, 1:2]
        f = self.forbidden
        inside = (x >= f[:, 0]) & (x <= f[:, 2]) & (y >= f[:, 1]) & (y <= f[:, 3])
        return inside.any(axis=1)

    def at_goal(self, states) -> np.ndarray:
        states = np.atleast_2d(states)
        return np.linalg.norm(states - self.goal, axis=1) <= self.goal_radius

    def state_reward(self, states, action):
        states = np.atleast_2d(states)
        r = -np.linalg.norm(states - self.goal, axis=1)
        if self.obstacles:
            r = r + self.forbidden_penalty * self.in_forbidden(states) + self.goal_bonus * self.at_goal(states)
        return r

    def belief_reward(self, belief: ParticleBelief, action: int, entropy: float) -> float:
        """Reward of a (posterior) belief given an entropy value for it."""
        expected = float(belief.weights @ self.state_reward(belief.states, action))
        return compose_reward(expected, entropy, self.reward)

    def sample_prior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.multivariate_normal(self.prior_mean, self.prior_cov, size=n)

    def initial_belief(self, n: int, rng: np.random.Generator) -> ParticleBelief:
        return ParticleBelief.uniform(self.sample_prior(n, rng))


CONFIG_DIR = "configs"


def config_path(name: str) -> Path:
    return Path(str(resources.files(__package__).joinpath(CONFIG_DIR, name)))


def load_config(path) -> dict:
    """Read a JSON config; bare names resolve to the shipped fixtures."""
    p = Path(path)
    if not p.exists():
        p = config_path(p.name if p.suffix else f"{p.name}.json")
    with open(p) as fh:
        return json.load(fh)


def lightdark_from_file(path) -> LightDark2D:
    cfg = load_config(path)
    return LightDark2D.from_config(cfg.get("domain", cfg))
