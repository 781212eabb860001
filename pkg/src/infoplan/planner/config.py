from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from ..core import RewardSpec

SELECTION_RULES = ("visits", "upper")


@dataclass(frozen=True)
class PlannerConfig:
    """Hyperparameters shared by the forward-search engines and PFT-DPW.

    ``clusters * cluster_size`` observations are sampled per action node;
    ``cluster_size == 1`` is plain FSSS.
    """

    iterations: int = 2000
    depth: int = 3
    clusters: int = 4
    cluster_size: int = 1
    gamma: float = 1.0
    reward: RewardSpec = field(default_factory=RewardSpec)
    budget: float | None = None
    rollouts: bool = True
    selection: str = "visits"
    c_ucb: float = 1.0
    k_o: float = 4.0
    alpha_o: float = 0.014
    max_obs_retries: int = 10

    def __post_init__(self):
        if self.iterations < 1 or self.depth < 1:
            raise ValueError("iterations and depth must be at least 1")
        if self.clusters < 1 or self.cluster_size < 1:
            raise ValueError("clusters and cluster_size must be at least 1")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if self.selection not in SELECTION_RULES:
            raise ValueError(f"selection must be one of {SELECTION_RULES}")

    @property
    def n_observations(self) -> int:
        return self.clusters * self.cluster_size

    def unabstracted(self) -> "PlannerConfig":
        """Same observation count with singleton clusters (the FSSS twin)."""
        return replace(self, clusters=self.n_observations, cluster_size=1)

    @classmethod
    def from_dict(cls, d: dict, reward: RewardSpec | None = None) -> "PlannerConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names - {"particles"}
        if unknown:
            raise ValueError(f"unknown planner keys: {sorted(unknown)}")
        kwargs = {k: v for k, v in d.items() if k in names}
        if reward is not None and "reward" not in kwargs:
            kwargs["reward"] = reward
        return cls(**kwargs)
