"""Belief-space tree search: FSSS / AI-FSSS and the PFT-DPW baseline."""

from .config import PlannerConfig
from .fsss import ActionNode, BeliefNode, ForwardSearch, count_nodes, iter_action_nodes, solve
from .pft import PftDpw, pft_dpw_plan, widening_limit

__all__ = [
    "ActionNode",
    "BeliefNode",
    "ForwardSearch",
    "PftDpw",
    "PlannerConfig",
    "count_nodes",
    "iter_action_nodes",
    "pft_dpw_plan",
    "solve",
    "widening_limit",
]
