"""Benchmark and verification domains."""

from .discrete import (
    DiscreteGridPomdp,
    abstract_observation_table,
    discrete_exact_expected_entropy,
    discrete_exact_posterior,
    discrete_exact_predict,
    discrete_exact_state_reward,
    shannon_entropy,
)
from .lightdark import DIRECTIONS, NULL_ACTION, LightDark2D, lightdark_from_file, load_config
from .linear_gaussian import LinearGaussianModel

__all__ = [
    "DIRECTIONS",
    "NULL_ACTION",
    "DiscreteGridPomdp",
    "LightDark2D",
    "LinearGaussianModel",
    "abstract_observation_table",
    "discrete_exact_expected_entropy",
    "discrete_exact_posterior",
    "discrete_exact_predict",
    "discrete_exact_state_reward",
    "lightdark_from_file",
    "load_config",
    "shannon_entropy",
]
