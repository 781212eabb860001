"""Reproducible experiment harness (CSV + optional SVG)."""

from .experiments import EXPERIMENTS, ExperimentSpec, TrialRecord, load_spec, run_trial, trial_seed
from .runner import read_csv, run_experiment, write_csv

__all__ = [
    "EXPERIMENTS",
    "ExperimentSpec",
    "TrialRecord",
    "load_spec",
    "read_csv",
    "run_experiment",
    "run_trial",
    "trial_seed",
    "write_csv",
]
