"""Fan trials out to worker processes and collect rows in trial order."""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .experiments import ExperimentSpec, TrialRecord, record_dicts, run_trial, trial_seed


def _job(args):
    spec, index, seed = args
    return run_trial(spec, index, seed)


def run_experiment(spec: ExperimentSpec, seed: int, jobs: int = 1) -> list[TrialRecord]:
    tasks = [(spec, i, trial_seed(seed, i)) for i in range(spec.trials)]
    rows: list[TrialRecord] = []
    if jobs <= 1:
        for t in tasks:
            rows.extend(_job(t))
        return rows
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order, so the collector writes deterministically
        for batch in pool.map(_job, tasks):
            rows.extend(batch)
    return rows


def write_csv(rows: list[TrialRecord], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TrialRecord.columns())
        writer.writeheader()
        writer.writerows(record_dicts(rows))
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
