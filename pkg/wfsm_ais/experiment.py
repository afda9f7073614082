"""
Shared plumbing for the seeded experiment studies: per-run seeds, parallel
execution of independent runs, aggregation and CSV output.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from .errors import ExperimentConfigError
from .metrics import sem

logger = logging.getLogger(__name__)

RUN_COLUMNS = ["experiment", "run", "seed", "mode", "rule", "param_n", "param_mu", "train_size", "auc"]
GROUP_COLUMNS = ["experiment", "mode", "rule", "param_n", "param_mu", "train_size"]
FLOAT_FORMAT = "%.10g"

Record = Dict[str, object]


def run_seed(base_seed: int, run_index: int) -> int:
    """Seed of one run, derived from (base seed, run index) by SeedSequence splitting."""
    if base_seed < 0 or run_index < 0:
        raise ExperimentConfigError("seeds and run indices must be non-negative")
    state = np.random.SeedSequence([base_seed, run_index]).generate_state(1, dtype=np.uint32)
    return int(state[0])


def run_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def execute_runs(worker: Callable[..., List[Record]], config, runs: int, jobs: int = 1) -> List[Record]:
    """
    Call ``worker(config, run_index)`` for every run and concatenate the records
    in run order. ``jobs > 1`` spreads the runs over worker processes; every run
    derives its own generator, so the records do not depend on ``jobs``.
    """
    task = partial(worker, config)
    if jobs <= 1 or runs == 1:
        batches = [task(run) for run in range(runs)]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(task, range(runs)))
    return [record for batch in batches for record in batch]


def summarize(runs: pd.DataFrame) -> pd.DataFrame:
    """Mean AUC and standard error over runs, per parameter combination."""
    if runs.empty:
        return pd.DataFrame(columns=GROUP_COLUMNS + ["runs", "mean_auc", "sem"])
    grouped = runs.groupby(GROUP_COLUMNS, sort=False, dropna=False)["auc"]
    summary = grouped.agg(runs="count", mean_auc="mean", sem=lambda col: sem(list(col))).reset_index()
    return summary


@dataclass
class ExperimentResult:
    """Per-run records and their aggregate."""
    runs: pd.DataFrame
    summary: pd.DataFrame

    @classmethod
    def from_records(cls, records: Sequence[Record]) -> "ExperimentResult":
        runs = pd.DataFrame(list(records), columns=RUN_COLUMNS)
        return cls(runs, summarize(runs))

    def write(self, runs_path: Union[str, Path], summary_path: Union[str, Path]) -> None:
        write_csv(self.runs, runs_path)
        write_csv(self.summary, summary_path)


def write_csv(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    """CSV with fixed float formatting, so reruns are byte-identical."""
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %d rows to %s", len(frame), path)
