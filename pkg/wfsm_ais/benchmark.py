"""
Merge benchmark: the union of all unit-weight singletons over an alphabet,
built merge by merge, with exact or float64 weights.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import pandas as pd

from .errors import ExperimentConfigError
from .matching import all_strings
from .rational import ONE
from .wfsm import FsmStats, Wfsm, count_strings, singleton, stats, support, union_all

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["merge_step", "num_strings", "states", "transitions", "weight_mode"]
WEIGHT_MODES = ("exact", "float64")
ORDERS = ("tree", "sequential")

# intermediate machines above this multiple of their support are reported
GROWTH_WARNING = 4.0


@dataclass
class BenchmarkResult:
    trace: pd.DataFrame
    machine: Wfsm
    max_growth: float

    @property
    def final(self) -> FsmStats:
        return stats(self.machine)


def _growth(machine: Wfsm) -> float:
    actual, reference = stats(machine), stats(support(machine))
    if reference.num_states == 0:
        return 1.0
    return max(actual.num_states / reference.num_states,
               actual.num_transitions / max(reference.num_transitions, 1))


def merge_benchmark(alphabet: str, length: int, weight_mode: str = "exact", order: str = "tree",
                    growth_warning: Optional[float] = None) -> BenchmarkResult:
    """
    Union all |alphabet|**length singletons of weight 1, minimizing after every
    merge, and record the size of every intermediate machine. Each intermediate
    is also compared to its unweighted support, the size the same merge
    schedule reaches without weights.
    """
    if weight_mode not in WEIGHT_MODES:
        raise ExperimentConfigError(f"weight mode must be one of {', '.join(WEIGHT_MODES)}")
    if order not in ORDERS:
        raise ExperimentConfigError(f"merge order must be one of {', '.join(ORDERS)}")
    if length < 0:
        raise ExperimentConfigError(f"length must be non-negative, got {length}")
    limit = growth_warning if growth_warning is not None else GROWTH_WARNING
    unit = ONE if weight_mode == "exact" else 1.0
    machines = [singleton(s, unit, alphabet) for s in all_strings(alphabet, length)]

    rows: List[dict] = []
    worst = [1.0]

    def record(machine: Wfsm) -> None:
        size = stats(machine)
        rows.append({"merge_step": len(rows) + 1, "num_strings": count_strings(machine),
                     "states": size.num_states, "transitions": size.num_transitions,
                     "weight_mode": weight_mode})
        worst[0] = max(worst[0], _growth(machine))

    machine = union_all(machines, alphabet=alphabet, order=order, on_merge=record)
    if not rows:
        record(machine)
    logger.info("%s %s merge of %d strings: %s", weight_mode, order, len(machines), stats(machine))
    if worst[0] > limit:
        logger.warning("%s merge: intermediate machines reached %.2fx their unweighted size (target %.1fx)",
                       weight_mode, worst[0], limit)
    return BenchmarkResult(pd.DataFrame(rows, columns=TRACE_COLUMNS), machine, worst[0])
