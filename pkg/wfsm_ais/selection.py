"""
Weighted and unweighted positive / negative selection.

A repertoire is the maximal detector set selected on a training sample, stored
as one machine over the rule's detector alphabet. Positive selection keeps the
detectors that recognize at least one training string (weighted by how many
they recognize); negative selection keeps the detectors that recognize none
(weighted by a pre-existing bias, or 1).
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import pandas as pd

from .errors import FormatError, SelectionError, WfsmAisError
from .fsm_io import dumps, loads
from .matching import BiasTable, MatchingRule, biased_universe, co_pattern, parse_rule, validate_string
from .rational import format_rational, report_digits, to_decimal
from .wfsm import (FsmStats, Wfsm, count_strings, difference, intersect, scale, stats, support,
                   total_weight, union_all, weight_digits)

logger = logging.getLogger(__name__)

Score = Union[Fraction, int]


class Mode(str, Enum):
    WEIGHTED = "weighted"
    UNWEIGHTED = "unweighted"


class Polarity(str, Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class Repertoire:
    machine: Wfsm
    rule: MatchingRule
    mode: Mode
    polarity: Polarity

    @property
    def stats(self) -> FsmStats:
        return stats(self.machine)

    @property
    def size(self) -> int:
        """Number of detectors."""
        return count_strings(self.machine)


@dataclass
class ScoreReport:
    """Scores in test-string order; exact until rendered."""
    strings: List[str] = field(default_factory=list)
    scores: List[Score] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.scores)

    def __iter__(self):
        return iter(zip(self.strings, self.scores))

    def to_frame(self, digits: int = 12) -> pd.DataFrame:
        return pd.DataFrame({
            "string": self.strings,
            "score": [format_rational(s) for s in self.scores],
            "decimal": [to_decimal(s, digits) for s in self.scores],
        }, columns=["string", "score", "decimal"])


def validate_strings(strings: Iterable[str], rule: MatchingRule) -> List[str]:
    """All strings, checked; errors name the 1-based position of the bad string."""
    checked = []
    for index, s in enumerate(strings, start=1):
        try:
            checked.append(validate_string(rule, s))
        except WfsmAisError as exc:
            raise FormatError(str(exc), index) from None
    return checked


def _matched_union(strings: Sequence[str], rule: MatchingRule) -> Wfsm:
    """Union of M[s_i]; a string seen k times contributes k * M[s]."""
    counts = Counter(validate_strings(strings, rule))
    machines = [co_pattern(rule, s) if k == 1 else scale(co_pattern(rule, s), Fraction(k))
                for s, k in sorted(counts.items())]
    merged = union_all(machines, alphabet=rule.detector_alphabet)
    logger.debug("merged %d distinct of %d training strings into %s", len(counts), len(strings), stats(merged))
    return merged


def _require_input(strings: Sequence[str]) -> Sequence[str]:
    strings = list(strings)
    if not strings:
        raise SelectionError("training sample is empty")
    return strings


def positive_select(strings: Sequence[str], rule: MatchingRule, mode: Union[Mode, str] = Mode.WEIGHTED) -> Repertoire:
    """Detectors that recognize at least one training string."""
    mode = Mode(mode)
    machine = _matched_union(_require_input(strings), rule)
    if mode is Mode.UNWEIGHTED:
        machine = support(machine)
    report_digits(weight_digits(machine), "positive selection")
    logger.debug("positive %s repertoire: %s", mode.value, stats(machine))
    return Repertoire(machine, rule, mode, Polarity.POSITIVE)


def negative_select(strings: Sequence[str], rule: MatchingRule,
                    bias: Union[BiasTable, Wfsm, None] = None,
                    mode: Union[Mode, str] = Mode.WEIGHTED) -> Repertoire:
    """Detectors that recognize no training string, carrying bias weights in weighted mode."""
    mode = Mode(mode)
    matched = _matched_union(_require_input(strings), rule)
    machine = difference(biased_universe(rule, bias if mode is Mode.WEIGHTED else None), matched)
    if mode is Mode.UNWEIGHTED:
        machine = support(machine)
    report_digits(weight_digits(machine), "negative selection")
    logger.debug("negative %s repertoire: %s", mode.value, stats(machine))
    return Repertoire(machine, rule, mode, Polarity.NEGATIVE)


def score(rep: Repertoire, t: str) -> Score:
    """Summed weight (weighted) or number (unweighted) of detectors recognizing ``t``."""
    matched = intersect(rep.machine, co_pattern(rep.rule, validate_string(rep.rule, t)), minimized=False)
    if rep.mode is Mode.UNWEIGHTED:
        return count_strings(matched)
    return total_weight(matched)


def _score_chunk(args: Tuple[Repertoire, List[str]]) -> List[Score]:
    rep, strings = args
    return [score(rep, t) for t in strings]


def score_batch(rep: Repertoire, strings: Sequence[str], jobs: int = 1) -> ScoreReport:
    """Score every test string, preserving order."""
    strings = list(strings)
    if jobs <= 1 or len(strings) < 2 * jobs:
        return ScoreReport(strings, _score_chunk((rep, strings)))
    size = -(-len(strings) // jobs)
    chunks = [(rep, strings[i:i + size]) for i in range(0, len(strings), size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        scores = [s for part in pool.map(_score_chunk, chunks) for s in part]
    return ScoreReport(strings, scores)


# -- persistence ---------------------------------------------------------------

def dumps_repertoire(rep: Repertoire) -> str:
    header = (f"# rule={rep.rule.descriptor}\n"
              f"# mode={rep.mode.value}\n"
              f"# polarity={rep.polarity.value}\n")
    return header + dumps(rep.machine)


def loads_repertoire(text: str) -> Repertoire:
    meta = {}
    for line in text.splitlines():
        if line.startswith("# ") and "=" in line:
            key, _, value = line[2:].partition("=")
            meta[key.strip()] = value.rstrip("\n")
    missing = [key for key in ("rule", "mode", "polarity") if key not in meta]
    if missing:
        raise FormatError(f"repertoire header lacks {', '.join(missing)}")
    rule = parse_rule(meta["rule"])
    try:
        mode, polarity = Mode(meta["mode"]), Polarity(meta["polarity"])
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    machine = loads(text)
    if not machine.is_empty and machine.alphabet != rule.detector_alphabet:
        raise FormatError(f"machine alphabet {machine.alphabet!r} does not fit rule {rule.descriptor}")
    if not machine.is_empty and machine.length != rule.length:
        raise FormatError(f"machine string length {machine.length} does not fit rule {rule.descriptor}")
    return Repertoire(machine, rule, mode, polarity)


def save_repertoire(rep: Repertoire, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_repertoire(rep), encoding="utf-8")


def load_repertoire(path: Union[str, Path]) -> Repertoire:
    return loads_repertoire(Path(path).read_text(encoding="utf-8"))
