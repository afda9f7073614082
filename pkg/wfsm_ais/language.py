"""
Language anomaly detection on character n-grams.

A positive-selection repertoire is trained on the n-grams of a subsample of one
corpus; every test line is scored by the mean (or sum) of its n-gram scores.
"""

import logging
import re
import string
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

from .errors import ExperimentConfigError
from .experiment import ExperimentResult, Record, execute_runs, run_rng, run_seed
from .matching import MatchingRule
from .metrics import auc
from .selection import Mode, Repertoire, positive_select, score

logger = logging.getLogger(__name__)

DEFAULT_ALPHABET = string.ascii_lowercase
AGGREGATIONS = ("mean", "sum")


def extract_ngrams(lines: Iterable[str], n: int, alphabet: str = DEFAULT_ALPHABET) -> List[str]:
    """Overlapping n-grams of every maximal run of alphabet characters, in order."""
    if n < 1:
        raise ExperimentConfigError(f"n-gram length must be at least 1, got {n}")
    separators = re.compile(f"[^{re.escape(alphabet)}]+")
    out = []
    for line in lines:
        for run in separators.split(line.lower()):
            out.extend(run[i:i + n] for i in range(len(run) - n + 1))
    return out


def read_corpus(path: Union[str, Path]) -> List[str]:
    """Lines of a plain-text corpus, without line endings."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"corpus not found: {path}")
    return path.read_text(encoding="utf-8").splitlines()


@dataclass
class LanguageConfig:
    train_path: Union[str, Path]
    normal_path: Union[str, Path]
    anomalous_path: Union[str, Path]
    n: int = 3
    rules: Sequence[MatchingRule] = field(default_factory=list)
    modes: Sequence[Mode] = (Mode.WEIGHTED, Mode.UNWEIGHTED)
    train_sizes: Sequence[int] = (1000,)
    runs: int = 20
    seed: int = 0
    aggregation: str = "mean"
    alphabet: str = DEFAULT_ALPHABET
    jobs: int = 1

    def validate(self, corpus_size: Optional[int] = None) -> "LanguageConfig":
        errors = []
        if self.n < 1:
            errors.append(f"n-gram length must be at least 1, got {self.n}")
        if not self.train_sizes:
            errors.append("need at least one training subsample size")
        for size in self.train_sizes:
            if size < 1:
                errors.append(f"training subsample {size} below 1")
            elif corpus_size is not None and size > corpus_size:
                errors.append(f"training subsample {size} exceeds the {corpus_size} training lines")
        if self.runs < 1:
            errors.append(f"runs must be at least 1, got {self.runs}")
        if self.jobs < 1:
            errors.append(f"jobs must be at least 1, got {self.jobs}")
        if self.seed < 0:
            errors.append("seed must be non-negative")
        if self.aggregation not in AGGREGATIONS:
            errors.append(f"aggregation must be one of {', '.join(AGGREGATIONS)}")
        if not self.rules:
            errors.append("need at least one matching rule")
        for rule in self.rules:
            if rule.alphabet != self.alphabet or rule.length != self.n:
                errors.append(f"rule {rule.descriptor} does not fit {self.n}-grams over {self.alphabet!r}")
        try:
            self.modes = [Mode(mode) for mode in self.modes]
        except ValueError as exc:
            errors.append(str(exc))
        if errors:
            raise ExperimentConfigError("; ".join(errors))
        return self


@dataclass
class _Corpora:
    config: LanguageConfig
    train: List[str]
    normal: List[List[str]]
    anomalous: List[List[str]]


def _test_ngrams(lines: Sequence[str], config: LanguageConfig, label: str) -> List[List[str]]:
    grams = [extract_ngrams([line], config.n, config.alphabet) for line in lines]
    kept = [g for g in grams if g]
    dropped = len(grams) - len(kept)
    if dropped:
        logger.warning("%s corpus: dropped %d of %d lines without %d-grams", label, dropped, len(grams), config.n)
    if not kept:
        raise ExperimentConfigError(f"{label} corpus yields no {config.n}-grams")
    return kept


def line_score(rep: Repertoire, grams: Sequence[str], cache: Dict[str, object], aggregation: str = "mean"):
    """Exact mean (or sum) of the n-gram scores of one test line."""
    total = Fraction(0)
    for gram in grams:
        if gram not in cache:
            cache[gram] = score(rep, gram)
        total += cache[gram]
    return total / len(grams) if aggregation == "mean" else total


def language_run(corpora: _Corpora, run: int) -> List[Record]:
    config = corpora.config
    seed = run_seed(config.seed, run)
    rng = run_rng(seed)
    records = []
    for size in config.train_sizes:
        picked = rng.choice(len(corpora.train), size=size, replace=False)
        grams = extract_ngrams([corpora.train[i] for i in picked], config.n, config.alphabet)
        if not grams:
            raise ExperimentConfigError(f"training subsample of {size} lines yields no {config.n}-grams")
        for rule in config.rules:
            for mode in config.modes:
                rep = positive_select(grams, rule, mode)
                cache: Dict[str, object] = {}
                normal = [line_score(rep, g, cache, config.aggregation) for g in corpora.normal]
                anomalous = [line_score(rep, g, cache, config.aggregation) for g in corpora.anomalous]
                records.append({
                    "experiment": "language", "run": run, "seed": seed, "mode": mode.value,
                    "rule": rule.descriptor, "param_n": config.n, "param_mu": None,
                    "train_size": size, "auc": auc(anomalous, normal),
                })
    logger.debug("language run %d: %d records", run, len(records))
    return records


def load_corpora(config: LanguageConfig) -> _Corpora:
    train = [line for line in read_corpus(config.train_path) if line.strip()]
    config.validate(len(train))
    normal = _test_ngrams(read_corpus(config.normal_path), config, "normal")
    anomalous = _test_ngrams(read_corpus(config.anomalous_path), config, "anomalous")
    return _Corpora(config, train, normal, anomalous)


def run_language(config: LanguageConfig) -> ExperimentResult:
    corpora = load_corpora(config)
    logger.info("language study: %d training lines, %d normal / %d anomalous test lines, %d run(s)",
                len(corpora.train), len(corpora.normal), len(corpora.anomalous), config.runs)
    return ExperimentResult.from_records(execute_runs(language_run, corpora, config.runs, config.jobs))
