"""
The noisy bitstring problem.

Samples of a class with center c are drawn by flipping a geometrically
distributed number of distinct bits of c. A positive-selection repertoire is
trained on noisy samples of 0^l and scored on fresh samples of 0^l (normal)
and 1^l (anomalous).
"""

import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence

import numpy as np

from .errors import ExperimentConfigError, LengthMismatchError
from .experiment import ExperimentResult, Record, execute_runs, run_rng, run_seed
from .matching import MatchingRule
from .metrics import auc
from .selection import Mode, positive_select, score

logger = logging.getLogger(__name__)

BITS = "01"

# geometric_draw(1) never stops; callers clamp this to the string length
UNBOUNDED = sys.maxsize


def geometric_draw(mu: float, rng: np.random.Generator) -> int:
    """k >= 0 with probability (1 - mu) * mu**k."""
    if not 0 <= mu <= 1:
        raise ExperimentConfigError(f"mutation rate must lie in [0, 1], got {mu}")
    if mu == 1:
        return UNBOUNDED
    return int(rng.geometric(1.0 - float(mu))) - 1


def sample_noisy(center: str, mu: float, rng: np.random.Generator) -> str:
    """Flip min(geometric_draw(mu), len(center)) distinct, uniformly chosen bits."""
    flips = min(geometric_draw(mu, rng), len(center))
    if flips == 0:
        return center
    bits = list(center)
    for pos in rng.choice(len(center), size=flips, replace=False):
        bits[pos] = "1" if bits[pos] == "0" else "0"
    return "".join(bits)


def membership_prob(center: str, mu, x: str) -> Fraction:
    """Exact probability that sample_noisy(center, mu) returns ``x``."""
    if len(center) != len(x):
        raise LengthMismatchError(f"{x!r} and {center!r} differ in length")
    mu = Fraction(mu)
    length = len(center)
    h = sum(a != b for a, b in zip(center, x))
    if h == length:
        return mu ** length
    return (1 - mu) * mu ** h / math.comb(length, h)


def majority_threshold(length: int, mu) -> float:
    """
    Training size at which one sample with a majority of flipped bits is
    expected: 1 / P(more than length/2 flips) = 1 / mu**(length//2 + 1).
    """
    p = float(mu) ** (length // 2 + 1)
    return math.inf if p == 0 else 1.0 / p


@dataclass
class NoisyConfig:
    length: int = 8
    mutation_rates: Sequence[float] = (0.6,)
    train_sizes: Sequence[int] = (10, 50, 250, 1000, 2000)
    test_size: int = 100
    rules: Sequence[MatchingRule] = field(default_factory=list)
    modes: Sequence[Mode] = (Mode.WEIGHTED, Mode.UNWEIGHTED)
    runs: int = 20
    seed: int = 0
    jobs: int = 1

    def validate(self) -> "NoisyConfig":
        errors = []
        if self.length < 1:
            errors.append(f"length must be at least 1, got {self.length}")
        errors += [f"mutation rate {mu} outside [0, 1]" for mu in self.mutation_rates if not 0 <= mu <= 1]
        errors += [f"train size {n} below 1" for n in self.train_sizes if n < 1]
        if not self.mutation_rates or not self.train_sizes:
            errors.append("need at least one mutation rate and one train size")
        if self.test_size < 1:
            errors.append(f"test size must be at least 1, got {self.test_size}")
        if self.runs < 1:
            errors.append(f"runs must be at least 1, got {self.runs}")
        if self.jobs < 1:
            errors.append(f"jobs must be at least 1, got {self.jobs}")
        if self.seed < 0:
            errors.append("seed must be non-negative")
        if not self.rules:
            errors.append("need at least one matching rule")
        for rule in self.rules:
            if rule.alphabet != BITS or rule.length != self.length:
                errors.append(f"rule {rule.descriptor} does not fit bitstrings of length {self.length}")
        try:
            self.modes = [Mode(mode) for mode in self.modes]
        except ValueError as exc:
            errors.append(str(exc))
        if not self.modes:
            errors.append("need at least one mode")
        if errors:
            raise ExperimentConfigError("; ".join(errors))
        return self


def _scores(rep, strings: Sequence[str]) -> List:
    cache: Dict[str, object] = {}
    out = []
    for t in strings:
        if t not in cache:
            cache[t] = score(rep, t)
        out.append(cache[t])
    return out


def _draw(center: str, mu: float, count: int, rng: np.random.Generator) -> List[str]:
    return [sample_noisy(center, mu, rng) for _ in range(count)]


def noisy_run(config: NoisyConfig, run: int) -> List[Record]:
    """One run over the whole grid; both modes see the same samples."""
    seed = run_seed(config.seed, run)
    rng = run_rng(seed)
    normal_center, anomalous_center = "0" * config.length, "1" * config.length
    records = []
    for rule in config.rules:
        for mu in config.mutation_rates:
            for n in config.train_sizes:
                train = _draw(normal_center, mu, n, rng)
                normal = _draw(normal_center, mu, config.test_size, rng)
                anomalous = _draw(anomalous_center, mu, config.test_size, rng)
                for mode in config.modes:
                    rep = positive_select(train, rule, mode)
                    value = auc(_scores(rep, anomalous), _scores(rep, normal))
                    records.append({
                        "experiment": "noisy", "run": run, "seed": seed, "mode": mode.value,
                        "rule": rule.descriptor, "param_n": config.length, "param_mu": mu,
                        "train_size": n, "auc": value,
                    })
    logger.debug("noisy run %d: %d records", run, len(records))
    return records


def run_noisy(config: NoisyConfig) -> ExperimentResult:
    """All runs of the noisy bitstring grid, with the majority-flip threshold per mu."""
    config.validate()
    logger.info("noisy study: %d rule(s), mu=%s, N=%s, %d run(s)",
                len(config.rules), list(config.mutation_rates), list(config.train_sizes), config.runs)
    result = ExperimentResult.from_records(execute_runs(noisy_run, config, config.runs, config.jobs))
    result.summary["n_star"] = [majority_threshold(config.length, mu) for mu in result.summary["param_mu"]]
    return result

