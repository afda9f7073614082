"""
Matching rules, detector machines and detector universes.

A rule fixes the alphabet, the string length and how a detector recognizes a
string: wildcard patterns, r-contiguous windows or r-Hamming balls. For every
string s, ``co_pattern`` builds the unit-weight machine of all detectors that
recognize s; ``universe`` builds the machine of all detectors, optionally with
a product-form bias weight.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import pandas as pd

from .errors import AlphabetError, FormatError, LengthMismatchError, RuleError
from .rational import ONE, format_rational, parse_rational
from .wfsm import Wfsm, count_strings, from_layers, intersect, validate_alphabet

logger = logging.getLogger(__name__)

DEFAULT_WILDCARD = "#"


class RuleKind(str, Enum):
    WILDCARD = "wildcard"
    CONTIGUOUS = "contiguous"
    HAMMING = "hamming"


@dataclass(frozen=True)
class MatchingRule:
    """Alphabet, string length, rule kind and matching radius."""
    kind: RuleKind
    alphabet: str
    length: int
    radius: int = 0
    wildcard: str = DEFAULT_WILDCARD

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", RuleKind(self.kind))
        except ValueError:
            raise RuleError(f"unknown rule kind {self.kind!r}") from None
        try:
            validate_alphabet(self.alphabet)
        except AlphabetError as exc:
            raise RuleError(str(exc)) from None
        if len(self.alphabet) < 2:
            raise RuleError("alphabet needs at least two characters")
        if self.length < 1:
            raise RuleError(f"length must be at least 1, got {self.length}")
        if self.kind is RuleKind.CONTIGUOUS and not 1 <= self.radius <= self.length:
            raise RuleError(f"contiguous radius must lie in 1..{self.length}, got {self.radius}")
        if self.kind is RuleKind.HAMMING and not 0 <= self.radius <= self.length:
            raise RuleError(f"hamming radius must lie in 0..{self.length}, got {self.radius}")
        if self.kind is RuleKind.WILDCARD:
            if len(self.wildcard) != 1 or self.wildcard in self.alphabet:
                raise RuleError(f"wildcard symbol {self.wildcard!r} must be one character outside the alphabet")
            if self.wildcard.isspace() or not self.wildcard.isprintable():
                raise RuleError("wildcard symbol must be printable")

    @property
    def detector_alphabet(self) -> str:
        if self.kind is RuleKind.WILDCARD:
            return self.alphabet + self.wildcard
        return self.alphabet

    @property
    def descriptor(self) -> str:
        parts = []
        if self.kind is not RuleKind.WILDCARD:
            parts.append(f"r={self.radius}")
        parts.append(f"len={self.length}")
        if self.kind is RuleKind.WILDCARD and self.wildcard != DEFAULT_WILDCARD:
            parts.append(f"wildcard={self.wildcard}")
        parts.append(f"alphabet={self.alphabet}")
        return f"{self.kind.value}:{','.join(parts)}"

    def __str__(self) -> str:
        return self.descriptor


def parse_rule(text: str, length: Optional[int] = None, alphabet: Optional[str] = None,
               radius: Optional[int] = None, wildcard: str = DEFAULT_WILDCARD) -> MatchingRule:
    """
    Parse ``kind:r=5,len=8,alphabet=01``. Keyword arguments fill in missing keys.
    ``alphabet=`` must come last; it takes the rest of the descriptor.
    """
    kind, _, rest = text.strip().partition(":")
    params: Dict[str, str] = {}
    while rest:
        if rest.startswith("alphabet="):
            params["alphabet"] = rest[len("alphabet="):]
            break
        item, _, rest = rest.partition(",")
        key, sep, value = item.partition("=")
        if not sep or key not in ("r", "len", "wildcard"):
            raise FormatError(f"bad rule parameter {item!r} in {text!r}")
        params[key] = value
    try:
        r = int(params["r"]) if "r" in params else radius
        n = int(params["len"]) if "len" in params else length
    except ValueError:
        raise FormatError(f"non-integer parameter in rule {text!r}") from None
    sigma = params.get("alphabet", alphabet)
    if n is None or sigma is None:
        raise FormatError(f"rule {text!r} needs len= and alphabet=")
    if kind in (RuleKind.CONTIGUOUS.value, RuleKind.HAMMING.value) and r is None:
        raise FormatError(f"rule {text!r} needs r=")
    return MatchingRule(kind, sigma, n, r or 0, params.get("wildcard", wildcard))


def validate_string(rule: MatchingRule, s: str, detector: bool = False) -> str:
    alphabet = rule.detector_alphabet if detector else rule.alphabet
    if len(s) != rule.length:
        raise LengthMismatchError(f"{s!r} has length {len(s)}, expected {rule.length}")
    for ch in s:
        if ch not in alphabet:
            raise AlphabetError(f"character {ch!r} of {s!r} is not in alphabet {alphabet!r}")
    return s


@dataclass(frozen=True)
class BiasTable:
    """Per-position, per-symbol positive factors; a detector weighs the product."""
    symbols: str
    factors: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        for row in self.factors:
            if len(row) != len(self.symbols):
                raise RuleError("bias table rows must have one factor per symbol")
            if any(f <= 0 for f in row):
                raise RuleError("bias factors must be positive")

    @property
    def length(self) -> int:
        return len(self.factors)

    def factor(self, position: int, symbol: str) -> Fraction:
        return self.factors[position][self.symbols.index(symbol)]

    def check_rule(self, rule: MatchingRule) -> None:
        if self.length != rule.length or sorted(self.symbols) != sorted(rule.detector_alphabet):
            raise RuleError(
                f"bias table is {self.length}x{len(self.symbols)} over {self.symbols!r}, "
                f"rule needs {rule.length}x{len(rule.detector_alphabet)} over {rule.detector_alphabet!r}")

    @classmethod
    def uniform(cls, rule: MatchingRule, overrides: Optional[Dict[str, Fraction]] = None) -> "BiasTable":
        """Factor 1 everywhere except the symbols given in ``overrides``, at every position."""
        overrides = overrides or {}
        row = tuple(Fraction(overrides.get(sym, ONE)) for sym in rule.detector_alphabet)
        return cls(rule.detector_alphabet, tuple(row for _ in range(rule.length)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([[format_rational(f) for f in row] for row in self.factors],
                            columns=list(self.symbols))


def read_bias_csv(path: Union[str, Path]) -> BiasTable:
    """Rows are positions, columns are symbols, cells are ``num/den``."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        if "position" in frame.columns:
            frame = frame.sort_values("position", key=lambda col: col.astype(int)).drop(columns="position")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise FormatError(f"bias table {path}: {exc}") from None
    except ValueError:
        raise FormatError(f"bias table {path}: positions must be integers") from None
    if any(len(col) != 1 for col in frame.columns):
        raise FormatError(f"bias table {path}: column headers must be single symbols")
    rows = tuple(tuple(parse_rational(cell) for cell in record) for record in frame.itertuples(index=False))
    return BiasTable("".join(frame.columns), rows)


def write_bias_csv(table: BiasTable, path: Union[str, Path]) -> None:
    table.to_frame().to_csv(path, index=False)


# -- oracle -----------------------------------------------------------------

def matches(rule: MatchingRule, d: str, x: str) -> bool:
    """Direct evaluation of the matching predicate, independent of any machine."""
    validate_string(rule, d, detector=True)
    validate_string(rule, x)
    if rule.kind is RuleKind.WILDCARD:
        return all(dc == rule.wildcard or dc == xc for dc, xc in zip(d, x))
    if rule.kind is RuleKind.HAMMING:
        return sum(dc != xc for dc, xc in zip(d, x)) <= rule.radius
    run = 0
    for dc, xc in zip(d, x):
        run = run + 1 if dc == xc else 0
        if run >= rule.radius:
            return True
    return False


# -- machines ---------------------------------------------------------------

@lru_cache(maxsize=65536)
def co_pattern(rule: MatchingRule, s: str) -> Wfsm:
    """All detectors that recognize ``s``, each with weight 1."""
    validate_string(rule, s)
    length, radius = rule.length, rule.radius

    if rule.kind is RuleKind.WILDCARD:
        def step(level, key, symbol):
            if symbol == s[level] or symbol == rule.wildcard:
                return None, ONE
            return None

        return from_layers(rule.detector_alphabet, length, None, step, lambda key: True)

    if rule.kind is RuleKind.HAMMING:
        def step(level, mismatches, symbol):
            mismatches += symbol != s[level]
            return (mismatches, ONE) if mismatches <= radius else None

        return from_layers(rule.alphabet, length, 0, step, lambda key: True)

    # key: (length of the current agreeing run, window already found)
    def step(level, key, symbol):
        run, found = key
        if found:
            return (0, True), ONE
        run = run + 1 if symbol == s[level] else 0
        if run >= radius:
            return (0, True), ONE
        if run + length - level - 1 < radius:
            return None
        return (run, False), ONE

    return from_layers(rule.alphabet, length, (0, False), step, lambda key: key[1])


def universe(rule: MatchingRule, bias: Optional[BiasTable] = None) -> Wfsm:
    """All detectors; weight 1, or the product of bias factors along the detector."""
    if bias is not None:
        bias.check_rule(rule)

    def step(level, key, symbol):
        return None, (bias.factor(level, symbol) if bias is not None else ONE)

    return from_layers(rule.detector_alphabet, rule.length, None, step, lambda key: True)


def biased_universe(rule: MatchingRule, bias: Union[BiasTable, Wfsm, None]) -> Wfsm:
    """Detector universe weighted by a bias table or an explicit bias machine."""
    if isinstance(bias, Wfsm):
        if bias.alphabet != rule.detector_alphabet:
            raise RuleError(f"bias machine alphabet {bias.alphabet!r} differs from {rule.detector_alphabet!r}")
        return intersect(universe(rule), bias)
    return universe(rule, bias)


def matched_set_size(rule: MatchingRule) -> int:
    """|m^-1(t)|, the same for every t."""
    return count_strings(co_pattern(rule, rule.alphabet[0] * rule.length))


def all_strings(alphabet: str, length: int) -> Sequence[str]:
    """Every string of the given length, in alphabet order."""
    out = [""]
    for _ in range(length):
        out = [prefix + ch for prefix in out for ch in alphabet]
    return out
