"""
Plain-text machine format.

    wfsm v1 alphabet=<characters in order>
    [initial <num>/<den>]
    <src> <dst> <symbol> <num>/<den>
    ...
    final <state>

Start state is 0. Transitions are written sorted by (source, symbol), so
``loads(dumps(m)) == m`` for every canonical machine. Lines starting with ``#``
carry metadata (used by repertoire files) and are skipped by the machine parser.
"""

import logging
import re
from fractions import Fraction
from math import gcd
from pathlib import Path
from typing import Dict, List, Tuple, Union

from .errors import FormatError, InvariantError
from .rational import format_rational
from .wfsm import Wfsm, check

logger = logging.getLogger(__name__)

MAGIC = "wfsm v1"
_RATIONAL = re.compile(r"^(-?\d+)/(\d+)$")

PathLike = Union[str, Path]


def dumps(machine: Wfsm) -> str:
    lines = [f"{MAGIC} alphabet={machine.alphabet}"]
    if not machine.is_empty and machine.initial_weight != 1:
        lines.append(f"initial {format_rational(machine.initial_weight)}")
    for src, dst, symbol, weight in machine.transitions():
        lines.append(f"{src} {dst} {symbol} {format_rational(weight)}")
    for state in sorted(machine.finals):
        lines.append(f"final {state}")
    return "\n".join(lines) + "\n"


def _weight(token: str, lineno: int, problems: List[str]) -> Fraction:
    match = _RATIONAL.match(token)
    if not match:
        raise FormatError(f"bad weight {token!r}", lineno)
    num, den = int(match.group(1)), int(match.group(2))
    if den == 0:
        raise FormatError(f"zero denominator in {token!r}", lineno)
    if gcd(num, den) != 1 or (num == 0 and den != 1):
        problems.append(f"normalized weights violated (line {lineno})")
    return Fraction(num, den)


def parse(text: str) -> Tuple[Wfsm, List[str]]:
    """Parse a machine without validating it; returns the machine and format problems."""
    lines = [(i, line.strip()) for i, line in enumerate(text.splitlines(), start=1)]
    lines = [(i, line) for i, line in lines if line and not line.startswith("#")]
    if not lines:
        raise FormatError("missing 'wfsm v1' header")
    lineno, header = lines[0]
    prefix = f"{MAGIC} alphabet="
    if not header.startswith(prefix) or len(header) == len(prefix):
        raise FormatError(f"expected '{prefix}<characters>'", lineno)
    alphabet = header[len(prefix):]

    problems: List[str] = []
    transitions = []
    finals = []
    initial = Fraction(1)
    num_states = 0
    for lineno, line in lines[1:]:
        fields = line.split()
        try:
            if fields[0] == "final" and len(fields) == 2:
                state = int(fields[1])
                finals.append(state)
                num_states = max(num_states, state + 1)
            elif fields[0] == "initial" and len(fields) == 2:
                initial = _weight(fields[1], lineno, problems)
            elif len(fields) == 4:
                src, dst = int(fields[0]), int(fields[1])
                if len(fields[2]) != 1:
                    raise FormatError(f"symbol must be one character, got {fields[2]!r}", lineno)
                if src < 0 or dst < 0:
                    raise FormatError("negative state id", lineno)
                transitions.append((src, dst, fields[2], _weight(fields[3], lineno, problems)))
                num_states = max(num_states, src + 1, dst + 1)
            else:
                raise FormatError(f"unrecognized line {line!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"bad state id in {line!r}", lineno) from None
    if num_states == 0 and (transitions or finals):
        num_states = 1
    machine = Wfsm(alphabet, num_states, transitions, finals, initial)
    return machine, problems


def inspect(text: str) -> Tuple[Wfsm, List[str]]:
    """Parse and list every violated invariant, without raising on them."""
    machine, problems = parse(text)
    seen: Dict[str, None] = {}
    for problem in problems + check(machine):
        seen.setdefault(problem, None)
    return machine, list(seen)


def loads(text: str) -> Wfsm:
    machine, problems = inspect(text)
    if problems:
        raise InvariantError(problems)
    return machine


def write_wfsm(machine: Wfsm, path: PathLike) -> None:
    Path(path).write_text(dumps(machine), encoding="utf-8")


def read_wfsm(path: PathLike) -> Wfsm:
    return loads(Path(path).read_text(encoding="utf-8"))
