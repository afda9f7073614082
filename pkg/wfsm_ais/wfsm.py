"""
Deterministic acyclic weighted finite state machines.

Every machine here accepts strings of one common length (it is "leveled"), has
start state 0, no final-state weights and only nonzero transition weights. All
set operations return trimmed, weight-pushed and minimized machines whose
states are numbered canonically (breadth-first from the start state, arcs in
alphabet order), so equal weighted languages give identical machines.

Weights are exact ``Fraction`` values; ``float`` weights run through the same
code and are only used by the float merge benchmark.
"""

import logging
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .errors import AlphabetError, EnumerationLimitError, InvariantError, LengthMismatchError
from .rational import ONE, ZERO, digit_size

logger = logging.getLogger(__name__)

Weight = Union[Fraction, float]
Arc = Tuple[str, int, Weight]          # (symbol, target, weight)
Transition = Tuple[int, int, str, Weight]  # (source, target, symbol, weight)

_FINAL = ("final",)


@dataclass(frozen=True)
class FsmStats:
    """Size of a trimmed machine."""
    num_states: int
    num_transitions: int

    def __str__(self) -> str:
        return f"states={self.num_states} transitions={self.num_transitions}"


def _unit(like: Weight) -> Weight:
    return 1.0 if isinstance(like, float) else ONE


def validate_alphabet(alphabet: str) -> str:
    """Alphabets are ordered strings of distinct, printable, non-space characters."""
    if not isinstance(alphabet, str) or not alphabet:
        raise AlphabetError("alphabet must be a non-empty string")
    if len(set(alphabet)) != len(alphabet):
        raise AlphabetError(f"alphabet has repeated characters: {alphabet!r}")
    for ch in alphabet:
        if ch.isspace() or not ch.isprintable():
            raise AlphabetError(f"alphabet character {ch!r} is not printable")
    return alphabet


class Wfsm:
    """
    Immutable weighted automaton.

    Built through the module functions (``singleton``, ``union``, ...) the
    invariants always hold; the public constructor accepts arbitrary
    transitions so that files can be loaded and inspected with ``check``.
    """

    __slots__ = ("_alphabet", "_rank", "_arcs", "_finals", "_initial", "_delta", "_order", "_length")

    def __init__(self, alphabet: str, num_states: int, transitions: Iterable[Transition],
                 finals: Iterable[int], initial: Weight = ONE):
        alphabet = validate_alphabet(alphabet)
        rank = {ch: i for i, ch in enumerate(alphabet)}
        arcs: List[List[Arc]] = [[] for _ in range(num_states)]
        for src, dst, symbol, weight in transitions:
            if not 0 <= src < num_states:
                raise InvariantError([f"state range violated: transition source {src}"])
            arcs[src].append((symbol, dst, weight))
        for row in arcs:
            row.sort(key=lambda arc: (rank.get(arc[0], len(rank)), arc[0], arc[1]))
        self._setup(alphabet, rank, [tuple(row) for row in arcs], frozenset(finals), initial)

    @classmethod
    def _raw(cls, alphabet: str, arcs: Sequence[Sequence[Arc]], finals: Iterable[int],
             initial: Weight) -> "Wfsm":
        machine = cls.__new__(cls)
        rank = {ch: i for i, ch in enumerate(alphabet)}
        machine._setup(alphabet, rank, [tuple(row) for row in arcs], frozenset(finals), initial)
        return machine

    def _setup(self, alphabet, rank, arcs, finals, initial):
        self._alphabet = alphabet
        self._rank = rank
        self._arcs = tuple(arcs)
        self._finals = finals
        self._initial = initial
        self._delta = None
        self._order = None
        self._length = None

    # -- accessors -------------------------------------------------------

    @property
    def alphabet(self) -> str:
        return self._alphabet

    @property
    def num_states(self) -> int:
        return len(self._arcs)

    @property
    def finals(self) -> frozenset:
        return self._finals

    @property
    def initial_weight(self) -> Weight:
        return self._initial

    @property
    def is_empty(self) -> bool:
        return not self._arcs

    def arcs(self, state: int) -> Tuple[Arc, ...]:
        return self._arcs[state]

    def transitions(self) -> Iterator[Transition]:
        """All transitions sorted by (source, symbol)."""
        for src, row in enumerate(self._arcs):
            for symbol, dst, weight in row:
                yield src, dst, symbol, weight

    @property
    def length(self) -> Optional[int]:
        """Length of the accepted strings, ``None`` for the empty machine."""
        if self.is_empty:
            return None
        if self._length is None:
            state, depth = 0, 0
            while self._arcs[state] and depth <= self.num_states:
                state = self._arcs[state][0][1]
                depth += 1
            self._length = depth
        return self._length

    def step(self, state: int, symbol: str) -> Optional[Tuple[int, Weight]]:
        if self._delta is None:
            self._delta = [{sym: (dst, w) for sym, dst, w in row} for row in self._arcs]
        return self._delta[state].get(symbol)

    def topological_order(self) -> List[int]:
        if self._order is None:
            self._order = _topological(self._arcs)
        return self._order

    def __eq__(self, other) -> bool:
        if not isinstance(other, Wfsm):
            return NotImplemented
        return (self._alphabet == other._alphabet and self._arcs == other._arcs
                and self._finals == other._finals and self._initial == other._initial)

    def __hash__(self) -> int:
        return hash((self._alphabet, self._arcs, self._finals, self._initial))

    def __repr__(self) -> str:
        return f"Wfsm(alphabet={self._alphabet!r}, {stats(self)})"


# -- raw-machine helpers -------------------------------------------------

def _topological(arcs: Sequence[Sequence[Arc]]) -> List[int]:
    """Kahn order; raises InvariantError on a cycle."""
    n = len(arcs)
    indegree = [0] * n
    for row in arcs:
        for _, dst, _ in row:
            if 0 <= dst < n:
                indegree[dst] += 1
    queue = deque(q for q in range(n) if indegree[q] == 0)
    order = []
    while queue:
        q = queue.popleft()
        order.append(q)
        for _, dst, _ in arcs[q]:
            if 0 <= dst < n:
                indegree[dst] -= 1
                if indegree[dst] == 0:
                    queue.append(dst)
    if len(order) != n:
        raise InvariantError(["acyclicity violated"])
    return order


def _trim(arcs: Sequence[Sequence[Arc]], finals: Set[int]):
    """Drop zero arcs and useless states; state 0 keeps id 0. None if nothing is left."""
    n = len(arcs)
    if n == 0:
        return None
    arcs = [[arc for arc in row if arc[2] != 0] for row in arcs]
    reach = [False] * n
    reach[0] = True
    stack = [0]
    while stack:
        q = stack.pop()
        for _, dst, _ in arcs[q]:
            if not reach[dst]:
                reach[dst] = True
                stack.append(dst)
    incoming: List[List[int]] = [[] for _ in range(n)]
    for q, row in enumerate(arcs):
        for _, dst, _ in row:
            incoming[dst].append(q)
    alive = [False] * n
    stack = [q for q in finals if reach[q]]
    for q in stack:
        alive[q] = True
    while stack:
        q = stack.pop()
        for p in incoming[q]:
            if reach[p] and not alive[p]:
                alive[p] = True
                stack.append(p)
    if not alive[0]:
        return None
    renumber = {}
    for q in range(n):
        if alive[q]:
            renumber[q] = len(renumber)
    new_arcs = [[(sym, renumber[dst], w) for sym, dst, w in arcs[q] if alive[dst]]
                for q in range(n) if alive[q]]
    new_finals = {renumber[q] for q in finals if alive[q]}
    return new_arcs, new_finals


def _potentials(arcs, finals, order) -> List[Weight]:
    """
    Suffix-sum potential of every state. Where mixed-sign weights make the sum
    vanish, the weight of the state's first suffix (alphabet order) is used.
    """
    n = len(arcs)
    total: List[Weight] = [0] * n
    first: List[Weight] = [0] * n
    for q in reversed(order):
        acc: Weight = 1 if q in finals else 0
        for _, dst, w in arcs[q]:
            acc = acc + w * total[dst]
        total[q] = acc
        if q in finals:
            first[q] = 1
        elif arcs[q]:
            _, dst, w = arcs[q][0]
            first[q] = w * first[dst]
    return [t if t != 0 else f for t, f in zip(total, first)]


def _push(arcs, finals, initial):
    order = _topological(arcs)
    potential = _potentials(arcs, finals, order)
    if potential[0] == 0 or initial == 0:
        return None
    new_initial = initial * potential[0]
    new_arcs = []
    for q, row in enumerate(arcs):
        if potential[q] == 0:
            new_arcs.append([])
            continue
        new_arcs.append([(sym, dst, w * potential[dst] / potential[q])
                         for sym, dst, w in row if potential[dst] != 0])
    if new_arcs[0]:
        new_arcs[0] = [(sym, dst, w * new_initial) for sym, dst, w in new_arcs[0]]
        new_initial = _unit(new_initial)
    return new_arcs, finals, new_initial


def _canonical(alphabet: str, arcs, finals, start: int, initial) -> Wfsm:
    """Renumber breadth-first from ``start`` with arcs in alphabet order."""
    rank = {ch: i for i, ch in enumerate(alphabet)}
    ids = {start: 0}
    queue = deque([start])
    new_arcs: List[List[Arc]] = []
    new_finals = set()
    while queue:
        q = queue.popleft()
        if q in finals:
            new_finals.add(ids[q])
        row = []
        for sym, dst, w in sorted(arcs[q], key=lambda arc: rank[arc[0]]):
            if dst not in ids:
                ids[dst] = len(ids)
                queue.append(dst)
            row.append((sym, ids[dst], w))
        new_arcs.append(row)
    return Wfsm._raw(alphabet, new_arcs, new_finals, initial)


def _merge(alphabet: str, arcs, finals, initial) -> Wfsm:
    """Bottom-up signature merging on (symbol, weight, target class)."""
    order = _topological(arcs)
    cls = [0] * len(arcs)
    table: Dict[tuple, int] = {}
    for q in reversed(order):
        signature = (q in finals, tuple((sym, w, cls[dst]) for sym, dst, w in arcs[q]))
        cls[q] = table.setdefault(signature, len(table))
    merged: List[Optional[List[Arc]]] = [None] * len(table)
    merged_finals = set()
    for q, row in enumerate(arcs):
        c = cls[q]
        if merged[c] is None:
            merged[c] = [(sym, cls[dst], w) for sym, dst, w in row]
        if q in finals:
            merged_finals.add(c)
    return _canonical(alphabet, merged, merged_finals, cls[0], initial)


def _finish(alphabet: str, arcs, finals, initial, minimized: bool = True) -> Wfsm:
    if initial == 0:
        return empty(alphabet)
    trimmed = _trim(arcs, set(finals))
    if trimmed is None:
        return empty(alphabet)
    arcs, finals = trimmed
    if not minimized:
        return _canonical(alphabet, arcs, finals, 0, initial)
    pushed = _push(arcs, finals, initial)
    if pushed is None:
        return empty(alphabet)
    arcs, finals, initial = pushed
    trimmed = _trim(arcs, finals)
    if trimmed is None:
        return empty(alphabet)
    return _merge(alphabet, trimmed[0], trimmed[1], initial)


def _explore(start, expand: Callable, is_final: Callable):
    """Breadth-first construction over hashable state keys."""
    ids = {start: 0}
    arcs: List[List[Arc]] = [[]]
    finals = set()
    queue = deque([start])
    while queue:
        key = queue.popleft()
        src = ids[key]
        if is_final(key):
            finals.add(src)
        for symbol, weight, target in expand(key):
            if weight == 0:
                continue
            dst = ids.get(target)
            if dst is None:
                dst = ids[target] = len(arcs)
                arcs.append([])
                queue.append(target)
            arcs[src].append((symbol, dst, weight))
    return arcs, finals


def _check_compatible(m1: Wfsm, m2: Wfsm) -> None:
    if m1.alphabet != m2.alphabet:
        raise AlphabetError(f"alphabet mismatch: {m1.alphabet!r} vs {m2.alphabet!r}")


def from_layers(alphabet: str, length: int, start, step: Callable, accept: Callable,
                minimized: bool = True) -> Wfsm:
    """
    Build a leveled machine from a level-wise transition function.

    ``step(level, key, symbol)`` returns ``None`` (no arc) or ``(next_key, weight)``;
    ``accept(key)`` decides acceptance of keys reached at level ``length``.
    """
    alphabet = validate_alphabet(alphabet)

    def expand(node):
        level, key = node
        if level == length:
            return
        for symbol in alphabet:
            nxt = step(level, key, symbol)
            if nxt is not None:
                yield symbol, nxt[1], (level + 1, nxt[0])

    arcs, finals = _explore((0, start), expand, lambda node: node[0] == length and accept(node[1]))
    return _finish(alphabet, arcs, finals, ONE, minimized)


# -- construction ----------------------------------------------------------

def empty(alphabet: str) -> Wfsm:
    """The machine with the empty language."""
    return Wfsm._raw(validate_alphabet(alphabet), [], (), ONE)


def singleton(s: str, weight: Weight, alphabet: str) -> Wfsm:
    """Machine accepting only ``s`` with the given weight."""
    alphabet = validate_alphabet(alphabet)
    for ch in s:
        if ch not in alphabet:
            raise AlphabetError(f"character {ch!r} of {s!r} is not in alphabet {alphabet!r}")
    if weight == 0:
        raise ValueError("singleton weight must be nonzero")
    if not s:
        return Wfsm._raw(alphabet, [[]], {0}, weight)
    arcs = [[(ch, i + 1, weight if i == 0 else _unit(weight))] for i, ch in enumerate(s)]
    arcs.append([])
    return Wfsm._raw(alphabet, arcs, {len(s)}, _unit(weight))


def scale(machine: Wfsm, factor: Weight) -> Wfsm:
    """Multiply every string weight by ``factor``."""
    if machine.is_empty or factor == 0:
        return empty(machine.alphabet)
    return _finish(machine.alphabet, machine._arcs, machine.finals, machine.initial_weight * factor)


# -- queries -----------------------------------------------------------------

def weight_of(machine: Wfsm, s: str) -> Weight:
    if machine.is_empty:
        return ZERO
    state, weight = 0, machine.initial_weight
    for ch in s:
        nxt = machine.step(state, ch)
        if nxt is None:
            return ZERO
        state, w = nxt
        weight = weight * w
    return weight if state in machine.finals else ZERO


def total_weight(machine: Wfsm) -> Weight:
    """Sum of all string weights, one forward pass over the DAG."""
    if machine.is_empty:
        return ZERO
    acc: List[Weight] = [0] * machine.num_states
    acc[0] = machine.initial_weight
    result: Weight = ZERO
    for q in machine.topological_order():
        if acc[q] == 0:
            continue
        if q in machine.finals:
            result = result + acc[q]
        for _, dst, w in machine.arcs(q):
            acc[dst] = acc[dst] + acc[q] * w
    return result


def count_strings(machine: Wfsm) -> int:
    """Size of the language, ignoring weights."""
    if machine.is_empty:
        return 0
    paths = [0] * machine.num_states
    paths[0] = 1
    result = 0
    for q in machine.topological_order():
        if q in machine.finals:
            result += paths[q]
        for _, dst, _ in machine.arcs(q):
            paths[dst] += paths[q]
    return result


def enumerate_strings(machine: Wfsm, limit: int) -> List[Tuple[str, Weight]]:
    """All (string, weight) pairs in alphabet-lexicographic order."""
    size = count_strings(machine)
    if size > limit:
        raise EnumerationLimitError(f"language has {size} strings, more than the limit {limit}")
    if machine.is_empty:
        return []
    out: List[Tuple[str, Weight]] = []

    def walk(state: int, prefix: str, weight: Weight) -> None:
        if state in machine.finals:
            out.append((prefix, weight))
        for sym, dst, w in machine.arcs(state):
            walk(dst, prefix + sym, weight * w)

    walk(0, "", machine.initial_weight)
    return out


def stats(machine: Wfsm) -> FsmStats:
    return FsmStats(machine.num_states, sum(len(row) for row in machine._arcs))


def weight_digits(machine: Wfsm) -> int:
    """Largest numerator+denominator digit count over the exact weights."""
    weights = [w for _, _, _, w in machine.transitions()] + [machine.initial_weight]
    return max((digit_size(w) for w in weights if isinstance(w, Fraction)), default=0)


# -- weight normalization ----------------------------------------------------

def push_weights(machine: Wfsm) -> Wfsm:
    """Redistribute weights canonically with suffix-sum potentials (no merging)."""
    if machine.is_empty:
        return machine
    trimmed = _trim(machine._arcs, set(machine.finals))
    if trimmed is None:
        return empty(machine.alphabet)
    pushed = _push(trimmed[0], trimmed[1], machine.initial_weight)
    if pushed is None:
        return empty(machine.alphabet)
    trimmed = _trim(pushed[0], pushed[1])
    if trimmed is None:
        return empty(machine.alphabet)
    return _canonical(machine.alphabet, trimmed[0], trimmed[1], 0, pushed[2])


def minimize(machine: Wfsm) -> Wfsm:
    """Push weights, then merge equivalent states level by level."""
    if machine.is_empty:
        return machine
    return _finish(machine.alphabet, machine._arcs, machine.finals, machine.initial_weight)


def support(machine: Wfsm) -> Wfsm:
    """Same language, every string weighted 1."""
    if machine.is_empty:
        return machine
    arcs = [[(sym, dst, ONE) for sym, dst, _ in row] for row in machine._arcs]
    return _finish(machine.alphabet, arcs, machine.finals, ONE)


# -- set operations -------------------------------------------------------------

def union(m1: Wfsm, m2: Wfsm) -> Wfsm:
    """Pointwise sum of string weights; strings whose weights cancel disappear."""
    _check_compatible(m1, m2)
    if m1.is_empty:
        return minimize(m2)
    if m2.is_empty:
        return minimize(m1)
    if m1.length != m2.length:
        raise LengthMismatchError(f"cannot unite strings of length {m1.length} and {m2.length}")
    f1, f2 = m1.finals, m2.finals

    # Key (p, q, r): the residual of p is 1 and the residual of q is r.
    def final_factor(key):
        p, q, r = key
        if p is None:
            return 1 if q in f2 else 0
        return (1 if p in f1 else 0) + (r if q is not None and q in f2 else 0)

    # Both operands have one string length, so a key is final exactly when it is a leaf.
    def is_leaf(key):
        p, q, _ = key
        return (p is None or not m1.arcs(p)) and (q is None or not m2.arcs(q))

    def expand(key):
        if key == _FINAL:
            return
        p, q, r = key
        for symbol in m1.alphabet:
            a = m1.step(p, symbol) if p is not None else None
            b = m2.step(q, symbol) if q is not None else None
            if a is not None and b is not None:
                weight, nxt = a[1], (a[0], b[0], r * b[1] / a[1])
            elif a is not None:
                weight, nxt = a[1], (a[0], None, ONE)
            elif b is not None:
                weight, nxt = (b[1] if p is None else r * b[1]), (None, b[0], ONE)
            else:
                continue
            if is_leaf(nxt):
                factor = final_factor(nxt)
                if factor == 0:
                    continue  # w1(s) = -w2(s)
                weight, nxt = weight * factor, _FINAL
            yield symbol, weight, nxt

    a0, b0 = m1.initial_weight, m2.initial_weight
    start = (0, 0, b0 / a0)
    if is_leaf(start):
        initial = a0 * final_factor(start)
        if initial == 0:
            return empty(m1.alphabet)
        return Wfsm._raw(m1.alphabet, [[]], {0}, initial)
    arcs, finals = _explore(start, expand, lambda key: key == _FINAL)
    return _finish(m1.alphabet, arcs, finals, a0)


def intersect(m1: Wfsm, m2: Wfsm, minimized: bool = True) -> Wfsm:
    """Pointwise product of string weights (product construction on state pairs)."""
    _check_compatible(m1, m2)
    if m1.is_empty or m2.is_empty:
        return empty(m1.alphabet)

    def expand(key):
        p, q = key
        for symbol, p2, x in m1.arcs(p):
            b = m2.step(q, symbol)
            if b is not None:
                yield symbol, x * b[1], (p2, b[0])

    arcs, finals = _explore((0, 0), expand,
                            lambda key: key[0] in m1.finals and key[1] in m2.finals)
    return _finish(m1.alphabet, arcs, finals, m1.initial_weight * m2.initial_weight, minimized)


def difference(m1: Wfsm, m2: Wfsm) -> Wfsm:
    """Weights of ``m1`` on strings outside L(m2), zero on L(m2)."""
    _check_compatible(m1, m2)
    if m1.is_empty:
        return m1
    if m2.is_empty:
        return minimize(m1)

    # m2 is completed with a dead state (None), so its complement is L(m1) minus L(m2).
    def expand(key):
        p, q = key
        for symbol, p2, x in m1.arcs(p):
            b = m2.step(q, symbol) if q is not None else None
            yield symbol, x, (p2, b[0] if b is not None else None)

    def accept(key):
        p, q = key
        return p in m1.finals and (q is None or q not in m2.finals)

    arcs, finals = _explore((0, 0), expand, accept)
    return _finish(m1.alphabet, arcs, finals, m1.initial_weight)


def union_all(machines: Sequence[Wfsm], alphabet: Optional[str] = None, order: str = "tree",
              on_merge: Optional[Callable[[Wfsm], None]] = None) -> Wfsm:
    """
    Union of many machines, minimizing after every merge.

    ``order="tree"`` merges in a balanced binary tree, ``"sequential"`` folds left
    to right. ``on_merge`` is called with every intermediate result.
    """
    machines = list(machines)
    if not machines:
        if alphabet is None:
            raise ValueError("union of no machines needs an alphabet")
        return empty(alphabet)

    def merge(a: Wfsm, b: Wfsm) -> Wfsm:
        result = union(a, b)
        if on_merge is not None:
            on_merge(result)
        return result

    if order == "sequential":
        result = machines[0]
        for machine in machines[1:]:
            result = merge(result, machine)
        return result
    if order != "tree":
        raise ValueError(f"unknown merge order {order!r}")

    def tree(lo: int, hi: int) -> Wfsm:
        if hi - lo == 1:
            return machines[lo]
        mid = (lo + hi) // 2
        return merge(tree(lo, mid), tree(mid, hi))

    return tree(0, len(machines))


# -- invariants -------------------------------------------------------------------

def check(machine: Wfsm) -> List[str]:
    """Names of the violated invariants; empty when the machine is well formed."""
    violations: List[str] = []
    n = machine.num_states
    if n == 0:
        return violations
    rank = machine._rank
    if any(not 0 <= dst < n for _, dst, _, _ in machine.transitions()) or \
            any(not 0 <= q < n for q in machine.finals):
        return ["state range violated"]
    for q in range(n):
        symbols = [sym for sym, _, _ in machine.arcs(q)]
        if len(symbols) != len(set(symbols)):
            violations.append("determinism violated")
            break
    if any(sym not in rank for _, _, sym, _ in machine.transitions()):
        violations.append("alphabet violated")
    try:
        order = _topological(machine._arcs)
    except InvariantError as exc:
        violations.extend(exc.violations)
        return violations
    trimmed = _trim(machine._arcs, set(machine.finals))
    if trimmed is None or len(trimmed[0]) != n:
        violations.append("trimmed violated")
    if any(w == 0 for *_, w in machine.transitions()):
        violations.append("nonzero weights violated")
    if not all(isinstance(w, Fraction) for *_, w in machine.transitions()) or \
            not isinstance(machine.initial_weight, Fraction) or machine.initial_weight == 0:
        violations.append("normalized weights violated")
    depth: Dict[int, int] = {0: 0}
    leveled = True
    for q in order:
        if q not in depth:
            continue
        for _, dst, _ in machine.arcs(q):
            if depth.setdefault(dst, depth[q] + 1) != depth[q] + 1:
                leveled = False
    final_depths = {depth.get(q) for q in machine.finals}
    if not leveled or len(final_depths) > 1 or any(machine.arcs(q) for q in machine.finals):
        violations.append("leveled violated")
    if machine.arcs(0) and machine.initial_weight != 1:
        violations.append("initial weight violated")
    return violations


def ensure_valid(machine: Wfsm) -> Wfsm:
    violations = check(machine)
    if violations:
        raise InvariantError(violations)
    return machine
