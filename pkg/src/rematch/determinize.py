"""Subset-construction determinization of transducers into Mealy machines.

``subset_t`` produces the exact-matching machine: it can get stuck on
input no match prefix explains.  ``subset_tc`` folds the initial closure
into every macrostate, so the result is total over the input alphabet and
reports every match ending at the current position, overlapping matches
included.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from rematch.fst import Fst, _eps_outputs, eps_closure
from rematch.regexp import BehaviourTable

#: (state, input char) -> (next state, emitted output set)
MealyTable = dict[tuple[int, str], tuple[int, frozenset[str]]]


class OutputBeforeInput(ValueError):
    """The transducer emits before reading anything; no deterministic
    machine can reproduce that."""


@dataclass(frozen=True)
class Mealy:
    """Deterministic transducer with output sets on transitions.

    ``provenance`` optionally records, per state, the transducer states
    the macrostate was built from; it is diagnostic only and never read
    by the runtime.
    """

    state_count: int
    input_alphabet: tuple[str, ...]
    output_alphabet: tuple[str, ...]
    initial: int
    table: MealyTable
    provenance: dict[int, frozenset[int]] | None = None

    def __post_init__(self):
        self._check_state(self.initial)
        inputs = set(self.input_alphabet)
        outputs = set(self.output_alphabet)
        for (src, ch), (dst, outs) in self.table.items():
            self._check_state(src)
            self._check_state(dst)
            if ch not in inputs:
                raise ValueError(f"transition input {ch!r} not in alphabet")
            if not outs <= outputs:
                raise ValueError(f"transition outputs {set(outs)!r} not in alphabet")

    def _check_state(self, s: int) -> None:
        if not 0 <= s < self.state_count:
            raise ValueError(f"state {s} out of range")

    @property
    def is_complete(self) -> bool:
        """True when every state has a transition for every input char."""
        return all((s, ch) in self.table
                   for s in range(self.state_count)
                   for ch in self.input_alphabet)

    def step(self, state: int, ch: str) -> tuple[int, frozenset[str]] | None:
        return self.table.get((state, ch))


def _determinize(m: Fst, inject_initial: bool) -> Mealy:
    start = eps_closure(m, m.initials)
    if _eps_outputs(m, start):
        raise OutputBeforeInput(
            "the transducer emits on an epsilon path from its initial states")
    ids: dict[frozenset[int], int] = {start: 0}
    queue: deque[frozenset[int]] = deque([start])
    table: MealyTable = {}
    while queue:
        subset = queue.popleft()
        sid = ids[subset]
        for ch in m.input_alphabet:
            moved = set()
            emitted = set()
            for q in subset:
                for out, dst in m.arcs_from(q, ch):
                    moved.add(dst)
                    if out is not None:
                        emitted.add(out)
            if inject_initial:
                target = eps_closure(m, moved) | start
            elif moved:
                target = eps_closure(m, moved)
            else:
                continue
            emitted |= _eps_outputs(m, target)
            tid = ids.get(target)
            if tid is None:
                tid = ids[target] = len(ids)
                queue.append(target)
            table[(sid, ch)] = (tid, frozenset(emitted))
    return Mealy(
        state_count=len(ids),
        input_alphabet=m.input_alphabet,
        output_alphabet=m.output_alphabet,
        initial=0,
        table=table,
        provenance={sid: subset for subset, sid in ids.items()},
    )


def subset_t(m: Fst) -> Mealy:
    """Determinize ``m`` into an equivalent, possibly partial Mealy machine.

    Macrostates are epsilon-closed subsets explored FIFO from the initial
    closure, so state numbers follow BFS order; a transition's output set
    joins the outputs read with the symbol and those on epsilon arcs
    inside the target closure.
    """
    return _determinize(m, inject_initial=False)


def subset_tc(m: Fst) -> Mealy:
    """Determinize ``m`` into a complete-matching Mealy machine.

    Same construction as :func:`subset_t` except the initial closure is
    folded into every macrostate, which keeps a fresh match attempt alive
    at all times: the result is total over the input alphabet and emits,
    at each position, the outputs of every match ending there.
    """
    return _determinize(m, inject_initial=True)


def machine_output(m: Mealy, max_len: int) -> BehaviourTable:
    """Walk all words up to ``max_len`` through the table; undefined
    transitions truncate the walk.  Test adapter for oracle comparisons."""
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    table: dict[str, frozenset[str]] = {}

    def walk(state: int, word: str) -> None:
        if len(word) == max_len:
            return
        for ch in m.input_alphabet:
            entry = m.table.get((state, ch))
            if entry is None:
                continue
            nxt, outs = entry
            grown = word + ch
            if outs:
                table[grown] = outs
            walk(nxt, grown)

    walk(m.initial, "")
    return table


def to_fst(m: Mealy) -> Fst:
    """View a Mealy machine as a transducer over the same state numbers.

    A transition emitting several outputs becomes parallel single-output
    arcs; determinizing the result recovers the original output sets.
    """
    arcs: dict[tuple[int, str | None], tuple[tuple[str | None, int], ...]] = {}
    for (src, ch), (dst, outs) in m.table.items():
        if outs:
            arcs[(src, ch)] = tuple((out, dst) for out in sorted(outs))
        else:
            arcs[(src, ch)] = ((None, dst),)
    return Fst(
        state_count=m.state_count,
        input_alphabet=m.input_alphabet,
        output_alphabet=m.output_alphabet,
        arcs=arcs,
        initials=frozenset([m.initial]),
    )
