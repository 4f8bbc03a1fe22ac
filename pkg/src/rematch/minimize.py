"""Reduce a Mealy machine to the unique minimal complete equivalent.

The pipeline completes the machine with an absorbing no-output state,
reads it as a DFA over (input char, output set) labels with every state
accepting, completes that DFA with a non-accepting junk state, refines
with Hopcroft's partition algorithm, removes the junk block, and
translates back.  ``trim_sink`` separately strips the absorbing state
for display of the partial machine.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from rematch.determinize import Mealy, MealyTable

#: DFA-view alphabet symbol: an input char paired with an output set.
Label = tuple[str, frozenset[str]]


@dataclass(frozen=True)
class DfaView:
    """DFA reading of a Mealy machine; all original states accept.

    ``transitions`` may be sparse: a missing entry means the move goes to
    ``sink`` when one is set, so the view stays linear in the machine
    size instead of carrying the full state x label table.
    """

    state_count: int
    labels: tuple[Label, ...]
    transitions: dict[tuple[int, Label], int]
    initial: int
    finals: frozenset[int]
    sink: int | None = None

    def step(self, state: int, label: Label) -> int | None:
        target = self.transitions.get((state, label))
        return self.sink if target is None else target


def complete_with_sink(m: Mealy) -> Mealy:
    """Total the transition table by adding an absorbing no-output state;
    already-complete machines come back unchanged."""
    missing = [(s, ch)
               for s in range(m.state_count)
               for ch in m.input_alphabet
               if (s, ch) not in m.table]
    if not missing:
        return m
    sink = m.state_count
    table = dict(m.table)
    for s, ch in missing:
        table[(s, ch)] = (sink, frozenset())
    for ch in m.input_alphabet:
        table[(sink, ch)] = (sink, frozenset())
    return Mealy(
        state_count=m.state_count + 1,
        input_alphabet=m.input_alphabet,
        output_alphabet=m.output_alphabet,
        initial=m.initial,
        table=table,
        provenance=m.provenance,
    )


def to_dfa_view(m: Mealy) -> DfaView:
    """Join the target and output halves of each transition into one
    labelled DFA edge; every state becomes accepting.

    The label alphabet is the full product of the input alphabet with the
    output sets occurring in the machine plus the empty set, while the
    edge table stays exactly as sparse as the machine's.
    """
    emitted = sorted({outs for (_, _), (_, outs) in m.table.items() if outs},
                     key=lambda s: tuple(sorted(s)))
    out_sets: list[frozenset[str]] = [frozenset()] + emitted
    labels = sorted(((ch, outs) for ch in m.input_alphabet
                     for outs in out_sets), key=_label_key)
    transitions = {
        (src, (ch, outs)): dst
        for (src, ch), (dst, outs) in m.table.items()
    }
    return DfaView(
        state_count=m.state_count,
        labels=tuple(labels),
        transitions=transitions,
        initial=m.initial,
        finals=frozenset(range(m.state_count)),
    )


def _label_key(label: Label) -> tuple[str, tuple[str, ...]]:
    ch, outs = label
    return ch, tuple(sorted(outs))


def complete_dfa_view(a: DfaView) -> DfaView:
    """Route every missing (state, label) move to a fresh non-accepting
    junk state; a view that is already total comes back unchanged."""
    if a.sink is not None:
        return a
    if len(a.transitions) == a.state_count * len(a.labels):
        return a
    return DfaView(
        state_count=a.state_count + 1,
        labels=a.labels,
        transitions=a.transitions,
        initial=a.initial,
        finals=a.finals,
        sink=a.state_count,
    )


def _check_total(a: DfaView) -> None:
    if a.sink is None:
        for s in range(a.state_count):
            for u in a.labels:
                if (s, u) not in a.transitions:
                    raise ValueError(f"view not complete: state {s} has no "
                                     f"move on {u!r}")


def _refine(a: DfaView, states: set[int]) -> list[frozenset[int]]:
    """Hopcroft partition refinement over ``states``.

    Splits are driven by predecessor sets of worklist blocks; when a block
    not on the worklist splits, only the smaller half is queued (ties go
    to the lower block index).
    """
    finals = {s for s in states if s in a.finals}
    nonfinals = states - finals
    blocks: list[set[int]] = [b for b in (finals, nonfinals) if b]
    if not blocks:
        return []
    block_of = {s: i for i, b in enumerate(blocks) for s in b}

    pre: dict[Label, dict[int, set[int]]] = {u: {} for u in a.labels}
    for s in states:
        for u in a.labels:
            t = a.step(s, u)
            pre[u].setdefault(t, set()).add(s)

    work: deque[int] = deque()
    queued: set[int] = set()
    if len(blocks) == 2:
        seed = 0 if len(blocks[0]) <= len(blocks[1]) else 1
    else:
        seed = 0
    work.append(seed)
    queued.add(seed)

    while work:
        a_id = work.popleft()
        queued.discard(a_id)
        splitter = frozenset(blocks[a_id])
        for u in a.labels:
            hits_all: set[int] = set()
            targets = pre[u]
            for t in splitter:
                hits_all |= targets.get(t, set())
            if not hits_all:
                continue
            affected: dict[int, set[int]] = {}
            for s in hits_all:
                affected.setdefault(block_of[s], set()).add(s)
            for y_id in sorted(affected):
                hits = affected[y_id]
                block = blocks[y_id]
                if len(hits) == len(block):
                    continue
                rest = block - hits
                blocks[y_id] = hits
                new_id = len(blocks)
                blocks.append(rest)
                for s in rest:
                    block_of[s] = new_id
                if y_id in queued:
                    work.append(new_id)
                    queued.add(new_id)
                elif len(hits) <= len(rest):
                    work.append(y_id)
                    queued.add(y_id)
                else:
                    work.append(new_id)
                    queued.add(new_id)
    return sorted((frozenset(b) for b in blocks), key=min)


def hopcroft_partition(a: DfaView) -> list[frozenset[int]]:
    """Equivalence classes of all states by the words they can accept."""
    _check_total(a)
    return _refine(a, set(range(a.state_count)))


def _reachable(a: DfaView) -> set[int]:
    seen = {a.initial}
    stack = [a.initial]
    while stack:
        s = stack.pop()
        for u in a.labels:
            t = a.step(s, u)
            if t is not None and t not in seen:
                seen.add(t)
                stack.append(t)
    return seen


def _minimize(a: DfaView) -> tuple[DfaView, list[frozenset[int]]]:
    _check_total(a)
    partition = _refine(a, _reachable(a))
    block_of = {s: i for i, b in enumerate(partition) for s in b}

    order: dict[int, int] = {block_of[a.initial]: 0}
    queue = deque([block_of[a.initial]])
    while queue:
        b = queue.popleft()
        rep = min(partition[b])
        for u in a.labels:
            t = block_of[a.step(rep, u)]
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    # complete machine: every block reachable from the initial block
    assert len(order) == len(partition)

    transitions = {}
    for b, new_id in order.items():
        rep = min(partition[b])
        for u in a.labels:
            transitions[(new_id, u)] = order[block_of[a.step(rep, u)]]
    finals = frozenset(order[i] for i, block in enumerate(partition)
                       if block <= a.finals)
    quotient = DfaView(
        state_count=len(partition),
        labels=a.labels,
        transitions=transitions,
        initial=0,
        finals=finals,
    )
    ordered_blocks = [partition[b] for b, _ in
                      sorted(order.items(), key=lambda kv: kv[1])]
    return quotient, ordered_blocks


def minimize_dfa(a: DfaView) -> DfaView:
    """The unique minimal complete DFA for the language of ``a``.

    Requires a total view (materialized or via ``sink``); states are
    renumbered in BFS order from the initial state over sorted labels.
    """
    return _minimize(a)[0]


def min_comp(m: Mealy) -> Mealy:
    """The unique smallest Mealy machine observationally equal to ``m``:
    same emissions and same stuck points on every input.

    Minimizes the all-accepting DFA view over (char, output set) labels,
    after totalling it with a non-accepting junk state; the junk block
    and its incoming edges are dropped again on the way back, so the
    result is exactly as complete as the input.  A complete machine
    minimizes to the unique minimal complete machine for its behaviour;
    apply :func:`complete_with_sink` first (or after) to force
    completeness of a partial one.
    """
    quotient, blocks = _minimize(complete_dfa_view(to_dfa_view(m)))
    dead = {q for q in range(quotient.state_count) if q not in quotient.finals}
    keep = [q for q in range(quotient.state_count) if q not in dead]
    remap = {old: i for i, old in enumerate(keep)}
    table: MealyTable = {}
    seen_keys: set[tuple[int, str]] = set()
    for (p, (ch, outs)), q in quotient.transitions.items():
        if p in dead or q in dead:
            continue
        assert (remap[p], ch) not in seen_keys, "determinism lost in quotient"
        seen_keys.add((remap[p], ch))
        table[(remap[p], ch)] = (remap[q], outs)
    provenance = None
    if m.provenance is not None:
        provenance = {}
        for old in keep:
            merged: set[int] = set()
            for s in blocks[old]:
                merged |= m.provenance.get(s, frozenset())
            if merged:
                provenance[remap[old]] = frozenset(merged)
    return Mealy(
        state_count=len(keep),
        input_alphabet=m.input_alphabet,
        output_alphabet=m.output_alphabet,
        initial=remap[quotient.initial],
        table=table,
        provenance=provenance,
    )


def trim_sink(m: Mealy) -> Mealy:
    """Drop sink states, with their incoming transitions, leaving a
    partial machine that emits exactly the same events.

    A state is removed when no output is reachable from it and every
    transition into it is output-free (dropping those transitions only
    cuts silent runs short), and it is not the initial state.  Returns
    ``m`` itself (same object) when there is nothing to remove; callers
    can treat identity as the "no sink" flag.
    """
    backward: dict[int, set[int]] = {}
    incoming_emits: set[int] = set()
    live: set[int] = set()
    for (src, _), (dst, outs) in m.table.items():
        backward.setdefault(dst, set()).add(src)
        if outs:
            live.add(src)
            incoming_emits.add(dst)
    stack = list(live)
    while stack:
        s = stack.pop()
        for p in backward.get(s, ()):
            if p not in live:
                live.add(p)
                stack.append(p)
    removable = (set(range(m.state_count)) - live - incoming_emits
                 - {m.initial})
    if not removable:
        return m
    keep = [s for s in range(m.state_count) if s not in removable]
    remap = {old: i for i, old in enumerate(keep)}
    table = {
        (remap[src], ch): (remap[dst], outs)
        for (src, ch), (dst, outs) in m.table.items()
        if src not in removable and dst not in removable
    }
    provenance = None
    if m.provenance is not None:
        provenance = {remap[s]: subset
                      for s, subset in m.provenance.items()
                      if s not in removable}
    return Mealy(
        state_count=len(keep),
        input_alphabet=m.input_alphabet,
        output_alphabet=m.output_alphabet,
        initial=remap[m.initial],
        table=table,
        provenance=provenance,
    )


def is_isomorphic(a: Mealy, b: Mealy) -> bool:
    """True when a state bijection maps initial to initial and carries
    the whole (input, output set, target) table across.

    Both machines must be reachable from their initial states, which
    holds for everything this package constructs.
    """
    if a.state_count != b.state_count:
        return False
    if a.input_alphabet != b.input_alphabet:
        return False
    fwd = {a.initial: b.initial}
    back = {b.initial: a.initial}
    queue = deque([a.initial])
    while queue:
        p = queue.popleft()
        q = fwd[p]
        for ch in a.input_alphabet:
            ea = a.table.get((p, ch))
            eb = b.table.get((q, ch))
            if (ea is None) != (eb is None):
                return False
            if ea is None:
                continue
            (pa, outa), (pb, outb) = ea, eb
            if outa != outb:
                return False
            if pa in fwd:
                if fwd[pa] != pb:
                    return False
            elif pb in back:
                return False
            else:
                fwd[pa] = pb
                back[pb] = pa
                queue.append(pa)
    return len(fwd) == a.state_count
