"""Nondeterministic finite-state transducers and their construction from
pattern regexps.

Transitions read an input character (or nothing) and may emit one output
name.  ``thompson`` builds the standard gadget-per-node machine; atoms
carrying an annotation become single transitions that read the character
and emit the name.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from rematch.regexp import (
    Atom,
    BehaviourTable,
    Concat,
    Epsilon,
    Expr,
    Star,
    Union,
    UWord,
    input_alphabet,
    output_alphabet,
)

#: (source, input char or None) -> ((output name or None, target), ...)
ArcIndex = dict[tuple[int, "str | None"], tuple[tuple["str | None", int], ...]]


@dataclass(frozen=True)
class Fst:
    """A transducer: states 0..state_count-1, arcs indexed by (source, input)."""

    state_count: int
    input_alphabet: tuple[str, ...]
    output_alphabet: tuple[str, ...]
    arcs: ArcIndex
    initials: frozenset[int]
    finals: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.initials:
            raise ValueError("transducer needs at least one initial state")
        for s in self.initials | self.finals:
            self._check_state(s)
        inputs = set(self.input_alphabet)
        outputs = set(self.output_alphabet)
        for (src, ch), pairs in self.arcs.items():
            self._check_state(src)
            if ch is not None and ch not in inputs:
                raise ValueError(f"arc input {ch!r} not in alphabet")
            for out, dst in pairs:
                self._check_state(dst)
                if out is not None and out not in outputs:
                    raise ValueError(f"arc output {out!r} not in alphabet")

    def _check_state(self, s: int) -> None:
        if not 0 <= s < self.state_count:
            raise ValueError(f"state {s} out of range")

    def arcs_from(self, src: int, ch: str | None) -> tuple[tuple[str | None, int], ...]:
        return self.arcs.get((src, ch), ())

    def transition_count(self) -> int:
        return sum(len(pairs) for pairs in self.arcs.values())


def thompson(e: Expr) -> Fst:
    """Build an Fst for ``e`` with one initial and one final state.

    Gadget per node, glued with unannotated epsilon arcs; only atom arcs
    read input or emit output.  Every gadget's exit state has no outgoing
    arcs, which licenses two size reductions: a concatenation whose right
    half is the star of its left half (the shape one-or-more desugars to)
    is built as a single loop gadget instead of duplicating the body, and
    glue states whose only arc is an epsilon into the machine's final
    state are folded into it.
    """
    transitions: list[tuple[int, str | None, str | None, int]] = []
    count = 0

    def fresh() -> int:
        nonlocal count
        count += 1
        return count - 1

    def link(src: int, ch: str | None, out: str | None, dst: int) -> None:
        transitions.append((src, ch, out, dst))

    def build(node: Expr) -> tuple[int, int]:
        if isinstance(node, Epsilon):
            s, f = fresh(), fresh()
            link(s, None, None, f)
            return s, f
        if isinstance(node, Atom):
            s, f = fresh(), fresh()
            link(s, node.char, node.out, f)
            return s, f
        if isinstance(node, Concat):
            if isinstance(node.right, Star) and node.right.body == node.left:
                # e e* == one or more e: one body copy with a loop back
                bs, bf = build(node.left)
                f = fresh()
                link(bf, None, None, bs)
                link(bf, None, None, f)
                return bs, f
            ls, lf = build(node.left)
            rs, rf = build(node.right)
            link(lf, None, None, rs)
            return ls, rf
        if isinstance(node, Union):
            s = fresh()
            ls, lf = build(node.left)
            rs, rf = build(node.right)
            f = fresh()
            link(s, None, None, ls)
            link(s, None, None, rs)
            link(lf, None, None, f)
            link(rf, None, None, f)
            return s, f
        if isinstance(node, Star):
            s = fresh()
            bs, bf = build(node.body)
            f = fresh()
            link(s, None, None, bs)
            link(s, None, None, f)
            link(bf, None, None, bs)
            link(bf, None, None, f)
            return s, f
        raise TypeError(f"not an Expr node: {node!r}")

    start, final = build(e)
    transitions, count, start, final = _fold_final_tails(
        transitions, count, start, final)
    transitions = _strip_dead_annotations(transitions, final)
    arcs: dict[tuple[int, str | None], list[tuple[str | None, int]]] = {}
    for src, ch, out, dst in transitions:
        arcs.setdefault((src, ch), []).append((out, dst))
    return Fst(
        state_count=count,
        input_alphabet=input_alphabet(e),
        output_alphabet=output_alphabet(e),
        arcs={key: tuple(pairs) for key, pairs in arcs.items()},
        initials=frozenset([start]),
        finals=frozenset([final]),
    )


def _strip_dead_annotations(
    transitions: list[tuple[int, str | None, str | None, int]],
    final: int,
) -> list[tuple[int, str | None, str | None, int]]:
    """Silence annotations that can never end a word of the language.

    A pattern emits only when a match is complete, so an annotated arc
    matters only if its target can still reach the final state without
    reading further input.  Dropping the rest makes the machine's
    behaviour agree with the expression's everywhere, not just on
    patterns annotated at match end.
    """
    into: dict[int, set[int]] = {}
    for src, ch, _, dst in transitions:
        if ch is None:
            into.setdefault(dst, set()).add(src)
    can_finish = {final}
    stack = [final]
    while stack:
        s = stack.pop()
        for p in into.get(s, ()):
            if p not in can_finish:
                can_finish.add(p)
                stack.append(p)
    kept = {
        (src, ch, out if dst in can_finish else None, dst)
        for src, ch, out, dst in transitions
    }
    return sorted(kept, key=lambda t: (t[0], t[1] or "", t[2] or "", t[3]))


def _fold_final_tails(
    transitions: list[tuple[int, str | None, str | None, int]],
    count: int, start: int, final: int,
) -> tuple[list[tuple[int, str | None, str | None, int]], int, int, int]:
    """Merge into ``final`` every non-initial state whose single arc is a
    silent epsilon into it; the final state has no outgoing arcs, so the
    merged states were indistinguishable from it."""
    alias: dict[int, int] = {}
    while True:
        outgoing: dict[int, list[tuple[str | None, str | None, int]]] = {}
        for src, ch, out, dst in transitions:
            s = alias.get(src, src)
            if s != final:
                outgoing.setdefault(s, []).append(
                    (ch, out, alias.get(dst, dst)))
        folded = False
        for s, arcs in outgoing.items():
            if s != start and arcs == [(None, None, final)]:
                alias[s] = final
                folded = True
        if not folded:
            break
    kept = sorted(
        {alias.get(s, s) for s in range(count) if alias.get(s, s) == s})
    renumber = {old: new for new, old in enumerate(kept)}

    def squash(s: int) -> int:
        return renumber[alias.get(s, s)]

    rebuilt = sorted({
        (squash(src), ch, out, squash(dst))
        for src, ch, out, dst in transitions
        if alias.get(src, src) != final
    }, key=lambda t: (t[0], t[1] or "", t[2] or "", t[3]))
    return rebuilt, len(kept), squash(start), squash(final)


def eps_closure(m: Fst, states: frozenset[int] | set[int]) -> frozenset[int]:
    """States reachable from ``states`` by epsilon arcs, seeds included."""
    seen = set(states)
    stack = list(states)
    while stack:
        s = stack.pop()
        for _, dst in m.arcs_from(s, None):
            if dst not in seen:
                seen.add(dst)
                stack.append(dst)
    return frozenset(seen)


def _eps_outputs(m: Fst, states: frozenset[int]) -> set[str]:
    """Outputs on epsilon arcs inside an epsilon-closed state set."""
    found = set()
    for s in states:
        for out, _ in m.arcs_from(s, None):
            if out is not None:
                found.add(out)
    return found


def state_behaviour(m: Fst, p: int, max_len: int) -> BehaviourTable:
    """Word -> outputs emitted when reading the word from state ``p``.

    Outputs count if emitted on the arc reading the last symbol or on an
    epsilon arc reachable right after it; the empty-word entry holds
    outputs of epsilon arcs inside the closure of ``p`` itself.  Explores
    all paths up to ``max_len`` input symbols; only non-empty sets are kept.
    """
    m._check_state(p)
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    memo: dict[tuple[int, int], dict[str, set[str]]] = {}
    return {w: frozenset(s) for w, s in _explore(m, p, max_len, memo).items()}


def _explore(m: Fst, p: int, budget: int,
             memo: dict[tuple[int, int], dict[str, set[str]]]) -> dict[str, set[str]]:
    key = (p, budget)
    hit = memo.get(key)
    if hit is not None:
        return hit
    table: dict[str, set[str]] = {}
    closure = eps_closure(m, frozenset([p]))
    immediate = _eps_outputs(m, closure)
    if immediate:
        table[""] = immediate
    if budget >= 1:
        for q in closure:
            for ch in m.input_alphabet:
                for out, r in m.arcs_from(q, ch):
                    sub = _explore(m, r, budget - 1, memo)
                    first = set(sub.get("", ()))
                    if out is not None:
                        first.add(out)
                    if first:
                        table.setdefault(ch, set()).update(first)
                    for v, outs in sub.items():
                        if v:
                            table.setdefault(ch + v, set()).update(outs)
    memo[key] = table
    return table


def fst_output(m: Fst, max_len: int) -> BehaviourTable:
    """The machine's behaviour: pointwise union over its initial states."""
    merged: dict[str, set[str]] = {}
    for i in sorted(m.initials):
        for w, outs in state_behaviour(m, i, max_len).items():
            merged.setdefault(w, set()).update(outs)
    return {w: frozenset(s) for w, s in merged.items()}


def u_language(m: Fst, max_len: int) -> set[UWord]:
    """Accepted words as (char, output) pairs, up to ``max_len`` symbols.

    Only valid for machines whose epsilon arcs emit nothing (such as
    ``thompson`` output); an emitting epsilon arc has no place in a word
    of symbol pairs.
    """
    for (_, ch), pairs in m.arcs.items():
        if ch is None and any(out is not None for out, _ in pairs):
            raise ValueError("machine emits output on an epsilon arc")
    words: set[UWord] = set()
    start = eps_closure(m, m.initials)
    stack: list[tuple[frozenset[int], UWord]] = [(start, ())]
    seen: set[tuple[frozenset[int], UWord]] = {(start, ())}
    while stack:
        states, word = stack.pop()
        if states & m.finals:
            words.add(word)
        if len(word) == max_len:
            continue
        for ch in m.input_alphabet:
            for q in states:
                for out, r in m.arcs_from(q, ch):
                    nxt = (eps_closure(m, frozenset([r])), word + ((ch, out),))
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
    return words
