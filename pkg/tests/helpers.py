"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from collections import deque

from rematch.determinize import Mealy
from rematch.minimize import DfaView
from rematch.regexp import Atom, Concat, Epsilon, Expr, Star, Union

E1 = "a(b|c)+d<A>"
E2 = "d((a*b+|b*)c)+d<B>"
E3 = f"{E1}|{E2}"
TRACE = "abdbcabcbcdcd"


def reference_exact_machine() -> Mealy:
    """The 8-state partial machine matching exact instances of the
    two-pattern example, in a fixed reference numbering."""
    table = {}

    def arc(src, ch, dst, out=None):
        table[(src, ch)] = (dst, frozenset([out]) if out else frozenset())

    arc(0, "a", 1)
    arc(0, "d", 3)
    arc(1, "b", 2)
    arc(1, "c", 2)
    arc(2, "b", 2)
    arc(2, "c", 2)
    arc(2, "d", 7, "A")
    arc(3, "a", 6)
    arc(3, "b", 5)
    arc(3, "c", 4)
    arc(4, "a", 6)
    arc(4, "b", 5)
    arc(4, "c", 4)
    arc(4, "d", 7, "B")
    arc(5, "b", 5)
    arc(5, "c", 4)
    arc(6, "a", 6)
    arc(6, "b", 5)
    return Mealy(8, tuple("abcd"), ("A", "B"), 0, table)


def random_expr(rng: random.Random, max_nodes: int = 8,
                sigma: str = "abc", gamma: str = "AB") -> Expr:
    """Random pattern AST with at most ``max_nodes`` nodes and at least
    one input atom."""
    while True:
        budget = rng.randint(max(1, max_nodes // 2), max_nodes)
        e = _grow(rng, budget, sigma, gamma)
        if _has_atom(e):
            assert _size(e) <= max_nodes
            return e


def _grow(rng: random.Random, budget: int, sigma: str, gamma: str) -> Expr:
    if budget <= 1 or (budget == 2 and rng.random() < 0.3):
        if rng.random() < 0.1:
            return Epsilon()
        out = rng.choice(gamma) if gamma and rng.random() < 0.4 else None
        return Atom(rng.choice(sigma), out)
    if budget == 2 or rng.random() < 0.25:
        return Star(_grow(rng, budget - 1, sigma, gamma))
    left_budget = rng.randint(1, budget - 2)
    left = _grow(rng, left_budget, sigma, gamma)
    right = _grow(rng, budget - 1 - left_budget, sigma, gamma)
    return Concat(left, right) if rng.random() < 0.55 else Union(left, right)


def _size(e: Expr) -> int:
    if isinstance(e, (Epsilon, Atom)):
        return 1
    if isinstance(e, (Concat, Union)):
        return 1 + _size(e.left) + _size(e.right)
    return 1 + _size(e.body)


def _has_atom(e: Expr) -> bool:
    if isinstance(e, Atom):
        return True
    if isinstance(e, (Concat, Union)):
        return _has_atom(e.left) or _has_atom(e.right)
    if isinstance(e, Star):
        return _has_atom(e.body)
    return False


def random_word(rng: random.Random, sigma: tuple[str, ...],
                max_len: int) -> str:
    return "".join(rng.choice(sigma) for _ in range(rng.randint(0, max_len)))


def random_dfa_view(rng: random.Random, max_states: int = 30,
                    max_labels: int = 4) -> DfaView:
    """Random complete DFA over synthetic labels, fully materialized."""
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_labels)
    labels = tuple((ch, frozenset()) for ch in "abcd"[:k])
    transitions = {(s, u): rng.randrange(n)
                   for s in range(n) for u in labels}
    finals = frozenset(s for s in range(n) if rng.random() < 0.4)
    return DfaView(n, labels, transitions, 0, finals)


def moore_partition(a: DfaView) -> set[frozenset[int]]:
    """Repeated signature splitting, the quadratic cross-check for the
    Hopcroft refinement."""
    cls = {s: int(s in a.finals) for s in range(a.state_count)}
    while True:
        signatures = {
            s: (cls[s],) + tuple(cls[a.step(s, u)] for u in a.labels)
            for s in range(a.state_count)
        }
        renumber: dict[tuple, int] = {}
        fresh = {}
        for s in range(a.state_count):
            fresh[s] = renumber.setdefault(signatures[s], len(renumber))
        if fresh == cls:
            break
        cls = fresh
    groups: dict[int, set[int]] = {}
    for s, c in cls.items():
        groups.setdefault(c, set()).add(s)
    return {frozenset(g) for g in groups.values()}


def dfa_language_equal(a: DfaView, b: DfaView) -> bool:
    """Product walk over two total DFA views sharing a label set."""
    assert set(a.labels) == set(b.labels)
    seen = {(a.initial, b.initial)}
    queue = deque(seen)
    while queue:
        p, q = queue.popleft()
        if (p in a.finals) != (q in b.finals):
            return False
        for u in a.labels:
            nxt = (a.step(p, u), b.step(q, u))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return True


def residuals_distinct(a: DfaView) -> bool:
    """No two states of ``a`` accept the same word set."""
    for p in range(a.state_count):
        for q in range(p + 1, a.state_count):
            seen = {(p, q)}
            queue = deque(seen)
            equal = True
            while queue and equal:
                x, y = queue.popleft()
                if (x in a.finals) != (y in a.finals):
                    equal = False
                    break
                for u in a.labels:
                    nxt = (a.step(x, u), a.step(y, u))
                    if nxt[0] != nxt[1] and nxt not in seen:
                        seen.add(nxt)
                        queue.append(nxt)
            if equal:
                return False
    return True


def all_pairs_distinguishable(m: Mealy) -> bool:
    """Every pair of states observably differs within state_count - 1
    steps, where one observation is (transition defined?, outputs).

    Round k of the refinement separates exactly the pairs some word of
    length <= k distinguishes, so reaching all-singletons inside
    state_count - 1 rounds is the distinguishing-word bound.
    """
    cls = {s: 0 for s in range(m.state_count)}
    for _ in range(max(m.state_count - 1, 1)):
        signatures = {}
        for s in range(m.state_count):
            row = []
            for ch in m.input_alphabet:
                entry = m.table.get((s, ch))
                row.append(None if entry is None
                           else (cls[entry[0]], tuple(sorted(entry[1]))))
            signatures[s] = (cls[s], tuple(row))
        renumber: dict[tuple, int] = {}
        fresh = {}
        for s in range(m.state_count):
            fresh[s] = renumber.setdefault(signatures[s], len(renumber))
        if len(renumber) == m.state_count:
            return True
        if fresh == cls:
            return False
        cls = fresh
    return len(set(cls.values())) == m.state_count


def duplicate_state(m: Mealy, rng: random.Random) -> Mealy:
    """Copy one state and steal roughly half of its incoming transitions,
    preserving behaviour while breaking minimality."""
    victim = rng.randrange(m.state_count)
    clone = m.state_count
    table = dict(m.table)
    for ch in m.input_alphabet:
        entry = m.table.get((victim, ch))
        if entry is not None:
            table[(clone, ch)] = entry
    for key, (dst, outs) in m.table.items():
        if dst == victim and rng.random() < 0.5:
            table[key] = (clone, outs)
    return Mealy(
        state_count=m.state_count + 1,
        input_alphabet=m.input_alphabet,
        output_alphabet=m.output_alphabet,
        initial=m.initial,
        table=table,
    )
