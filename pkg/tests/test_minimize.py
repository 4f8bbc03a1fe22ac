"""Completion, DFA-view translation, Hopcroft refinement, minComp."""

import random

import pytest

from rematch.determinize import Mealy, machine_output, subset_t, subset_tc
from rematch.fst import thompson
from rematch.minimize import (
    DfaView,
    complete_dfa_view,
    complete_with_sink,
    hopcroft_partition,
    is_isomorphic,
    min_comp,
    minimize_dfa,
    to_dfa_view,
    trim_sink,
)
from rematch.regexp import parse

from helpers import (
    E3,
    all_pairs_distinguishable,
    dfa_language_equal,
    duplicate_state,
    reference_exact_machine,
    moore_partition,
    random_dfa_view,
    random_expr,
    residuals_distinct,
)


def mealy(states, sigma, gamma, table):
    frozen = {(s, ch): (d, frozenset(outs)) for (s, ch), (d, outs) in
              table.items()}
    return Mealy(states, tuple(sigma), tuple(gamma), 0, frozen)


def three_cycle():
    """One input symbol, identical silent transitions around a cycle."""
    return mealy(3, "a", "", {
        (0, "a"): (1, ()), (1, "a"): (2, ()), (2, "a"): (0, ())})


# ---------------------------------------------------------------- completion

def test_complete_machine_passes_through_unchanged():
    m = three_cycle()
    assert complete_with_sink(m) is m


def test_completion_adds_an_absorbing_silent_state():
    m = mealy(2, "a", "A", {(0, "a"): (1, ("A",))})
    done = complete_with_sink(m)
    assert done.state_count == 3
    assert done.table[(1, "a")] == (2, frozenset())
    assert done.table[(2, "a")] == (2, frozenset())
    assert done.is_complete


def test_completion_of_the_exact_example_machine_adds_one_state():
    assert complete_with_sink(subset_t(thompson(parse(E3)))).state_count == 11


# ------------------------------------------------------------------ DFA view

def test_view_of_one_state_loop():
    m = mealy(1, "a", "", {(0, "a"): (0, ())})
    view = to_dfa_view(m)
    assert view.finals == frozenset({0})
    assert view.labels == (("a", frozenset()),)
    assert view.transitions == {(0, ("a", frozenset())): 0}


def test_view_label_alphabet_is_the_full_product():
    view = to_dfa_view(reference_exact_machine())
    assert len(view.finals) == 8
    # four input chars times (two occurring output sets + the empty one)
    assert len(view.labels) == 4 * 3


def test_view_preserves_state_and_transition_counts():
    m = subset_t(thompson(parse(E3)))
    view = to_dfa_view(m)
    assert view.state_count == m.state_count
    assert len(view.transitions) == len(m.table)


def test_view_completion_routes_missing_moves_to_a_junk_state():
    view = to_dfa_view(reference_exact_machine())
    total = complete_dfa_view(view)
    assert total.sink == view.state_count
    assert total.state_count == view.state_count + 1
    assert total.step(7, ("a", frozenset())) == total.sink


def test_view_completion_of_a_total_view_is_identity():
    view = to_dfa_view(mealy(1, "a", "", {(0, "a"): (0, ())}))
    assert complete_dfa_view(view) is view


# ------------------------------------------------------------- DFA minimization

def test_minimize_dfa_fixpoint_on_a_minimal_machine():
    labels = (("a", frozenset()), ("b", frozenset()))
    view = DfaView(2, labels, {
        (0, labels[0]): 1, (0, labels[1]): 0,
        (1, labels[0]): 1, (1, labels[1]): 0,
    }, 0, frozenset({1}))
    again = minimize_dfa(view)
    assert again.state_count == 2
    assert again.transitions == view.transitions
    assert again.finals == view.finals


def test_minimize_dfa_merges_the_single_label_cycle():
    label = ("a", frozenset())
    view = DfaView(3, (label,), {
        (0, label): 1, (1, label): 2, (2, label): 0}, 0,
        frozenset({0, 1, 2}))
    assert minimize_dfa(view).state_count == 1


def test_minimize_dfa_requires_a_total_view():
    label = ("a", frozenset())
    view = DfaView(2, (label,), {(0, label): 1}, 0, frozenset({1}))
    with pytest.raises(ValueError):
        minimize_dfa(view)


def test_minimize_dfa_random_machines_stay_language_equal():
    rng = random.Random(41)
    for _ in range(60):
        view = random_dfa_view(rng)
        small = minimize_dfa(view)
        assert small.state_count <= view.state_count
        assert dfa_language_equal(view, small)
        assert residuals_distinct(small)


def test_hopcroft_matches_the_moore_style_refinement():
    rng = random.Random(42)
    for _ in range(60):
        view = random_dfa_view(rng)
        assert set(hopcroft_partition(view)) == moore_partition(view)


# -------------------------------------------------------------------- minComp

def test_min_comp_of_the_exact_example_is_the_eight_state_machine():
    minimal = min_comp(subset_t(thompson(parse(E3))))
    assert minimal.state_count == 8
    assert not minimal.is_complete
    assert is_isomorphic(minimal, reference_exact_machine())


def test_completing_the_minimal_exact_machine_adds_the_sink_back():
    minimal = min_comp(subset_t(thompson(parse(E3))))
    nine = complete_with_sink(minimal)
    assert nine.state_count == 9
    assert nine.is_complete
    assert is_isomorphic(trim_sink(nine), minimal)


def test_min_comp_preserves_completeness():
    minimal = min_comp(subset_tc(thompson(parse(E3))))
    assert minimal.state_count == 9
    assert minimal.is_complete


def test_min_comp_merges_the_indistinguishable_cycle():
    assert min_comp(three_cycle()).state_count == 1


def test_min_comp_is_idempotent():
    rng = random.Random(43)
    for _ in range(25):
        m = min_comp(subset_t(thompson(random_expr(rng))))
        assert is_isomorphic(min_comp(m), m)


def test_min_comp_results_are_unique_up_to_isomorphism():
    rng = random.Random(44)
    for _ in range(25):
        m = min_comp(subset_tc(thompson(random_expr(rng))))
        bloated = duplicate_state(m, rng)
        assert is_isomorphic(min_comp(bloated), m)


def test_min_comp_preserves_observable_output():
    rng = random.Random(45)
    for _ in range(25):
        machine = subset_t(thompson(random_expr(rng)))
        completed = complete_with_sink(machine)
        minimal = min_comp(completed)
        assert machine_output(minimal, 5) == machine_output(completed, 5)


def test_min_comp_leaves_no_equivalent_state_pair():
    rng = random.Random(46)
    for _ in range(25):
        m = min_comp(subset_tc(thompson(random_expr(rng))))
        assert all_pairs_distinguishable(m)


def test_min_comp_never_drops_a_live_state():
    # the junk block removed on the way back has no real transitions, so
    # every surviving state keeps a full row of its original moves
    rng = random.Random(47)
    for _ in range(20):
        machine = subset_tc(thompson(random_expr(rng)))
        assert min_comp(machine).is_complete


# ------------------------------------------------------------------ trim_sink

def test_trim_removes_only_silently_entered_dead_states():
    minimal = min_comp(subset_t(thompson(parse(E3))))
    # the dead state receives the emitting transitions: untouchable
    assert trim_sink(minimal) is minimal
    nine = complete_with_sink(minimal)
    assert trim_sink(nine).state_count == 8


def test_trim_flags_machines_where_every_state_can_emit():
    nine = min_comp(subset_tc(thompson(parse(E3))))
    assert trim_sink(nine) is nine
    assert nine.state_count == 9


def test_trim_never_removes_the_initial_state():
    silent = mealy(1, "a", "", {(0, "a"): (0, ())})
    assert trim_sink(silent) is silent


def test_trim_preserves_emitted_output():
    rng = random.Random(48)
    for _ in range(20):
        machine = complete_with_sink(
            min_comp(subset_t(thompson(random_expr(rng)))))
        trimmed = trim_sink(machine)
        assert machine_output(trimmed, 5) == machine_output(machine, 5)


# ----------------------------------------------------------------- isomorphism

def test_machine_is_isomorphic_to_itself():
    m = reference_exact_machine()
    assert is_isomorphic(m, m)


def test_different_loop_outputs_are_not_isomorphic():
    a = mealy(1, "a", "AB", {(0, "a"): (0, ("A",))})
    b = mealy(1, "a", "AB", {(0, "a"): (0, ("B",))})
    assert not is_isomorphic(a, b)


def test_renumbered_machine_is_isomorphic():
    m = min_comp(subset_tc(thompson(parse(E3))))
    swap = {0: 0}
    order = list(range(1, m.state_count))
    swapped = {old: new for old, new in zip(order, reversed(order))}
    swap.update(swapped)
    relabeled = Mealy(
        m.state_count, m.input_alphabet, m.output_alphabet, swap[m.initial],
        {(swap[s], ch): (swap[d], outs)
         for (s, ch), (d, outs) in m.table.items()},
    )
    assert is_isomorphic(relabeled, m)
