"""Tests for trimming, growth witnesses, gadget orders and the capacity verdict."""

import random

import pytest

from flowwidth.app.config import AnalysisConfig
from flowwidth.app.exceptions import TimeBudgetError
from flowwidth.app.formats import parse_nfa
from flowwidth.app.models import ExponentialWitness, GrowthKind, Verdict
from flowwidth.app.services.classifier import (
    check_witness,
    classify_automaton,
    classify_capacity,
    find_exponential_witness,
    fit_gate,
    gadget_order,
    polynomial_order,
    pumped_antichain,
    trim,
)
from flowwidth.app.services.reduction import build_observer_nfa, reorder_inputs
from flowwidth.app.services.width import (
    WidthProfile,
    accepts,
    exact_width,
    is_antichain,
    width_bruteforce,
)
from flowwidth.tests.conftest import TRANSDUCER_EXAMPLES, random_nfa

SINGLE_WORD = """\
nfa
inputs: a
outputs: x
states: p r
initial: p
accepting: r
p --a--> r
"""

ODD_LENGTHS = """\
nfa
inputs: a
outputs: x
states: s0 s1
initial: s0
accepting: s1
s0 --a--> s1
s1 --a--> s0
"""

# x and y are incomparable; both continue into the same z-loop.
SHARED_TAIL = """\
nfa
inputs: a
outputs: x y z
states: s t
initial: s
accepting: t
s --x--> t
s --y--> t
t --z--> t
"""

# A y-branch off the x-loop at p lands in a second x-loop.
ONE_GADGET = """\
nfa
inputs: a
outputs: x y
states: p r
initial: p
accepting: p r
p --x--> p
p --y--> r
r --x--> r
"""


def late_start_nfa(length: int) -> str:
    """A chain of ``length`` x-steps into an accepting x-loop."""
    states = [f"p{i}" for i in range(length + 1)]
    lines = ["nfa", "inputs: a", "outputs: x", "states: " + " ".join(states), "initial: p0"]
    lines.append(f"accepting: {states[-1]}")
    lines += [f"{q} --x--> {nxt}" for q, nxt in zip(states, states[1:])]
    lines.append(f"{states[-1]} --x--> {states[-1]}")
    return "\n".join(lines) + "\n"


class TestTrim:
    """Tests for removing useless states."""

    def test_guarded_relay_drops_trap(self, guarded_relay):
        nfa = build_observer_nfa(guarded_relay)
        trimmed = trim(nfa)

        assert "trap" in nfa.states
        assert "trap" not in trimmed.states
        assert all("trap" not in state for state in trimmed.states)

    def test_trim_keeps_useful_automata(self, relay_nfa):
        assert trim(relay_nfa).states == relay_nfa.states

    def test_empty_language(self, empty_nfa):
        trimmed = trim(empty_nfa)

        assert trimmed.states == ()
        assert trimmed.initial == ()

    def test_widths_unchanged(self, guarded_relay):
        """Removing useless states never changes a level's width."""
        rng = random.Random(41)
        automata = [random_nfa(rng) for _ in range(100)]
        automata.append(build_observer_nfa(guarded_relay))
        for nfa in automata:
            trimmed = trim(nfa)
            assert [exact_width(trimmed, n) for n in range(7)] == [
                exact_width(nfa, n) for n in range(7)
            ]


class TestExponentialWitness:
    """Tests for find_exponential_witness and its checks."""

    def test_relay_witness(self, relay_nfa):
        witness = find_exponential_witness(trim(relay_nfa))

        assert witness is not None
        assert witness.state == "q0"
        assert witness.u == ("a", "a'")
        assert witness.v == ("a", "b'")
        assert check_witness(relay_nfa, witness)

    def test_pumped_antichain(self, relay_nfa):
        witness = find_exponential_witness(trim(relay_nfa))
        words = pumped_antichain(relay_nfa, witness, 3)

        assert len(words) == 8
        assert all(accepts(relay_nfa, w) for w in words)
        assert is_antichain(words, relay_nfa.poset)

    def test_interrupt_has_none(self, interrupt_nfa):
        assert find_exponential_witness(trim(interrupt_nfa)) is None

    def test_comparable_difference_is_rejected(self, relay_nfa):
        witness = ExponentialWitness(state="q0", u=("a", "a'"), v=("b", "a'"))

        assert not check_witness(relay_nfa, witness)

    def test_non_cycle_is_rejected(self, interrupt_nfa):
        witness = ExponentialWitness(state="q0", u=("a'", "b"), v=("a'", "a"))

        assert not check_witness(interrupt_nfa, witness)


class TestPolynomialOrder:
    """Tests for gadget chains and the fit gate."""

    def test_interrupt_gadgets(self, interrupt_nfa):
        assert gadget_order(trim(interrupt_nfa)) == 2
        assert polynomial_order(trim(interrupt_nfa)) == 2

    def test_switch_gadget(self, switch):
        assert gadget_order(trim(build_observer_nfa(switch))) == 1

    def test_silent_has_no_gadget(self, silent):
        assert gadget_order(trim(build_observer_nfa(silent))) == 0

    def test_finite_language(self):
        nfa = parse_nfa(SINGLE_WORD)

        assert gadget_order(nfa) == 0
        assert polynomial_order(nfa) == 0

    def test_shared_tail_is_bounded(self):
        """Two incomparable first letters followed by one loop: width stays 2."""
        nfa = parse_nfa(SHARED_TAIL)

        assert [width_bruteforce(nfa, n) for n in range(1, 7)] == [2] * 6
        assert [exact_width(nfa, n) for n in range(1, 7)] == [2] * 6
        assert find_exponential_witness(nfa) is None
        assert polynomial_order(nfa) == 0

    def test_single_gadget_is_linear(self):
        nfa = parse_nfa(ONE_GADGET)

        assert [width_bruteforce(nfa, n) for n in range(1, 6)] == [2, 3, 4, 5, 6]
        assert [exact_width(nfa, n) for n in range(1, 6)] == [2, 3, 4, 5, 6]
        assert find_exponential_witness(nfa) is None
        assert polynomial_order(nfa) == 1

    def test_odd_lengths_only(self):
        """Widths that vanish at every even length still fit order 0."""
        nfa = parse_nfa(ODD_LENGTHS)

        assert [exact_width(nfa, n) for n in range(1, 5)] == [1, 0, 1, 0]
        assert polynomial_order(nfa) == 0

    def test_fit_gate_compares_running_maxima(self, toggle):
        fit = fit_gate(WidthProfile(trim(build_observer_nfa(toggle))), 0)

        assert fit.passed
        assert fit.lengths == (16, 32, 64, 128)
        assert fit.widths == (1, 1, 1, 1)

    def test_fit_gate_reaches_past_late_first_word(self):
        nfa = parse_nfa(late_start_nfa(19))
        fit = fit_gate(WidthProfile(nfa), 0)

        assert fit.passed
        assert fit.lengths == (19, 38, 76, 152)
        assert polynomial_order(nfa) == 0

    def test_fit_gate_passes_for_interrupt(self, interrupt_nfa):
        fit = fit_gate(WidthProfile(trim(interrupt_nfa)), 2)

        assert fit.passed
        assert fit.lengths == (16, 32, 64, 128)
        assert fit.widths == (37, 137, 529, 2081)
        assert all(2 <= r <= 8 for r in fit.ratios)

    def test_fit_gate_rejects_wrong_order(self, interrupt_nfa):
        assert not fit_gate(WidthProfile(trim(interrupt_nfa)), 0).passed

    def test_fit_gate_time_budget(self, interrupt_nfa):
        with pytest.raises(TimeBudgetError):
            fit_gate(WidthProfile(trim(interrupt_nfa)), 2, time_budget=1e-9)


class TestClassifyCapacity:
    """Tests for the end-to-end verdict."""

    def test_relay_is_linear(self, relay):
        report = classify_capacity(relay, AnalysisConfig(n_max=8))

        assert report.verdict is Verdict.LINEAR
        assert report.order is None
        assert report.growth.kind is GrowthKind.EXPONENTIAL
        assert report.witness is not None
        assert report.width_table == ((2, 2), (4, 4), (6, 8), (8, 16))
        assert set(report.timings) == {"trim", "witness", "order", "width_table", "total"}

    def test_interrupt_is_logarithmic_order_two(self, interrupt):
        report = classify_capacity(interrupt)

        assert report.verdict is Verdict.LOGARITHMIC
        assert report.order == 2
        assert report.fit is not None and report.fit.passed
        assert not report.bounded

    def test_switch_is_logarithmic_order_one(self, switch):
        report = classify_capacity(switch)

        assert report.verdict is Verdict.LOGARITHMIC
        assert report.order == 1

    def test_silent_is_bounded(self, silent):
        report = classify_capacity(silent)

        assert report.order == 0
        assert report.bounded

    def test_guarded_relay_is_linear(self, guarded_relay):
        report = classify_capacity(guarded_relay, AnalysisConfig(n_max=2))

        assert report.verdict is Verdict.LINEAR
        assert report.width_table == ((2, 2),)

    def test_toggle_is_bounded(self, toggle):
        """Accepting only after odd rounds leaves Bob a single observation."""
        report = classify_capacity(toggle, AnalysisConfig(n_max=8))

        assert report.verdict is Verdict.LOGARITHMIC
        assert report.order == 0
        assert report.bounded
        assert report.width_table == ((2, 1), (4, 0), (6, 1), (8, 0))

    def test_empty_language_is_bounded(self, empty_nfa):
        report = classify_automaton(empty_nfa, AnalysisConfig(n_max=4))

        assert report.bounded
        assert report.fit is not None and report.fit.finite
        assert report.width_table == ((2, 0), (4, 0))

    def test_verdict_ignores_input_order(self, load_transducer):
        for name in TRANSDUCER_EXAMPLES:
            nfa = build_observer_nfa(load_transducer(name))
            flipped = reorder_inputs(nfa, tuple(reversed(nfa.inputs)))
            config = AnalysisConfig(n_max=6)
            original, reordered = classify_automaton(nfa, config), classify_automaton(flipped, config)

            assert reordered.verdict is original.verdict
            assert reordered.order == original.order
            assert reordered.width_table == original.width_table


class TestDichotomy:
    """No bundled transducer is both exponential and polynomial."""

    @pytest.mark.parametrize("name", TRANSDUCER_EXAMPLES)
    def test_witness_and_fit_exclude_each_other(self, load_transducer, name):
        nfa = trim(build_observer_nfa(load_transducer(name)))
        profile = WidthProfile(nfa)

        if find_exponential_witness(nfa) is not None:
            assert not any(fit_gate(profile, k).passed for k in range(4))
        else:
            assert fit_gate(profile, polynomial_order(nfa)).passed
