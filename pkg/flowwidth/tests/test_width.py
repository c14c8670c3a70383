"""Tests for lexicographic comparison, antichains and exact widths."""

import random

import pytest

from flowwidth.app.exceptions import (
    DeterminizationOverflowError,
    EnumerationBudgetError,
    HorizonError,
    PosetValidationError,
    UnknownLetterError,
)
from flowwidth.app.models import LetterPoset, LexOutcome
from flowwidth.app.services.reduction import build_observer_nfa
from flowwidth.app.services.width import (
    WidthProfile,
    dilworth_decomposition,
    exact_width,
    is_antichain,
    is_sigma_deterministic,
    language_level,
    lex_compare,
    maximal_letter_antichains,
    width_bruteforce,
)
from flowwidth.tests.conftest import random_nfa


@pytest.fixture
def bob_letters() -> LetterPoset:
    """Inputs a < b, outputs x and y incomparable."""
    return LetterPoset.linear_discrete(("a", "b"), ("x", "y"))


def is_chain(words, p: LetterPoset) -> bool:
    pairs = [(i, j) for i in range(len(words)) for j in range(i + 1, len(words))]
    return all(lex_compare(words[i], words[j], p) is LexOutcome.LESS for i, j in pairs)


class TestLexCompare:
    """Tests for the order induced on words."""

    def test_first_difference_decides(self, bob_letters):
        assert lex_compare(("a", "x"), ("b", "x"), bob_letters) is LexOutcome.LESS
        assert lex_compare(("b", "x"), ("a", "y"), bob_letters) is LexOutcome.GREATER
        assert lex_compare(("a", "x"), ("a", "y"), bob_letters) is LexOutcome.INCOMPARABLE
        assert lex_compare(("a", "x"), ("a", "x"), bob_letters) is LexOutcome.EQUAL

    def test_prefix_is_smaller(self, bob_letters):
        assert lex_compare(("a",), ("a", "x"), bob_letters) is LexOutcome.LESS
        assert lex_compare((), ("b",), bob_letters) is LexOutcome.LESS
        assert lex_compare(("a", "x"), ("a",), bob_letters) is LexOutcome.GREATER

    def test_unknown_letter(self, bob_letters):
        with pytest.raises(UnknownLetterError):
            lex_compare(("a", "z"), ("a", "x"), bob_letters)

    def test_poset_must_be_transitive(self):
        with pytest.raises(PosetValidationError):
            LetterPoset(letters=("a", "b", "c"), relation=frozenset({("a", "b"), ("b", "c")}))

    def test_poset_must_be_irreflexive(self):
        with pytest.raises(PosetValidationError):
            LetterPoset(letters=("a",), relation=frozenset({("a", "a")}))


class TestAntichains:
    """Tests for antichain and Sigma-determinism checks."""

    def test_output_branching_is_antichain(self, bob_letters):
        words = [("a", "x", "a", "x"), ("a", "x", "a", "y"), ("a", "y", "b", "x")]

        assert is_antichain(words, bob_letters)
        assert is_sigma_deterministic(words, ("a", "b"))

    def test_input_branching_is_not(self, bob_letters):
        words = [("a", "x"), ("b", "y")]

        assert not is_antichain(words, bob_letters)
        assert not is_sigma_deterministic(words, ("a", "b"))

    def test_duplicates_are_ignored(self, bob_letters):
        assert is_antichain([("a", "x"), ("a", "x")], bob_letters)

    def test_sigma_deterministic_equals_antichain(self, bob_letters):
        """For input-linear, output-discrete orders the two notions agree."""
        rng = random.Random(23)
        letters = bob_letters.letters
        for _ in range(200):
            words = [tuple(rng.choice(letters) for _ in range(3)) for _ in range(rng.randint(1, 4))]
            assert is_antichain(words, bob_letters) == is_sigma_deterministic(words, ("a", "b"))

    def test_mixed_first_difference_is_not_input_branching(self, bob_letters):
        """Words first differing at an input and an output letter are incomparable."""
        words = [("x", "a", "y"), ("b", "y", "y"), ("b", "b", "b")]

        assert is_antichain(words, bob_letters)
        assert is_sigma_deterministic(words, ("a", "b"))

    def test_maximal_letter_antichains(self, bob_letters):
        assert maximal_letter_antichains(bob_letters, ("a", "b", "x", "y")) == [
            ("a", "x", "y"),
            ("b", "x", "y"),
        ]
        assert maximal_letter_antichains(bob_letters, ("x",)) == [("x",)]


class TestExactWidth:
    """Tests for widths computed over the subset automaton."""

    def test_relay_doubles(self, relay_nfa):
        profile = WidthProfile(relay_nfa)

        assert [profile.width(2 * m) for m in range(1, 11)] == [2**m for m in range(1, 11)]

    def test_interrupt_is_quadratic(self, interrupt_nfa):
        profile = WidthProfile(interrupt_nfa)

        assert [profile.width(2 * m) for m in range(1, 6)] == [2, 4, 7, 11, 16]
        assert profile.table([16, 32, 64, 128]) == [(16, 37), (32, 137), (64, 529), (128, 2081)]

    def test_switch_is_linear(self, switch):
        profile = WidthProfile(build_observer_nfa(switch))

        assert [profile.width(2 * m) for m in range(0, 8)] == [m + 1 for m in range(0, 8)]

    def test_silent_is_constant(self, silent):
        profile = WidthProfile(build_observer_nfa(silent))

        assert {profile.width(2 * m) for m in range(0, 8)} == {1}

    def test_odd_levels_are_empty(self, relay_nfa, interrupt_nfa):
        for nfa in (relay_nfa, interrupt_nfa):
            assert [exact_width(nfa, n) for n in (1, 3, 5, 7)] == [0, 0, 0, 0]

    def test_empty_language(self, empty_nfa):
        assert WidthProfile(empty_nfa).table(range(0, 6)) == [(n, 0) for n in range(0, 6)]

    def test_negative_length(self, relay_nfa):
        with pytest.raises(HorizonError):
            exact_width(relay_nfa, -1)

    def test_determinization_budget(self, interrupt_nfa):
        with pytest.raises(DeterminizationOverflowError):
            WidthProfile(interrupt_nfa, state_budget=2).width(4)

    def test_profile_is_reusable_out_of_order(self, interrupt_nfa):
        profile = WidthProfile(interrupt_nfa)

        assert profile.width(10) == 16
        assert profile.width(4) == 4
        assert profile.subset_states > 0


class TestBruteForce:
    """Tests for level enumeration and the Dilworth oracle."""

    def test_relay_level(self, relay_nfa):
        assert language_level(relay_nfa, 2) == [
            ("a", "a'"),
            ("a", "b'"),
            ("b", "a'"),
            ("b", "b'"),
        ]

    def test_enumeration_cap(self, relay_nfa):
        with pytest.raises(EnumerationBudgetError):
            language_level(relay_nfa, 4, cap=3)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_relay_matches_dp(self, relay_nfa, m):
        assert width_bruteforce(relay_nfa, 2 * m) == 2**m

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_interrupt_matches_dp(self, interrupt_nfa, n):
        assert width_bruteforce(interrupt_nfa, n) == exact_width(interrupt_nfa, n)

    def test_dilworth_certificate(self, bob_letters):
        words = [("a", "x"), ("a", "y"), ("b", "x"), ("b", "y")]
        certificate = dilworth_decomposition(words, bob_letters)

        assert certificate.width == 2
        assert len(certificate.chains) == 2
        assert is_antichain(certificate.antichain, bob_letters)
        assert sorted(w for chain in certificate.chains for w in chain) == sorted(words)
        assert all(is_chain(list(chain), bob_letters) for chain in certificate.chains)

    def test_random_automata(self):
        """Subset DP and Dilworth agree on random automata under random posets."""
        rng = random.Random(29)
        checked = 0
        for _ in range(150):
            nfa = random_nfa(rng)
            for n in range(0, 5):
                try:
                    level = language_level(nfa, n, cap=200)
                except EnumerationBudgetError:
                    continue
                certificate = dilworth_decomposition(level, nfa.poset)
                assert certificate.width == len(certificate.chains)
                assert is_antichain(certificate.antichain, nfa.poset)
                assert exact_width(nfa, n) == (certificate.width if level else 0)
                checked += 1
        assert checked > 300

    @pytest.mark.slow
    def test_random_automata_full(self):
        rng = random.Random(31)
        for _ in range(500):
            nfa = random_nfa(rng)
            for n in range(0, 7):
                try:
                    level = language_level(nfa, n, cap=400)
                except EnumerationBudgetError:
                    continue
                certificate = dilworth_decomposition(level, nfa.poset)
                assert certificate.width == len(certificate.chains)
                assert all(is_chain(list(chain), nfa.poset) for chain in certificate.chains)
                assert exact_width(nfa, n) == (certificate.width if level else 0)
