"""Lexicographic order on words and exact widths of language levels."""

import threading
from collections.abc import Iterable, Sequence
from itertools import combinations

import networkx as nx
import structlog

from flowwidth.app.constants import AnalysisDefaults
from flowwidth.app.exceptions import (
    DeterminizationOverflowError,
    EnumerationBudgetError,
    HorizonError,
    UnknownLetterError,
)
from flowwidth.app.models import (
    DilworthCertificate,
    LetterPoset,
    LexOutcome,
    OrderedNfa,
    Word,
)

logger = structlog.get_logger(__name__)


def _check_letters(words: Iterable[Word], p: LetterPoset) -> None:
    known = set(p.letters)
    for w in words:
        for letter in w:
            if letter not in known:
                raise UnknownLetterError(f"letter {letter} is not in the poset")


def _compare(w1: Word, w2: Word, p: LetterPoset) -> LexOutcome:
    for x, y in zip(w1, w2):
        if x == y:
            continue
        if p.less(x, y):
            return LexOutcome.LESS
        if p.less(y, x):
            return LexOutcome.GREATER
        return LexOutcome.INCOMPARABLE
    if len(w1) == len(w2):
        return LexOutcome.EQUAL
    # the empty word is below everything
    return LexOutcome.LESS if len(w1) < len(w2) else LexOutcome.GREATER


def lex_compare(w1: Word, w2: Word, p: LetterPoset) -> LexOutcome:
    """Compare words in the lexicographic order induced by ``p``."""
    _check_letters((w1, w2), p)
    return _compare(tuple(w1), tuple(w2), p)


def is_antichain(ws: Iterable[Word], p: LetterPoset) -> bool:
    """Whether every two distinct words are incomparable in the order on words."""
    words = list(dict.fromkeys(tuple(w) for w in ws))
    _check_letters(words, p)
    return all(
        _compare(w1, w2, p) is LexOutcome.INCOMPARABLE for w1, w2 in combinations(words, 2)
    )


def is_sigma_deterministic(ws: Iterable[Word], inputs: Sequence[str]) -> bool:
    """No two distinct words first differ at a letter from ``inputs``."""
    words = list(dict.fromkeys(tuple(w) for w in ws))
    inputs = set(inputs)
    for w1, w2 in combinations(words, 2):
        for x, y in zip(w1, w2):
            if x != y:
                if x in inputs and y in inputs:
                    return False
                break
    return True


def maximal_letter_antichains(p: LetterPoset, letters: Sequence[str]) -> list[tuple[str, ...]]:
    """Maximal antichains of ``p`` restricted to ``letters``, in canonical order."""
    letters = list(letters)
    found: list[tuple[str, ...]] = []

    def extend(i: int, chosen: list[str]) -> None:
        if i == len(letters):
            found.append(tuple(chosen))
            return
        x = letters[i]
        if all(not p.comparable(x, y) for y in chosen):
            extend(i + 1, chosen + [x])
        extend(i + 1, chosen)

    extend(0, [])
    return [
        a
        for a in found
        if not any(x not in a and all(not p.comparable(x, y) for y in a) for x in letters)
    ]


class WidthProfile:
    """
    Widths w(L(A)_{=n}) for n = 0, 1, 2, ... of one automaton.

    The reachable subset automaton is built once, then each new length adds
    one level to the table W(S, m), the largest antichain of words of
    length m accepted from subset S. Level tables are shared by threads.
    """

    def __init__(self, a: OrderedNfa, state_budget: int = AnalysisDefaults.STATE_BUDGET):
        self.nfa = a
        self.state_budget = state_budget
        self._lock = threading.Lock()
        self._built = False
        self._accepting: list[bool] = []
        self._plans: list[list[tuple[int, ...]]] = []
        self._levels: list[list[int]] = []

    def _determinize(self) -> None:
        a = self.nfa
        start = frozenset(a.initial)
        if not start:
            self._built = True
            return
        index = {start: 0}
        subsets = [start]
        edges: list[dict[str, int]] = []
        i = 0
        while i < len(subsets):
            moves = {}
            for letter in a.alphabet:
                target = a.successors(subsets[i], letter)
                if not target:
                    continue
                if target not in index:
                    if len(subsets) >= self.state_budget:
                        raise DeterminizationOverflowError(
                            f"determinization exceeded {self.state_budget} subset states"
                        )
                    index[target] = len(subsets)
                    subsets.append(target)
                moves[letter] = index[target]
            edges.append(moves)
            i += 1

        accepting = set(a.accepting)
        poset = a.poset
        closed_form = poset.non_isolated_is_chain
        isolated = set(poset.isolated)
        self._accepting = [bool(s & accepting) for s in subsets]
        for moves in edges:
            live = [x for x in a.alphabet if x in moves]
            if closed_form:
                free = tuple(moves[x] for x in live if x in isolated)
                chain = [x for x in live if x not in isolated]
                plans = [free + (moves[x],) for x in chain] or [free]
            else:
                plans = [
                    tuple(moves[x] for x in antichain)
                    for antichain in maximal_letter_antichains(poset, live)
                ]
            self._plans.append(plans)
        self._built = True
        logger.debug("subset_automaton_built", states=len(subsets), closed_form=closed_form)

    @property
    def subset_states(self) -> int:
        with self._lock:
            if not self._built:
                self._determinize()
            return len(self._plans)

    def width(self, n: int) -> int:
        if n < 0:
            raise HorizonError("word length must be non-negative")
        with self._lock:
            if not self._built:
                self._determinize()
            if not self._plans:
                return 0
            if not self._levels:
                self._levels.append([int(flag) for flag in self._accepting])
            while len(self._levels) <= n:
                previous = self._levels[-1]
                self._levels.append(
                    [
                        max(sum(previous[t] for t in plan) for plan in plans)
                        for plans in self._plans
                    ]
                )
            return self._levels[n][0]

    def table(self, lengths: Iterable[int]) -> list[tuple[int, int]]:
        return [(n, self.width(n)) for n in lengths]


def exact_width(
    a: OrderedNfa, n: int, state_budget: int = AnalysisDefaults.STATE_BUDGET
) -> int:
    """w(L(A)_{=n}) by dynamic programming over the subset automaton."""
    return WidthProfile(a, state_budget).width(n)


# Enumeration


def accepts(a: OrderedNfa, word: Sequence[str]) -> bool:
    """Whether some run of ``a`` on ``word`` ends in an accepting state."""
    current = frozenset(a.initial)
    for letter in word:
        current = a.successors(current, letter)
        if not current:
            return False
    return bool(current & set(a.accepting))


def language_level(
    a: OrderedNfa, n: int, cap: int = AnalysisDefaults.ENUMERATION_CAP
) -> list[Word]:
    """Words of length ``n`` accepted by ``a``, in alphabet order."""
    if n < 0:
        raise HorizonError("word length must be non-negative")
    # productive[i]: states with an accepted continuation of length i
    productive = [set(a.accepting)]
    for _ in range(n):
        previous = productive[-1]
        productive.append(
            {q for (q, _), targets in a.transitions.items() if any(t in previous for t in targets)}
        )

    start = frozenset(q for q in a.initial if q in productive[n])
    if not start:
        return []
    frontier: dict[Word, frozenset[str]] = {(): start}
    for i in range(n):
        useful = productive[n - i - 1]
        extended: dict[Word, frozenset[str]] = {}
        for word, current in frontier.items():
            for letter in a.alphabet:
                target = frozenset(t for t in a.successors(current, letter) if t in useful)
                if target:
                    extended[word + (letter,)] = target
        if len(extended) > cap:
            raise EnumerationBudgetError(f"more than {cap} words at length {i + 1}")
        frontier = extended
    return list(frontier)


def dilworth_decomposition(words: Iterable[Word], p: LetterPoset) -> DilworthCertificate:
    """
    Maximum antichain and minimum chain cover of a finite set of words.

    Chains come from a maximum matching in the split graph of the strict
    order; the antichain is read off the Konig vertex cover.
    """
    words = list(dict.fromkeys(tuple(w) for w in words))
    _check_letters(words, p)
    left = [("L", i) for i in range(len(words))]
    graph = nx.Graph()
    graph.add_nodes_from(left, bipartite=0)
    graph.add_nodes_from((("R", i) for i in range(len(words))), bipartite=1)
    for i, j in combinations(range(len(words)), 2):
        outcome = _compare(words[i], words[j], p)
        if outcome is LexOutcome.LESS:
            graph.add_edge(("L", i), ("R", j))
        elif outcome is LexOutcome.GREATER:
            graph.add_edge(("L", j), ("R", i))

    matching = nx.bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    cover = nx.bipartite.to_vertex_cover(graph, matching, top_nodes=left)
    antichain = tuple(
        words[i] for i in range(len(words)) if ("L", i) not in cover and ("R", i) not in cover
    )

    successor = {i: matching[("L", i)][1] for i in range(len(words)) if ("L", i) in matching}
    has_predecessor = set(successor.values())
    chains = []
    for i in range(len(words)):
        if i in has_predecessor:
            continue
        chain = [words[i]]
        while i in successor:
            i = successor[i]
            chain.append(words[i])
        chains.append(tuple(chain))
    return DilworthCertificate(antichain=antichain, chains=tuple(chains))


def width_bruteforce(
    a: OrderedNfa, n: int, cap: int = AnalysisDefaults.ENUMERATION_CAP
) -> int:
    """w(L(A)_{=n}) by enumerating the level and applying Dilworth's theorem."""
    level = language_level(a, n, cap)
    if not level:
        return 0
    return dilworth_decomposition(level, a.poset).width
