"""Polynomial versus exponential antichain growth, and the capacity verdict."""

import time
from collections import deque
from enum import Enum

import networkx as nx
import structlog

from flowwidth.app.config import AnalysisConfig
from flowwidth.app.constants import AnalysisDefaults
from flowwidth.app.exceptions import ClassificationInconsistencyError, TimeBudgetError
from flowwidth.app.models import (
    CapacityReport,
    ExponentialWitness,
    FitCheck,
    GrowthClass,
    GrowthKind,
    OrderedNfa,
    Sdfst,
    Verdict,
    Word,
)
from flowwidth.app.services.reduction import build_observer_nfa
from flowwidth.app.services.width import WidthProfile

logger = structlog.get_logger(__name__)


class _Flag(Enum):
    EQUAL_SO_FAR = 0
    DIVERGED = 1


def _state_graph(a: OrderedNfa) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(a.states)
    for (q, _), targets in a.transitions.items():
        graph.add_edges_from((q, t) for t in targets)
    return graph


def trim(a: OrderedNfa) -> OrderedNfa:
    """Drop states that are not both reachable and co-reachable."""
    graph = _state_graph(a)
    reachable = set(a.initial).union(*(nx.descendants(graph, q) for q in a.initial))
    reverse = graph.reverse(copy=False)
    productive = set(a.accepting).union(*(nx.descendants(reverse, q) for q in a.accepting))
    useful = reachable & productive

    transitions = {}
    for (q, x), targets in a.transitions.items():
        if q not in useful:
            continue
        kept = tuple(t for t in targets if t in useful)
        if kept:
            transitions[(q, x)] = kept
    return OrderedNfa(
        states=tuple(q for q in a.states if q in useful),
        initial=tuple(q for q in a.initial if q in useful),
        accepting=tuple(q for q in a.accepting if q in useful),
        inputs=a.inputs,
        outputs=a.outputs,
        transitions=transitions,
        order=a.order,
    )


def _divergence_search(a: OrderedNfa, p: str) -> dict[tuple, tuple | None]:
    """
    Pairs of equal-length paths leaving p, tracked as (q1, q2, flag).

    The flag turns DIVERGED at the first position where the two words read
    incomparable letters; comparable first differences are not followed.
    Returns the BFS parent map, so every reached node has a shortest label.
    """
    poset = a.poset
    start = (p, p, _Flag.EQUAL_SO_FAR)
    parent: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        q1, q2, flag = node
        for x in a.alphabet:
            first = a.transitions.get((q1, x), ())
            if not first:
                continue
            for y in a.alphabet:
                if flag is _Flag.DIVERGED:
                    new_flag = _Flag.DIVERGED
                elif x == y:
                    new_flag = _Flag.EQUAL_SO_FAR
                elif poset.comparable(x, y):
                    continue
                else:
                    new_flag = _Flag.DIVERGED
                for t1 in first:
                    for t2 in a.transitions.get((q2, y), ()):
                        target = (t1, t2, new_flag)
                        if target not in parent:
                            parent[target] = (node, x, y)
                            queue.append(target)
    return parent


def _labels(parent: dict[tuple, tuple | None], node: tuple) -> tuple[Word, Word]:
    u: list[str] = []
    v: list[str] = []
    while parent[node] is not None:
        node, x, y = parent[node]
        u.append(x)
        v.append(y)
    return tuple(reversed(u)), tuple(reversed(v))


def find_exponential_witness(a: OrderedNfa) -> ExponentialWitness | None:
    """
    Two equal-length cycles at one state whose first difference is incomparable.

    ``a`` is expected to be trim. States are tried in declaration order and
    the shortest pair is returned, so the witness is canonical.
    """
    for p in a.states:
        parent = _divergence_search(a, p)
        target = (p, p, _Flag.DIVERGED)
        if target in parent:
            u, v = _labels(parent, target)
            witness = ExponentialWitness(state=p, u=u, v=v)
            logger.info("exponential_witness_found", state=p, u=" ".join(u), v=" ".join(v))
            return witness
    return None


def _shortest_word(a: OrderedNfa, sources: tuple[str, ...], goals: set[str]) -> Word | None:
    parent: dict[str, tuple[str, str] | None] = {q: None for q in sources}
    queue = deque(sources)
    while queue:
        q = queue.popleft()
        if q in goals:
            word = []
            while parent[q] is not None:
                q, x = parent[q]
                word.append(x)
            return tuple(reversed(word))
        for x in a.alphabet:
            for t in a.transitions.get((q, x), ()):
                if t not in parent:
                    parent[t] = (q, x)
                    queue.append(t)
    return None


def _reads_cycle(a: OrderedNfa, q: str, word: Word) -> bool:
    current = frozenset({q})
    for letter in word:
        current = a.successors(current, letter)
    return q in current


def check_witness(a: OrderedNfa, witness: ExponentialWitness) -> bool:
    """Machine check of an exponential witness against ``a``."""
    q, u, v = witness.state, witness.u, witness.v
    if q not in trim(a).states:
        return False
    difference = next(i for i, (x, y) in enumerate(zip(u, v)) if x != y)
    if a.poset.comparable(u[difference], v[difference]):
        return False
    return _reads_cycle(a, q, u) and _reads_cycle(a, q, v)


def pumped_antichain(a: OrderedNfa, witness: ExponentialWitness, m: int) -> list[Word]:
    """The 2**m accepted words prefix (u|v)^m suffix, pairwise incomparable."""
    prefix = _shortest_word(a, a.initial, {witness.state})
    suffix = _shortest_word(a, (witness.state,), set(a.accepting))
    if prefix is None or suffix is None:
        return []
    words: list[Word] = [prefix]
    for _ in range(m):
        words = [w + block for w in words for block in (witness.u, witness.v)]
    return [w + suffix for w in words]


def gadget_order(a: OrderedNfa) -> int:
    """
    Longest chain of divergence gadgets along a path of trim ``a``.

    A gadget at p is a cycle u at p and a path v from p to p' of the same
    length whose first difference with u is incomparable. A chain only
    counts if a cycle is reachable after its last gadget.
    """
    graph = _state_graph(a)
    dag = nx.condensation(graph)
    component = dag.graph["mapping"]
    cyclic_component = {
        c
        for c in dag.nodes
        if len(dag.nodes[c]["members"]) > 1
        or any(graph.has_edge(q, q) for q in dag.nodes[c]["members"])
    }

    targets: dict[str, set[str]] = {}
    for p in a.states:
        if component[p] not in cyclic_component:
            continue
        parent = _divergence_search(a, p)
        targets[p] = {q2 for q1, q2, flag in parent if q1 == p and flag is _Flag.DIVERGED}
        if any(component[t] == component[p] for t in targets[p]):
            raise ClassificationInconsistencyError(
                f"gadget at {p} closes a cycle, so growth is exponential", None, []
            )

    best: dict[int, int | None] = {}
    for c in reversed(list(nx.topological_sort(dag))):
        candidates = [best[d] for d in dag.successors(c) if best[d] is not None]
        if c in cyclic_component:
            candidates.append(0)
        for p in dag.nodes[c]["members"]:
            for t in targets.get(p, ()):
                if best[component[t]] is not None:
                    candidates.append(1 + best[component[t]])
        best[c] = max(candidates) if candidates else None

    orders = [best[component[q]] for q in a.initial if best[component[q]] is not None]
    return max(orders, default=0)


def fit_gate(
    profile: WidthProfile,
    order: int,
    max_length: int = AnalysisDefaults.FIT_MAX_LENGTH,
    time_budget: float = AnalysisDefaults.TIME_BUDGET_SECONDS,
) -> FitCheck:
    """
    Compare width doubling ratios against 2**order.

    Widths are computed for n = 1, 2, ... up to ``max_length`` or until the
    time budget runs out, but always up to the minimum length and to eight
    times the shortest accepted length. Ratios are taken between running
    maxima max_{n' <= n} w(n'), so languages that are empty at some lengths
    (odd lengths, or lengths off a period) still fit.
    The largest m with positive running maxima at m, 2m, 4m and 8m is used;
    each of the three ratios must lie within a factor of 2 of 2**order.
    """
    started = time.perf_counter()
    widths: dict[int, int] = {}
    running = 0
    limit = max_length
    n = 0
    while n < limit:
        n += 1
        w = profile.width(n)
        if w and not running:
            limit = max(limit, 8 * n)
        running = max(running, w)
        widths[n] = running
        if time.perf_counter() - started > time_budget:
            if n < AnalysisDefaults.FIT_MIN_LENGTH:
                raise TimeBudgetError(
                    f"widths reached only length {n} within {time_budget} seconds"
                )
            break
    longest = max(widths)

    for m in range(longest // 8, 0, -1):
        lengths = (m, 2 * m, 4 * m, 8 * m)
        values = tuple(widths[n] for n in lengths)
        if all(values):
            break
    else:
        raise TimeBudgetError(
            f"no positive doubling sequence up to length {longest} within {time_budget} seconds"
        )

    ratios = tuple(values[i + 1] / values[i] for i in range(3))
    target = 2**order
    passed = all(target / 2 <= r <= target * 2 for r in ratios)
    log = logger.info if passed else logger.warning
    log("fit_gate_checked", order=order, lengths=lengths, ratios=ratios, passed=passed)
    return FitCheck(
        order=order,
        lengths=lengths,
        widths=values,
        ratios=ratios,
        max_length=longest,
        passed=passed,
    )


def _is_finite(a: OrderedNfa) -> bool:
    return nx.is_directed_acyclic_graph(_state_graph(a))


def _verified_order(
    a: OrderedNfa, profile: WidthProfile, fit_max_length: int, time_budget: float
) -> tuple[int, FitCheck]:
    order = gadget_order(a)
    if _is_finite(a):
        return order, FitCheck(order=order, finite=True, passed=True)
    fit = fit_gate(profile, order, fit_max_length, time_budget)
    if not fit.passed:
        raise ClassificationInconsistencyError(
            "width ratios contradict the gadget order", order, list(fit.ratios)
        )
    return order, fit


def polynomial_order(
    a: OrderedNfa,
    state_budget: int = AnalysisDefaults.STATE_BUDGET,
    fit_max_length: int = AnalysisDefaults.FIT_MAX_LENGTH,
    time_budget: float = AnalysisDefaults.TIME_BUDGET_SECONDS,
) -> int:
    """
    Order k with w(L(A)_{=n}) = Theta(n^k) for trim ``a`` without exponential witness.

    The gadget count is only returned once the width ratios agree with it.
    """
    order, _ = _verified_order(a, WidthProfile(a, state_budget), fit_max_length, time_budget)
    return order


def classify_automaton(a: OrderedNfa, config: AnalysisConfig | None = None) -> CapacityReport:
    """Growth class of ``a`` lifted to the capacity verdict of its transducer."""
    config = config or AnalysisConfig()
    timings: dict[str, float] = {}
    started = time.perf_counter()

    trimmed = trim(a)
    timings["trim"] = time.perf_counter() - started

    mark = time.perf_counter()
    witness = find_exponential_witness(trimmed)
    timings["witness"] = time.perf_counter() - mark

    profile = WidthProfile(trimmed, config.state_budget)
    fit = None
    mark = time.perf_counter()
    if witness is not None:
        if not check_witness(trimmed, witness):
            raise ClassificationInconsistencyError(
                f"exponential witness at {witness.state} failed its check", None, []
            )
        growth = GrowthClass(kind=GrowthKind.EXPONENTIAL, witness=witness)
        verdict = Verdict.LINEAR
    else:
        order, fit = _verified_order(trimmed, profile, config.fit_max_length, config.time_budget)
        growth = GrowthClass(kind=GrowthKind.POLYNOMIAL, order=order)
        verdict = Verdict.LOGARITHMIC
    timings["order"] = time.perf_counter() - mark

    mark = time.perf_counter()
    width_table = tuple(profile.table(range(2, config.n_max + 1, 2)))
    timings["width_table"] = time.perf_counter() - mark
    timings["total"] = time.perf_counter() - started

    logger.info(
        "capacity_classified",
        verdict=verdict.value,
        order=growth.order,
        states=len(trimmed.states),
    )
    return CapacityReport(
        verdict=verdict,
        order=growth.order,
        growth=growth,
        witness=witness,
        width_table=width_table,
        fit=fit,
        timings=timings,
        states=len(trimmed.states),
    )


def classify_capacity(t: Sdfst, config: AnalysisConfig | None = None) -> CapacityReport:
    """Logarithmic(k) or Linear capacity of ``t`` via its observer automaton."""
    return classify_automaton(build_observer_nfa(t), config)
