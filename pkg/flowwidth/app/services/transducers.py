"""SDFST semantics: validation, plays, consistency and brute-force leakage."""

from collections.abc import Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations, product

import structlog

from flowwidth.app.constants import AnalysisDefaults
from flowwidth.app.exceptions import (
    HorizonError,
    InducedChannelError,
    ObservationLengthError,
    StrategyBudgetError,
    TransducerValidationError,
)
from flowwidth.app.models import (
    History,
    InteractiveChannel,
    LeakageResult,
    Observation,
    Sdfst,
    Side,
    Strategy,
    Trace,
    format_observation,
)
from flowwidth.app.services.channels import log2

logger = structlog.get_logger(__name__)


def validate(t: Sdfst) -> None:
    """Raise TransducerValidationError naming the first violated invariant."""
    known = set(t.states)
    if len(known) != len(t.states):
        raise TransducerValidationError("state names are not distinct")
    if t.initial not in known:
        raise TransducerValidationError(f"initial state {t.initial} is not a declared state")
    for q in t.accepting:
        if q not in known:
            raise TransducerValidationError(f"accepting state {q} is not a declared state")
    for name, alphabet in (
        ("alice_in", t.alice_in),
        ("bob_in", t.bob_in),
        ("alice_out", t.alice_out),
        ("bob_out", t.bob_out),
    ):
        if not alphabet:
            raise TransducerValidationError(f"alphabet {name} is empty")
        if any(not letter for letter in alphabet):
            raise TransducerValidationError(f"alphabet {name} contains an empty letter")

    for q, a, b in product(t.states, t.alice_in, t.bob_in):
        cell = f"state {q} on ({a},{b})"
        if (q, a, b) not in t.delta:
            raise TransducerValidationError(f"missing transition for {cell}")
        if (q, a, b) not in t.sigma:
            raise TransducerValidationError(f"missing output for {cell}")
        if t.delta[(q, a, b)] not in known:
            raise TransducerValidationError(
                f"transition for {cell} goes to undeclared state {t.delta[(q, a, b)]}"
            )
        c, d = t.sigma[(q, a, b)]
        if not c or not d:
            raise TransducerValidationError(f"empty output for {cell}")
        if c not in t.alice_out or d not in t.bob_out:
            raise TransducerValidationError(f"output ({c},{d}) for {cell} is outside the alphabets")

    cells = len(t.states) * len(t.alice_in) * len(t.bob_in)
    if len(t.delta) != cells or len(t.sigma) != cells:
        raise TransducerValidationError("transition table has cells outside states x inputs")


# Plays


def _play(t: Sdfst, xa: Strategy, xb: Strategy, k: int) -> tuple[Trace, tuple[str, ...]]:
    if xa.horizon < k or xb.horizon < k:
        raise HorizonError(
            f"strategies have horizons {xa.horizon} and {xb.horizon}, run needs {k}"
        )
    state = t.initial
    states = [state]
    trace = []
    alice_history: History = ()
    bob_history: History = ()
    for _ in range(k):
        a = xa.choose(alice_history)
        b = xb.choose(bob_history)
        state, (c, d) = t.step(state, a, b)
        trace.append(((a, b), (c, d)))
        states.append(state)
        alice_history += ((a, c),)
        bob_history += ((b, d),)
    return tuple(trace), tuple(states)


def run(t: Sdfst, xa: Strategy, xb: Strategy, k: int) -> Trace:
    """The length-k prefix of the unique play of ``xa`` against ``xb``."""
    trace, _ = _play(t, xa, xb, k)
    return trace


def trace_states(t: Sdfst, w: Trace) -> tuple[str, ...] | None:
    """States visited while reading ``w``, or None if the outputs do not match."""
    state = t.initial
    states = [state]
    for (a, b), output in w:
        if (state, a, b) not in t.delta:
            return None
        state, expected = t.step(state, a, b)
        if tuple(output) != expected:
            return None
        states.append(state)
    return tuple(states)


def in_language(t: Sdfst, w: Trace) -> bool:
    """Whether ``w`` matches the transducer and ends in an accepting state."""
    states = trace_states(t, w)
    return states is not None and states[-1] in set(t.accepting)


def bob_view(w: Trace) -> Observation:
    """Bob's (input, output) pair at each step."""
    return tuple((b, d) for (_, b), (_, d) in w)


def alice_view(w: Trace) -> History:
    """Alice's (input, output) pair at each step."""
    return tuple((a, c) for (a, _), (c, _) in w)


def consistent(w: Trace, t: Sdfst, xa: Strategy, xb: Strategy) -> bool:
    """Whether ``w`` is accepted and every input follows the strategies."""
    if len(w) > min(xa.horizon, xb.horizon) or not in_language(t, w):
        return False
    alice, bob = alice_view(w), bob_view(w)
    for i in range(len(w)):
        if xa.choose(alice[:i]) != alice[i][0] or xb.choose(bob[:i]) != bob[i][0]:
            return False
    return True


# Strategy enumeration


def _moves(t: Sdfst, side: Side, states: frozenset[str], letter: str) -> list[tuple[str, frozenset[str]]]:
    """Own outputs possible after playing ``letter``, with the states each leads to."""
    reached: dict[str, set[str]] = {}
    for q in states:
        for other in t.inputs_of(Side.BOB if side is Side.ALICE else Side.ALICE):
            a, b = (letter, other) if side is Side.ALICE else (other, letter)
            target, (c, d) = t.step(q, a, b)
            reached.setdefault(c if side is Side.ALICE else d, set()).add(target)
    return [(y, frozenset(reached[y])) for y in t.outputs_of(side) if y in reached]


def _count(
    t: Sdfst, side: Side, states: frozenset[str], remaining: int, cap: int, memo: dict
) -> int:
    if remaining == 0:
        return 1
    key = (states, remaining)
    if key not in memo:
        total = 0
        for x in t.inputs_of(side):
            ways = 1
            for _, nxt in _moves(t, side, states, x):
                ways = min(ways * _count(t, side, nxt, remaining - 1, cap, memo), cap + 1)
            total = min(total + ways, cap + 1)
        memo[key] = total
    return memo[key]


def strategy_count(t: Sdfst, side: Side, horizon: int, cap: int) -> int:
    """Number of strategies over reachable histories, saturating at ``cap + 1``."""
    return _count(t, side, frozenset({t.initial}), horizon, cap, {})


def _tables(
    t: Sdfst, side: Side, states: frozenset[str], history: History, remaining: int
) -> Iterator[dict[History, str]]:
    if remaining == 0:
        yield {}
        return
    for x in t.inputs_of(side):
        subtrees = [
            list(_tables(t, side, nxt, history + ((x, y),), remaining - 1))
            for y, nxt in _moves(t, side, states, x)
        ]
        for combination in product(*subtrees):
            table = {history: x}
            for sub in combination:
                table.update(sub)
            yield table


def enumerate_strategies(
    t: Sdfst,
    side: Side,
    horizon: int,
    budget: int = AnalysisDefaults.STRATEGY_BUDGET,
) -> list[Strategy]:
    """
    All deterministic strategies of ``side`` up to ``horizon``.

    Decision points are the own histories the opponent can actually produce
    in ``t`` given the side's earlier choices. Order is canonical.
    """
    count = strategy_count(t, side, horizon, budget)
    if count > budget:
        raise StrategyBudgetError(
            f"more than {budget} {side.value} strategies at horizon {horizon}"
        )
    strategies = [
        Strategy(side=side, horizon=horizon, choices=table)
        for table in _tables(t, side, frozenset({t.initial}), (), horizon)
    ]
    logger.debug("strategies_enumerated", side=side.value, horizon=horizon, count=len(strategies))
    return strategies


# Observations


def observations_for_bob(
    t: Sdfst, xb: Strategy, k: int, alice_strategies: Iterable[Strategy]
) -> set[Observation]:
    """Observations consistent with ``xb`` for some Alice strategy."""
    accepting = set(t.accepting)
    found = set()
    for xa in alice_strategies:
        trace, states = _play(t, xa, xb, k)
        if states[-1] in accepting:
            found.add(bob_view(trace))
    return found


def bob_language(t: Sdfst, k: int) -> set[Observation]:
    """Projection of the length-k language of ``t`` onto Bob's alphabets."""
    frontier: dict[Observation, set[str]] = {(): {t.initial}}
    for _ in range(k):
        nxt: dict[Observation, set[str]] = {}
        for observation, states in frontier.items():
            for q, a, b in product(states, t.alice_in, t.bob_in):
                target, (_, d) = t.step(q, a, b)
                nxt.setdefault(observation + ((b, d),), set()).add(target)
        frontier = nxt
    accepting = set(t.accepting)
    return {obs for obs, states in frontier.items() if states & accepting}


def realizable_observation_set(xs: Iterable[Observation], t: Sdfst) -> bool:
    """
    Whether some Bob strategy is consistent with every observation in ``xs``.

    Each observation must occur in Bob's projection of the language, and no
    two observations may first differ at one of Bob's inputs.
    """
    xs = list(dict.fromkeys(tuple(tuple(step) for step in obs) for obs in xs))
    if not xs:
        return True
    lengths = {len(obs) for obs in xs}
    if len(lengths) > 1:
        raise ObservationLengthError(f"observations have different lengths: {sorted(lengths)}")
    language = bob_language(t, lengths.pop())
    if any(obs not in language for obs in xs):
        return False
    for first, second in combinations(xs, 2):
        for (b1, d1), (b2, d2) in zip(first, second):
            if b1 != b2:
                return False
            if d1 != d2:
                break
    return True


# Brute-force oracles


def induced_channel(
    t: Sdfst, k: int, budget: int = AnalysisDefaults.STRATEGY_BUDGET
) -> InteractiveChannel:
    """Deterministic channel from strategy pairs to length-k observations."""
    validate(t)
    if not t.accepts_everywhere:
        raise InducedChannelError(
            "induced channel needs every state accepting; use leakage_bruteforce instead"
        )
    alice = enumerate_strategies(t, Side.ALICE, k, budget)
    bob = enumerate_strategies(t, Side.BOB, k, budget)
    observations = [tuple(obs) for obs in product(product(t.bob_in, t.bob_out), repeat=k)]
    column = {obs: j for j, obs in enumerate(observations)}
    one, zero = Fraction(1), Fraction(0)
    rows: dict[str, dict[str, tuple[Fraction, ...]]] = {}
    for xb in bob:
        slice_rows = {}
        for xa in alice:
            hit = column[bob_view(run(t, xa, xb, k))]
            slice_rows[xa.label] = tuple(one if j == hit else zero for j in range(len(observations)))
        rows[xb.label] = slice_rows
    return InteractiveChannel(
        alice_inputs=tuple(xa.label for xa in alice),
        bob_inputs=tuple(xb.label for xb in bob),
        outputs=tuple(format_observation(obs) for obs in observations),
        rows=rows,
    )


def leakage_bruteforce(
    t: Sdfst,
    k: int,
    budget: int = AnalysisDefaults.STRATEGY_BUDGET,
    workers: int = AnalysisDefaults.WORKERS,
) -> LeakageResult:
    """
    L_k(T) by enumerating every Alice and Bob strategy.

    The first Bob strategy in canonical order attaining the maximum is the
    witness, whether or not strategies are evaluated in parallel.
    """
    validate(t)
    if k < 0:
        raise HorizonError("horizon must be non-negative")
    alice = enumerate_strategies(t, Side.ALICE, k, budget)
    bob = enumerate_strategies(t, Side.BOB, k, budget)

    def evaluate(xb: Strategy) -> set[Observation]:
        return observations_for_bob(t, xb, k, alice)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sets = list(pool.map(evaluate, bob))
    else:
        sets = [evaluate(xb) for xb in bob]

    best_index, best_size = None, -1
    for i, found in enumerate(sets):
        if len(found) > best_size:
            best_index, best_size = i, len(found)

    witness = bob[best_index] if best_index is not None else None
    observations = tuple(sorted(sets[best_index])) if best_index is not None else ()
    count = max(best_size, 0)
    logger.info(
        "leakage_bruteforce_done",
        horizon=k,
        count=count,
        alice_strategies=len(alice),
        bob_strategies=len(bob),
    )
    return LeakageResult(
        horizon=k,
        count=count,
        bits=log2(count),
        witness=witness,
        observations=observations,
        strategies_examined=len(alice) * len(bob),
    )
