"""Pytest configuration and fixtures."""

import random
from fractions import Fraction
from itertools import product

import pytest

from flowwidth.app.formats import load_example, parse_nfa, parse_transducer
from flowwidth.app.logger import setup_logging
from flowwidth.app.models import (
    ChannelMatrix,
    InteractiveChannel,
    JointDistribution,
    LetterPoset,
    OrderedNfa,
    Sdfst,
)
from flowwidth.app.services.reduction import build_observer_nfa

TRANSDUCER_EXAMPLES = (
    "relay.t",
    "interrupt.t",
    "switch.t",
    "silent.t",
    "guarded_relay.t",
    "toggle.t",
)


@pytest.fixture(scope="session", autouse=True)
def configure_logging():
    """Route structlog through stdlib logging before any logger is cached."""
    setup_logging(log_level="WARNING", environment="development")


@pytest.fixture
def load_transducer():
    """Parse a bundled transducer example by file name."""

    def load(name: str) -> Sdfst:
        return parse_transducer(load_example(name))

    return load


@pytest.fixture
def relay(load_transducer) -> Sdfst:
    return load_transducer("relay.t")


@pytest.fixture
def interrupt(load_transducer) -> Sdfst:
    return load_transducer("interrupt.t")


@pytest.fixture
def switch(load_transducer) -> Sdfst:
    return load_transducer("switch.t")


@pytest.fixture
def silent(load_transducer) -> Sdfst:
    return load_transducer("silent.t")


@pytest.fixture
def guarded_relay(load_transducer) -> Sdfst:
    return load_transducer("guarded_relay.t")


@pytest.fixture
def toggle(load_transducer) -> Sdfst:
    return load_transducer("toggle.t")


@pytest.fixture
def relay_nfa(relay) -> OrderedNfa:
    return build_observer_nfa(relay)


@pytest.fixture
def interrupt_nfa(interrupt) -> OrderedNfa:
    return build_observer_nfa(interrupt)


@pytest.fixture
def empty_nfa() -> OrderedNfa:
    """Automaton whose only accepting state is unreachable."""
    return parse_nfa(
        "nfa\n"
        "inputs: a\n"
        "outputs: x\n"
        "states: p r\n"
        "initial: p\n"
        "accepting: r\n"
        "p --a--> p\n"
    )


@pytest.fixture
def corpus_path(tmp_path):
    """Copy a bundled example into a temporary file and return its path."""

    def copy(name: str):
        path = tmp_path / name
        path.write_text(load_example(name), encoding="utf-8")
        return path

    return copy


# Random instance builders


def random_sdfst(
    rng: random.Random, max_states: int = 3, all_accepting: bool = False
) -> Sdfst:
    """Random total SDFST with every alphabet of size 2."""
    states = tuple(f"q{i}" for i in range(rng.randint(1, max_states)))
    alice_in, bob_in = ("a", "b"), ("c", "d")
    alice_out, bob_out = ("o", "p"), ("x", "y")
    delta = {}
    sigma = {}
    for q, a, b in product(states, alice_in, bob_in):
        delta[(q, a, b)] = rng.choice(states)
        sigma[(q, a, b)] = (rng.choice(alice_out), rng.choice(bob_out))
    accepting = tuple(q for q in states if rng.random() < 0.7) or (states[0],)
    if all_accepting:
        accepting = states
    return Sdfst(
        states=states,
        initial=states[0],
        accepting=accepting,
        alice_in=alice_in,
        bob_in=bob_in,
        alice_out=alice_out,
        bob_out=bob_out,
        delta=delta,
        sigma=sigma,
    )


def random_poset(rng: random.Random, letters: tuple[str, ...]) -> LetterPoset:
    """Transitive closure of random edges along a shuffled order of ``letters``."""
    order = list(letters)
    rng.shuffle(order)
    relation = {
        (order[i], order[j])
        for i in range(len(order))
        for j in range(i + 1, len(order))
        if rng.random() < 0.4
    }
    changed = True
    while changed:
        extra = {(x, z) for x, y in relation for y2, z in relation if y == y2} - relation
        relation |= extra
        changed = bool(extra)
    return LetterPoset(letters=letters, relation=frozenset(relation))


def random_nfa(rng: random.Random, density: float = 0.3) -> OrderedNfa:
    """Random NFA with at most 4 states and 4 letters under a random poset."""
    states = tuple(f"s{i}" for i in range(rng.randint(1, 4)))
    letters = ("a", "b", "c", "d")[: rng.randint(1, 4)]
    split = rng.randint(0, len(letters))
    inputs, outputs = letters[:split], letters[split:]
    transitions = {}
    for q, x in product(states, letters):
        targets = tuple(t for t in states if rng.random() < density)
        if targets:
            transitions[(q, x)] = targets
    accepting = tuple(q for q in states if rng.random() < 0.5) or (states[-1],)
    return OrderedNfa(
        states=states,
        initial=(states[0],),
        accepting=accepting,
        inputs=inputs,
        outputs=outputs,
        transitions=transitions,
        order=random_poset(rng, letters),
    )


def random_row(rng: random.Random, width: int, denominator: int = 12) -> tuple[Fraction, ...]:
    """Random stochastic row with entries that are multiples of 1/denominator."""
    cuts = sorted(rng.randint(0, denominator) for _ in range(width - 1))
    bounds = [0, *cuts, denominator]
    return tuple(Fraction(bounds[i + 1] - bounds[i], denominator) for i in range(width))


def random_channel(rng: random.Random, n_inputs: int = 3, n_outputs: int = 4) -> ChannelMatrix:
    inputs = tuple(f"x{i}" for i in range(n_inputs))
    return ChannelMatrix(
        inputs=inputs,
        outputs=tuple(f"y{j}" for j in range(n_outputs)),
        rows={x: random_row(rng, n_outputs) for x in inputs},
    )


def random_joint(rng: random.Random, n_xs: int = 3, n_ys: int = 3) -> JointDistribution:
    cells = random_row(rng, n_xs * n_ys, denominator=24)
    xs = tuple(f"x{i}" for i in range(n_xs))
    return JointDistribution(
        xs=xs,
        ys=tuple(f"y{j}" for j in range(n_ys)),
        rows={x: cells[i * n_ys : (i + 1) * n_ys] for i, x in enumerate(xs)},
    )


def random_ichannel(
    rng: random.Random, deterministic: bool = False, size: int = 3
) -> InteractiveChannel:
    alice = tuple(f"a{i}" for i in range(size))
    bob = tuple(f"b{i}" for i in range(size))
    outputs = tuple(f"y{j}" for j in range(size))

    def row() -> tuple[Fraction, ...]:
        if deterministic:
            hit = rng.randrange(size)
            return tuple(Fraction(int(j == hit)) for j in range(size))
        return random_row(rng, size)

    return InteractiveChannel(
        alice_inputs=alice,
        bob_inputs=bob,
        outputs=outputs,
        rows={xb: {xa: row() for xa in alice} for xb in bob},
    )
