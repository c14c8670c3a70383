"""Bob's observer automaton of an SDFST and the flattening of observations."""

import structlog

from flowwidth.app.exceptions import AlphabetCollisionError, AutomatonValidationError
from flowwidth.app.models import Observation, OrderedNfa, Sdfst, Word
from flowwidth.app.services.transducers import validate

logger = structlog.get_logger(__name__)


def aux_state(q: str, d: str) -> str:
    """Name of the state that has just seen Bob's output ``d`` before returning to ``q``."""
    return f"({q},{d})"


def build_observer_nfa(t: Sdfst, materialize_all: bool = False) -> OrderedNfa:
    """
    Automaton over Bob's letters accepting his flattened view of L(T).

    From q on Bob input b there is a move to (delta(q,(a,b)), d) for every
    Alice input a, where d is Bob's output; that state reads d and returns
    to delta(q,(a,b)). Alice is abstracted by nondeterminism.

    Auxiliary states are created only when some transition enters them,
    unless ``materialize_all`` is set.
    """
    validate(t)
    clash = set(t.bob_in) & set(t.bob_out)
    if clash:
        raise AlphabetCollisionError(
            f"Bob's input and output alphabets share {' '.join(sorted(clash))}; rename the letters"
        )

    transitions: dict[tuple[str, str], tuple[str, ...]] = {}
    entered: set[tuple[str, str]] = set()
    for q in t.states:
        for b in t.bob_in:
            targets: dict[str, None] = {}
            for a in t.alice_in:
                target, (_, d) = t.step(q, a, b)
                targets[aux_state(target, d)] = None
                entered.add((target, d))
            transitions[(q, b)] = tuple(targets)

    aux = [
        (q, d)
        for q in t.states
        for d in t.bob_out
        if materialize_all or (q, d) in entered
    ]
    names = set(t.states)
    for q, d in aux:
        name = aux_state(q, d)
        if name in names:
            raise AutomatonValidationError(f"state name {name} clashes with an auxiliary state")
        names.add(name)
        transitions[(name, d)] = (q,)

    nfa = OrderedNfa(
        states=t.states + tuple(aux_state(q, d) for q, d in aux),
        initial=(t.initial,),
        accepting=t.accepting,
        inputs=t.bob_in,
        outputs=t.bob_out,
        transitions=transitions,
    )
    logger.info("observer_nfa_built", states=len(nfa.states), transitions=len(transitions))
    return nfa


def flatten(w: Observation) -> Word:
    """(b1,d1)...(bk,dk) becomes b1 d1 ... bk dk."""
    return tuple(letter for step in w for letter in step)


def reorder_inputs(a: OrderedNfa, inputs: tuple[str, ...]) -> OrderedNfa:
    """Same automaton with the linear order on inputs given by ``inputs``."""
    if sorted(inputs) != sorted(a.inputs):
        raise AutomatonValidationError("new input order must be a permutation of the inputs")
    return OrderedNfa(
        states=a.states,
        initial=a.initial,
        accepting=a.accepting,
        inputs=tuple(inputs),
        outputs=a.outputs,
        transitions=a.transitions,
    )
