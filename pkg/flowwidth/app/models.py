"""Pydantic models for channels, transducers, automata and analysis reports."""

from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Annotated, Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, model_validator

from flowwidth.app.exceptions import (
    AlphabetCollisionError,
    AutomatonValidationError,
    ChannelValidationError,
    FlowwidthException,
    HorizonError,
    PosetValidationError,
    StrategyDomainError,
)


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ChannelValidationError(f"not a probability: {value!r}")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ChannelValidationError(f"not a rational number: {value!r}") from exc


Rational = Annotated[Fraction, BeforeValidator(_to_fraction)]

Word = tuple[str, ...]
# One step of an interaction seen by one party: (own input, own output)
Move = tuple[str, str]
History = tuple[Move, ...]
# Bob's view of k steps: ((b1, d1), ..., (bk, dk))
Observation = tuple[Move, ...]
# ((alice input, bob input), (alice output, bob output))
TraceStep = tuple[tuple[str, str], tuple[str, str]]
Trace = tuple[TraceStep, ...]


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def _check_distinct(labels: tuple[str, ...], what: str, error: type[FlowwidthException]) -> None:
    if len(set(labels)) != len(labels):
        raise error(f"{what} labels are not distinct: {' '.join(labels)}")


def _check_row(row: tuple[Fraction, ...], width: int, where: str) -> None:
    if len(row) != width:
        raise ChannelValidationError(f"{where} has {len(row)} entries, expected {width}")
    if any(p < 0 or p > 1 for p in row):
        raise ChannelValidationError(f"{where} has an entry outside [0, 1]")
    if sum(row) != 1:
        raise ChannelValidationError(f"{where} sums to {sum(row)}, not 1")


# Channel Models


class Distribution(FrozenModel):
    """Finite distribution with exact rational masses."""

    support: tuple[str, ...]
    mass: dict[str, Rational]

    @model_validator(mode="after")
    def _check(self) -> "Distribution":
        _check_distinct(self.support, "distribution", ChannelValidationError)
        if set(self.mass) != set(self.support):
            raise ChannelValidationError("distribution masses do not match its support")
        if any(p < 0 for p in self.mass.values()):
            raise ChannelValidationError("distribution has a negative mass")
        if sum(self.mass.values()) != 1:
            raise ChannelValidationError(
                f"distribution masses sum to {sum(self.mass.values())}, not 1"
            )
        return self

    @classmethod
    def uniform(cls, labels: tuple[str, ...] | list[str]) -> "Distribution":
        labels = tuple(labels)
        if not labels:
            raise ChannelValidationError("uniform distribution over an empty set")
        return cls(support=labels, mass={x: Fraction(1, len(labels)) for x in labels})

    @classmethod
    def point(cls, labels: tuple[str, ...] | list[str], at: str) -> "Distribution":
        return cls(support=tuple(labels), mass={x: Fraction(int(x == at)) for x in labels})

    @classmethod
    def from_weights(cls, labels: tuple[str, ...] | list[str], weights: list[Any]) -> "Distribution":
        """Normalize non-negative weights into a distribution."""
        weights = [_to_fraction(w) for w in weights]
        total = sum(weights)
        if total <= 0:
            raise ChannelValidationError("weights have no positive mass")
        return cls(support=tuple(labels), mass={x: w / total for x, w in zip(labels, weights)})

    def p(self, label: str) -> Fraction:
        return self.mass.get(label, Fraction(0))


class ChannelMatrix(FrozenModel):
    """Stochastic matrix p(y|x); rows are aligned with ``outputs``."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    rows: dict[str, tuple[Rational, ...]]

    @model_validator(mode="after")
    def _check(self) -> "ChannelMatrix":
        if not self.inputs:
            raise ChannelValidationError("channel has no inputs")
        _check_distinct(self.inputs, "input", ChannelValidationError)
        _check_distinct(self.outputs, "output", ChannelValidationError)
        if set(self.rows) != set(self.inputs):
            raise ChannelValidationError("channel rows do not match its inputs")
        for x in self.inputs:
            _check_row(self.rows[x], len(self.outputs), f"row {x}")
        return self

    def entry(self, x: str, y: str) -> Fraction:
        return self.rows[x][self.outputs.index(y)]

    def column(self, j: int) -> list[Fraction]:
        return [self.rows[x][j] for x in self.inputs]


class JointDistribution(FrozenModel):
    """Joint distribution of (X, Y); rows are aligned with ``ys``."""

    xs: tuple[str, ...]
    ys: tuple[str, ...]
    rows: dict[str, tuple[Rational, ...]]

    @model_validator(mode="after")
    def _check(self) -> "JointDistribution":
        _check_distinct(self.xs, "input", ChannelValidationError)
        _check_distinct(self.ys, "output", ChannelValidationError)
        if set(self.rows) != set(self.xs):
            raise ChannelValidationError("joint rows do not match its inputs")
        for x in self.xs:
            row = self.rows[x]
            if len(row) != len(self.ys):
                raise ChannelValidationError(f"joint row {x} has the wrong length")
            if any(p < 0 for p in row):
                raise ChannelValidationError(f"joint row {x} has a negative mass")
        total = sum(sum(row) for row in self.rows.values())
        if total != 1:
            raise ChannelValidationError(f"joint masses sum to {total}, not 1")
        return self

    def marginal_x(self) -> Distribution:
        return Distribution(support=self.xs, mass={x: sum(self.rows[x]) for x in self.xs})

    def marginal_y(self) -> Distribution:
        return Distribution(
            support=self.ys,
            mass={y: sum(self.rows[x][j] for x in self.xs) for j, y in enumerate(self.ys)},
        )

    def conditional(self) -> tuple[Distribution, ChannelMatrix]:
        """
        Split into a prior and p(y|x), restricted to supported inputs and outputs.

        Rows of inputs with zero mass are undefined and dropped, as are outputs
        with zero marginal mass.
        """
        px = self.marginal_x()
        py = self.marginal_y()
        xs = tuple(x for x in self.xs if px.p(x) > 0)
        kept = [j for j, y in enumerate(self.ys) if py.p(y) > 0]
        prior = Distribution(support=xs, mass={x: px.p(x) for x in xs})
        channel = ChannelMatrix(
            inputs=xs,
            outputs=tuple(self.ys[j] for j in kept),
            rows={x: tuple(self.rows[x][j] / px.p(x) for j in kept) for x in xs},
        )
        return prior, channel


class InteractiveChannel(FrozenModel):
    """Matrix p(y | x_A, x_B) stored as rows[x_B][x_A], aligned with ``outputs``."""

    alice_inputs: tuple[str, ...]
    bob_inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    rows: dict[str, dict[str, tuple[Rational, ...]]]

    @model_validator(mode="after")
    def _check(self) -> "InteractiveChannel":
        if not self.alice_inputs or not self.bob_inputs:
            raise ChannelValidationError("interactive channel needs alice and bob inputs")
        _check_distinct(self.alice_inputs, "alice input", ChannelValidationError)
        _check_distinct(self.bob_inputs, "bob input", ChannelValidationError)
        _check_distinct(self.outputs, "output", ChannelValidationError)
        if set(self.rows) != set(self.bob_inputs):
            raise ChannelValidationError("interactive channel slices do not match bob inputs")
        for xb in self.bob_inputs:
            if set(self.rows[xb]) != set(self.alice_inputs):
                raise ChannelValidationError(f"slice {xb} rows do not match alice inputs")
            for xa in self.alice_inputs:
                _check_row(self.rows[xb][xa], len(self.outputs), f"row {xa} {xb}")
        return self

    @cached_property
    def is_deterministic(self) -> bool:
        return all(
            p in (0, 1) for slice_rows in self.rows.values() for row in slice_rows.values() for p in row
        )

    def slice(self, xb: str) -> ChannelMatrix:
        """Channel from Alice's input to the output when Bob plays ``xb``."""
        return ChannelMatrix(inputs=self.alice_inputs, outputs=self.outputs, rows=self.rows[xb])


class GainFunction(FrozenModel):
    """Gain g(w, x) in [0, 1]; rows are aligned with ``secrets``."""

    guesses: tuple[str, ...]
    secrets: tuple[str, ...]
    rows: dict[str, tuple[Rational, ...]]

    @model_validator(mode="after")
    def _check(self) -> "GainFunction":
        _check_distinct(self.guesses, "guess", ChannelValidationError)
        _check_distinct(self.secrets, "secret", ChannelValidationError)
        if set(self.rows) != set(self.guesses):
            raise ChannelValidationError("gain rows do not match its guesses")
        for w in self.guesses:
            row = self.rows[w]
            if len(row) != len(self.secrets) or any(g < 0 or g > 1 for g in row):
                raise ChannelValidationError(f"gain row {w} is not a vector in [0, 1]")
        return self

    @classmethod
    def identity(cls, secrets: tuple[str, ...]) -> "GainFunction":
        return cls(
            guesses=secrets,
            secrets=secrets,
            rows={w: tuple(Fraction(int(w == x)) for x in secrets) for w in secrets},
        )

    def gain(self, w: str, x: str) -> Fraction:
        return self.rows[w][self.secrets.index(x)]


class InteractiveCapacity(FrozenModel):
    """Capacity of an interactive channel and the Bob input achieving it."""

    ratio: Rational
    bits: float
    witness: str


# Transducer Models


class Side(str, Enum):
    ALICE = "alice"
    BOB = "bob"


class Sdfst(FrozenModel):
    """
    Synchronised deterministic finite-state transducer.

    ``delta`` and ``sigma`` are keyed by (state, alice input, bob input);
    ``sigma`` yields (alice output, bob output). Totality is checked by
    ``services.transducers.validate`` so that partial machines can still be
    loaded and reported on.
    """

    states: tuple[str, ...]
    initial: str
    accepting: tuple[str, ...]
    alice_in: tuple[str, ...]
    bob_in: tuple[str, ...]
    alice_out: tuple[str, ...]
    bob_out: tuple[str, ...]
    delta: dict[tuple[str, str, str], str]
    sigma: dict[tuple[str, str, str], tuple[str, str]]

    @property
    def accepts_everywhere(self) -> bool:
        return set(self.accepting) == set(self.states)

    def inputs_of(self, side: Side) -> tuple[str, ...]:
        return self.alice_in if side is Side.ALICE else self.bob_in

    def outputs_of(self, side: Side) -> tuple[str, ...]:
        return self.alice_out if side is Side.ALICE else self.bob_out

    def step(self, state: str, a: str, b: str) -> tuple[str, tuple[str, str]]:
        return self.delta[(state, a, b)], self.sigma[(state, a, b)]


class Strategy(FrozenModel):
    """
    Deterministic strategy of one party up to a finite horizon.

    ``choices`` maps the party's own history of (input, output) moves to its
    next input. A ``default`` letter answers every history not in the table.
    """

    side: Side
    horizon: int = Field(..., ge=0)
    choices: dict[History, str] = Field(default_factory=dict)
    default: str | None = None

    @classmethod
    def constant(cls, side: Side, letter: str, horizon: int) -> "Strategy":
        return cls(side=side, horizon=horizon, default=letter)

    def choose(self, history: History) -> str:
        if len(history) >= self.horizon:
            raise HorizonError(
                f"{self.side.value} strategy has horizon {self.horizon}, asked at step {len(history) + 1}"
            )
        letter = self.choices.get(history, self.default)
        if letter is None:
            raise StrategyDomainError(
                f"{self.side.value} strategy has no choice after {format_history(history)}"
            )
        return letter

    @cached_property
    def label(self) -> str:
        """Canonical text form, stable across runs."""
        parts = [f"{format_history(h)}>{x}" for h, x in sorted(self.choices.items())]
        if self.default is not None:
            parts.append(f"*>{self.default}")
        return ";".join(parts) or "-"


def format_history(history: History) -> str:
    if not history:
        return "-"
    return ".".join(f"{x}/{y}" for x, y in history)


def format_observation(observation: Observation) -> str:
    return "".join(f"({b},{d})" for b, d in observation)


class LeakageResult(FrozenModel):
    """Exact L_k(T) by enumeration, with a maximizing Bob strategy."""

    horizon: int
    count: int
    bits: float
    witness: Strategy | None
    observations: tuple[Observation, ...]
    strategies_examined: int


# Automaton Models


class LexOutcome(str, Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


class LetterPoset(FrozenModel):
    """Strict partial order on letters; ``relation`` holds pairs (x, y) with x < y."""

    letters: tuple[str, ...]
    relation: frozenset[tuple[str, str]] = frozenset()

    @model_validator(mode="after")
    def _check(self) -> "LetterPoset":
        _check_distinct(self.letters, "poset", PosetValidationError)
        known = set(self.letters)
        for x, y in self.relation:
            if x not in known or y not in known:
                raise PosetValidationError(f"relation mentions unknown letter in ({x}, {y})")
            if x == y:
                raise PosetValidationError(f"relation is not irreflexive at {x}")
        for x, y in self.relation:
            for y2, z in self.relation:
                if y == y2 and (x, z) not in self.relation:
                    raise PosetValidationError(
                        f"relation is not transitive: {x} < {y} < {z} but not {x} < {z}"
                    )
        return self

    @classmethod
    def linear_discrete(
        cls, inputs: tuple[str, ...], outputs: tuple[str, ...]
    ) -> "LetterPoset":
        """Inputs ordered by position, outputs incomparable to everything."""
        relation = frozenset(
            (inputs[i], inputs[j]) for i in range(len(inputs)) for j in range(i + 1, len(inputs))
        )
        return cls(letters=inputs + outputs, relation=relation)

    def less(self, x: str, y: str) -> bool:
        return (x, y) in self.relation

    def comparable(self, x: str, y: str) -> bool:
        return x == y or (x, y) in self.relation or (y, x) in self.relation

    @cached_property
    def isolated(self) -> tuple[str, ...]:
        """Letters comparable to no other letter."""
        touched = {x for pair in self.relation for x in pair}
        return tuple(x for x in self.letters if x not in touched)

    @cached_property
    def non_isolated_is_chain(self) -> bool:
        rest = [x for x in self.letters if x not in set(self.isolated)]
        return all(self.comparable(x, y) for x, y in product(rest, rest))


class OrderedNfa(FrozenModel):
    """
    NFA over Bob's inputs (linearly ordered by position) and outputs (discrete).

    ``order`` replaces the default letter order with an arbitrary poset over
    ``inputs + outputs``.
    """

    states: tuple[str, ...]
    initial: tuple[str, ...]
    accepting: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    transitions: dict[tuple[str, str], tuple[str, ...]] = Field(default_factory=dict)
    order: LetterPoset | None = None

    @model_validator(mode="after")
    def _check(self) -> "OrderedNfa":
        clash = set(self.inputs) & set(self.outputs)
        if clash:
            raise AlphabetCollisionError(
                f"letters used as both input and output: {' '.join(sorted(clash))}"
            )
        _check_distinct(self.states, "state", AutomatonValidationError)
        _check_distinct(self.inputs + self.outputs, "letter", AutomatonValidationError)
        known = set(self.states)
        letters = set(self.inputs) | set(self.outputs)
        for q in self.initial + self.accepting:
            if q not in known:
                raise AutomatonValidationError(f"unknown state {q}")
        for (q, x), targets in self.transitions.items():
            if q not in known or any(t not in known for t in targets):
                raise AutomatonValidationError(f"transition on {x} from {q} uses an unknown state")
            if x not in letters:
                raise AutomatonValidationError(f"transition from {q} uses unknown letter {x}")
        if self.order is not None and set(self.order.letters) != letters:
            raise AutomatonValidationError("letter order does not cover the alphabet")
        return self

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    @cached_property
    def poset(self) -> LetterPoset:
        return self.order or LetterPoset.linear_discrete(self.inputs, self.outputs)

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    def successors(self, states: frozenset[str], letter: str) -> frozenset[str]:
        return frozenset(
            target for q in states for target in self.transitions.get((q, letter), ())
        )


# Classifier Models


class GrowthKind(str, Enum):
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"


class Verdict(str, Enum):
    LOGARITHMIC = "logarithmic"
    LINEAR = "linear"


class ExponentialWitness(FrozenModel):
    """Two equal-length cycles at ``state`` whose first difference is incomparable."""

    state: str
    u: Word
    v: Word

    @model_validator(mode="after")
    def _check(self) -> "ExponentialWitness":
        if len(self.u) != len(self.v) or not self.u:
            raise AutomatonValidationError("witness words must have the same positive length")
        if self.u == self.v:
            raise AutomatonValidationError("witness words must differ")
        return self


class GrowthClass(FrozenModel):
    kind: GrowthKind
    order: int | None = Field(None, ge=0)
    witness: ExponentialWitness | None = None

    @model_validator(mode="after")
    def _check(self) -> "GrowthClass":
        if (self.kind is GrowthKind.POLYNOMIAL) != (self.order is not None):
            raise AutomatonValidationError("growth order is present iff growth is polynomial")
        if self.kind is GrowthKind.POLYNOMIAL and self.witness is not None:
            raise AutomatonValidationError("polynomial growth carries no exponential witness")
        return self


class FitCheck(FrozenModel):
    """Doubling-ratio comparison between a claimed order and computed widths."""

    order: int
    lengths: tuple[int, ...] = ()
    widths: tuple[int, ...] = ()
    ratios: tuple[float, ...] = ()
    max_length: int = 0
    finite: bool = False
    passed: bool


class DilworthCertificate(FrozenModel):
    """A maximum antichain and a chain cover of the same size."""

    antichain: tuple[Word, ...]
    chains: tuple[tuple[Word, ...], ...]

    @property
    def width(self) -> int:
        return len(self.antichain)


class CapacityReport(FrozenModel):
    verdict: Verdict
    order: int | None
    growth: GrowthClass
    witness: ExponentialWitness | None
    width_table: tuple[tuple[int, int], ...]
    fit: FitCheck | None
    timings: dict[str, float] = Field(default_factory=dict)
    states: int

    @property
    def bounded(self) -> bool:
        return self.verdict is Verdict.LOGARITHMIC and self.order == 0


# CLI Result Models


class OracleComparison(FrozenModel):
    horizon: int
    bruteforce_count: int
    bruteforce_bits: float
    width: int
    width_bits: float
    witness: str | None
    # Dilworth width of the enumerated level, when it fits the enumeration cap
    dilworth_width: int | None = None

    @property
    def equal(self) -> bool:
        if self.dilworth_width is not None and self.dilworth_width != self.width:
            return False
        return self.bruteforce_count == self.width


class LeakageSummary(FrozenModel):
    """Figures reported for a channel, interactive channel or joint file."""

    kind: str
    capacity_bits: float
    leakage_bits: float | None = None
    dalenius_bits: float | None = None
    witness: str | None = None
    deterministic_bits: float | None = None

