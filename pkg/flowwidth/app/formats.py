"""Line-oriented text formats for transducers, automata and channels."""

import re
from fractions import Fraction
from pathlib import Path

import structlog

from flowwidth.app.exceptions import AutomatonValidationError, InputFormatError
from flowwidth.app.models import (
    ChannelMatrix,
    Distribution,
    InteractiveChannel,
    JointDistribution,
    OrderedNfa,
    Sdfst,
)
from flowwidth.app.services.transducers import validate

logger = structlog.get_logger(__name__)

CORPUS_DIR = Path(__file__).parent / "corpus"

DOCUMENT_KINDS = ("transducer", "nfa", "channel", "ichannel", "joint")

_TRANSDUCER_KEYS = ("alice_in", "bob_in", "alice_out", "bob_out", "states", "initial", "accepting")
_NFA_KEYS = ("inputs", "outputs", "states", "initial", "accepting")
_CHANNEL_KEYS = ("inputs", "outputs")
_CHANNEL_OPTIONAL_KEYS = ("prior",)
_ICHANNEL_KEYS = ("inputs", "bob_inputs", "outputs")

_LETTER = r"([^\s,()]+)"
_TRANSDUCER_LINE = re.compile(
    rf"^(\S+)\s*\(\s*{_LETTER}\s*,\s*{_LETTER}\s*\)\s*->\s*(\S+)\s*\(\s*{_LETTER}\s*,\s*{_LETTER}\s*\)$"
)
_NFA_LINE = re.compile(r"^(\S+)\s+--(\S+)-->\s+(\S+)$")
_ROW_LINE = re.compile(r"^row\s+([^:]+):(.*)$")


def _clean_lines(text: str) -> list[tuple[int, str]]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    return lines


def document_kind(text: str) -> str:
    """Header word of a document: transducer, nfa, channel, ichannel or joint."""
    lines = _clean_lines(text)
    if not lines:
        raise InputFormatError("file is empty")
    lineno, header = lines[0]
    if header not in DOCUMENT_KINDS:
        raise InputFormatError(
            f"unknown header '{header}', expected one of {', '.join(DOCUMENT_KINDS)}", lineno
        )
    return header


def _expect_header(lines: list[tuple[int, str]], kind: str) -> None:
    if not lines:
        raise InputFormatError("file is empty")
    lineno, header = lines[0]
    if header != kind:
        raise InputFormatError(f"expected header '{kind}', found '{header}'", lineno)


class _Fields:
    """Collects ``key: values`` lines, rejecting unknown and repeated keys."""

    def __init__(self, required: tuple[str, ...], optional: tuple[str, ...] = ()):
        self.required = required
        self.optional = optional
        self.values: dict[str, list[str]] = {}
        self.lines: dict[str, int] = {}

    def add(self, lineno: int, line: str) -> None:
        key, _, rest = line.partition(":")
        key = key.strip()
        if key not in self.required and key not in self.optional:
            raise InputFormatError(f"unknown key '{key}'", lineno)
        if key in self.values:
            raise InputFormatError(f"key '{key}' given twice", lineno)
        self.values[key] = rest.split()
        self.lines[key] = lineno

    def finish(self) -> None:
        for key in self.required:
            if key not in self.values:
                raise InputFormatError(f"missing '{key}:' line")

    def single(self, key: str) -> str:
        values = self.values[key]
        if len(values) != 1:
            raise InputFormatError(f"'{key}:' takes exactly one value", self.lines[key])
        return values[0]

    def get(self, key: str) -> tuple[str, ...]:
        return tuple(self.values.get(key, ()))


def _rationals(tokens: list[str], lineno: int) -> tuple[Fraction, ...]:
    values = []
    for token in tokens:
        try:
            values.append(Fraction(token))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputFormatError(f"'{token}' is not a rational number", lineno) from exc
    return tuple(values)


# Transducers


def parse_transducer(text: str) -> Sdfst:
    lines = _clean_lines(text)
    _expect_header(lines, "transducer")
    fields = _Fields(_TRANSDUCER_KEYS)
    delta: dict[tuple[str, str, str], str] = {}
    sigma: dict[tuple[str, str, str], tuple[str, str]] = {}
    cell_lines: dict[tuple[str, str, str], int] = {}
    for lineno, line in lines[1:]:
        match = _TRANSDUCER_LINE.match(line)
        if match:
            q, a, b, target, c, d = match.groups()
            if (q, a, b) in delta:
                raise InputFormatError(
                    f"duplicate transition for state {q} on ({a},{b}), first given on line "
                    f"{cell_lines[(q, a, b)]}",
                    lineno,
                )
            delta[(q, a, b)] = target
            sigma[(q, a, b)] = (c, d)
            cell_lines[(q, a, b)] = lineno
        elif ":" in line:
            fields.add(lineno, line)
        else:
            raise InputFormatError(f"cannot parse '{line}'", lineno)
    fields.finish()

    states = fields.get("states")
    alphabets = {key: set(fields.get(key)) for key in ("alice_in", "bob_in", "alice_out", "bob_out")}
    for (q, a, b), lineno in cell_lines.items():
        c, d = sigma[(q, a, b)]
        target = delta[(q, a, b)]
        for letter, key in ((a, "alice_in"), (b, "bob_in"), (c, "alice_out"), (d, "bob_out")):
            if letter not in alphabets[key]:
                raise InputFormatError(f"letter {letter} is not declared in {key}", lineno)
        for state in (q, target):
            if state not in states:
                raise InputFormatError(f"state {state} is not declared", lineno)

    t = Sdfst(
        states=states,
        initial=fields.single("initial"),
        accepting=fields.get("accepting"),
        alice_in=fields.get("alice_in"),
        bob_in=fields.get("bob_in"),
        alice_out=fields.get("alice_out"),
        bob_out=fields.get("bob_out"),
        delta=delta,
        sigma=sigma,
    )
    validate(t)
    return t


# Automata


def _key_line(key: str, values: tuple[str, ...]) -> str:
    return f"{key}: {' '.join(values)}" if values else f"{key}:"


def parse_nfa(text: str) -> OrderedNfa:
    lines = _clean_lines(text)
    _expect_header(lines, "nfa")
    fields = _Fields(_NFA_KEYS)
    transitions: dict[tuple[str, str], list[str]] = {}
    for lineno, line in lines[1:]:
        match = _NFA_LINE.match(line)
        if match:
            q, letter, target = match.groups()
            targets = transitions.setdefault((q, letter), [])
            if target in targets:
                raise InputFormatError(f"duplicate transition {q} --{letter}--> {target}", lineno)
            targets.append(target)
        elif ":" in line:
            fields.add(lineno, line)
        else:
            raise InputFormatError(f"cannot parse '{line}'", lineno)
    fields.finish()
    return OrderedNfa(
        states=fields.get("states"),
        initial=fields.get("initial"),
        accepting=fields.get("accepting"),
        inputs=fields.get("inputs"),
        outputs=fields.get("outputs"),
        transitions={key: tuple(targets) for key, targets in transitions.items()},
    )


def serialize_nfa(a: OrderedNfa) -> str:
    """Canonical text of ``a``; parse_nfa reads it back to an equal automaton."""
    if a.order is not None:
        raise AutomatonValidationError("only the input-linear, output-discrete order can be written")
    lines = [
        "nfa",
        _key_line("inputs", a.inputs),
        _key_line("outputs", a.outputs),
        _key_line("states", a.states),
        _key_line("initial", a.initial),
        _key_line("accepting", a.accepting),
    ]
    for q in a.states:
        for letter in a.alphabet:
            for target in a.transitions.get((q, letter), ()):
                lines.append(f"{q} --{letter}--> {target}")
    return "\n".join(lines) + "\n"


# Channels


def _parse_rows(
    lines: list[tuple[int, str]], fields: _Fields, labels: int
) -> dict[tuple[str, ...], tuple[Fraction, ...]]:
    rows: dict[tuple[str, ...], tuple[Fraction, ...]] = {}
    for lineno, line in lines[1:]:
        match = _ROW_LINE.match(line)
        if match:
            key = tuple(match.group(1).split())
            if len(key) != labels:
                raise InputFormatError(f"row needs {labels} label(s), found {len(key)}", lineno)
            if key in rows:
                raise InputFormatError(f"row {' '.join(key)} given twice", lineno)
            rows[key] = _rationals(match.group(2).split(), lineno)
        elif ":" in line:
            fields.add(lineno, line)
        else:
            raise InputFormatError(f"cannot parse '{line}'", lineno)
    fields.finish()
    return rows


def parse_channel(text: str) -> tuple[ChannelMatrix, Distribution | None]:
    """A channel matrix and, when a ``prior:`` line is present, its prior."""
    lines = _clean_lines(text)
    _expect_header(lines, "channel")
    fields = _Fields(_CHANNEL_KEYS, _CHANNEL_OPTIONAL_KEYS)
    rows = _parse_rows(lines, fields, 1)
    inputs = fields.get("inputs")
    channel = ChannelMatrix(
        inputs=inputs,
        outputs=fields.get("outputs"),
        rows={key[0]: row for key, row in rows.items()},
    )
    prior = None
    if "prior" in fields.values:
        masses = _rationals(fields.values["prior"], fields.lines["prior"])
        if len(masses) != len(inputs):
            raise InputFormatError("prior needs one mass per input", fields.lines["prior"])
        prior = Distribution(support=inputs, mass=dict(zip(inputs, masses)))
    return channel, prior


def parse_ichannel(text: str) -> InteractiveChannel:
    lines = _clean_lines(text)
    _expect_header(lines, "ichannel")
    fields = _Fields(_ICHANNEL_KEYS)
    rows = _parse_rows(lines, fields, 2)
    nested: dict[str, dict[str, tuple[Fraction, ...]]] = {}
    for (xa, xb), row in rows.items():
        nested.setdefault(xb, {})[xa] = row
    return InteractiveChannel(
        alice_inputs=fields.get("inputs"),
        bob_inputs=fields.get("bob_inputs"),
        outputs=fields.get("outputs"),
        rows=nested,
    )


def parse_joint(text: str) -> JointDistribution:
    lines = _clean_lines(text)
    _expect_header(lines, "joint")
    fields = _Fields(_CHANNEL_KEYS)
    rows = _parse_rows(lines, fields, 1)
    return JointDistribution(
        xs=fields.get("inputs"),
        ys=fields.get("outputs"),
        rows={key[0]: row for key, row in rows.items()},
    )


# Files and bundled examples


def read_document(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror}") from exc


def list_examples() -> list[str]:
    return sorted(p.name for p in CORPUS_DIR.iterdir() if p.is_file() and not p.name.startswith("_"))


def example_path(name: str) -> Path:
    """
    Path of a bundled example file.

    Raises:
        InputFormatError: If no example has that name
    """
    path = CORPUS_DIR / name
    if not path.is_file():
        raise InputFormatError(f"no bundled example named {name}")
    return path


def load_example(name: str) -> str:
    return example_path(name).read_text(encoding="utf-8")
