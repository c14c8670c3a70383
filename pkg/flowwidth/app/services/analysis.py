"""Command business logic - shared by every CLI subcommand."""

import structlog

from flowwidth.app.config import AnalysisConfig
from flowwidth.app.exceptions import EnumerationBudgetError, InputFormatError
from flowwidth.app.formats import (
    document_kind,
    parse_channel,
    parse_ichannel,
    parse_joint,
    parse_nfa,
    parse_transducer,
    read_document,
    serialize_nfa,
)
from flowwidth.app.models import (
    CapacityReport,
    LeakageSummary,
    OracleComparison,
    OrderedNfa,
    Sdfst,
)
from flowwidth.app.services import channels
from flowwidth.app.services.channels import log2
from flowwidth.app.services.classifier import classify_capacity, trim
from flowwidth.app.services.reduction import build_observer_nfa
from flowwidth.app.services.transducers import leakage_bruteforce
from flowwidth.app.services.width import WidthProfile, width_bruteforce

logger = structlog.get_logger(__name__)


def _require_path(config: AnalysisConfig) -> str:
    if config.input_path is None:
        raise InputFormatError("no input file given")
    return read_document(config.input_path)


def load_transducer(config: AnalysisConfig) -> Sdfst:
    """Read and parse the transducer named by ``config.input_path``."""
    text = _require_path(config)
    kind = document_kind(text)
    if kind != "transducer":
        raise InputFormatError(f"expected a transducer file, found '{kind}'")
    return parse_transducer(text)


def load_automaton(config: AnalysisConfig) -> OrderedNfa:
    """Observer automaton of a transducer file, or an NFA file as written."""
    text = _require_path(config)
    kind = document_kind(text)
    if kind == "transducer":
        return build_observer_nfa(parse_transducer(text))
    if kind == "nfa":
        return parse_nfa(text)
    raise InputFormatError(f"expected a transducer or nfa file, found '{kind}'")


def analyze(config: AnalysisConfig) -> CapacityReport:
    """Classify the leakage growth of a transducer file."""
    t = load_transducer(config)
    logger.info("analysis_started", path=str(config.input_path), states=len(t.states))
    return classify_capacity(t, config)


def width_table(config: AnalysisConfig) -> list[tuple[int, int]]:
    """w(L_=n) for even n up to ``config.n_max``."""
    a = trim(load_automaton(config))
    profile = WidthProfile(a, config.state_budget)
    return profile.table(range(2, config.n_max + 1, 2))


def reduce_to_nfa(config: AnalysisConfig) -> str:
    """Text of the trimmed observer automaton."""
    return serialize_nfa(trim(build_observer_nfa(load_transducer(config))))


def oracle(config: AnalysisConfig) -> OracleComparison:
    """
    Brute-force L_k(T) next to log2 of the observer width at length 2k.

    When level 2k has at most ``config.enumeration_cap`` words, its Dilworth
    width is reported as a third opinion.
    """
    t = load_transducer(config)
    k = config.horizon
    result = leakage_bruteforce(t, k, config.strategy_budget, config.workers)
    observer = trim(build_observer_nfa(t))
    width = WidthProfile(observer, config.state_budget).width(2 * k)
    try:
        dilworth = width_bruteforce(observer, 2 * k, config.enumeration_cap)
    except EnumerationBudgetError:
        dilworth = None
    comparison = OracleComparison(
        horizon=k,
        bruteforce_count=result.count,
        bruteforce_bits=result.bits,
        width=width,
        width_bits=log2(width),
        witness=result.witness.label if result.witness is not None else None,
        dilworth_width=dilworth,
    )
    if not comparison.equal:
        logger.warning(
            "oracle_mismatch", count=result.count, width=width, dilworth=dilworth, horizon=k
        )
    return comparison


def leakage(config: AnalysisConfig) -> LeakageSummary:
    """Capacity and related figures for a channel, ichannel or joint file."""
    text = _require_path(config)
    kind = document_kind(text)
    if kind == "channel":
        channel, prior = parse_channel(text)
        return LeakageSummary(
            kind=kind,
            capacity_bits=channels.min_entropy_capacity(channel),
            leakage_bits=channels.min_entropy_leakage(prior, channel) if prior else None,
        )
    if kind == "ichannel":
        ch = parse_ichannel(text)
        capacity = channels.interactive_capacity_pure_bob(ch)
        deterministic = (
            channels.deterministic_interactive_capacity(ch).bits if ch.is_deterministic else None
        )
        return LeakageSummary(
            kind=kind,
            capacity_bits=capacity.bits,
            witness=capacity.witness,
            deterministic_bits=deterministic,
        )
    if kind == "joint":
        joint = parse_joint(text)
        prior, channel = joint.conditional()
        return LeakageSummary(
            kind=kind,
            capacity_bits=channels.min_entropy_capacity(channel),
            leakage_bits=channels.min_entropy_leakage(prior, channel),
            dalenius_bits=channels.dalenius_leakage(joint),
        )
    raise InputFormatError(f"expected a channel, ichannel or joint file, found '{kind}'")
