"""Custom exceptions and error handlers."""

import structlog
import typer

from flowwidth.app.constants import ExitCode

logger = structlog.get_logger(__name__)


class FlowwidthException(Exception):
    """Base exception for flowwidth errors."""

    def __init__(self, message: str, exit_code: int = ExitCode.INPUT_ERROR):
        self.message = message
        self.exit_code = exit_code
        super().__init__(message)


# Input and invariant errors


class InputFormatError(FlowwidthException):
    """A text file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TransducerValidationError(FlowwidthException):
    """An SDFST violates totality, state or output invariants."""


class ChannelValidationError(FlowwidthException):
    """A distribution, channel or gain function is malformed."""


class AutomatonValidationError(FlowwidthException):
    """An ordered NFA references unknown states or letters."""


class PosetValidationError(FlowwidthException):
    """A letter relation is not a strict partial order."""


class AlphabetCollisionError(FlowwidthException):
    """Bob's input and output alphabets share a letter."""


class UnknownLetterError(FlowwidthException):
    """A word uses a letter outside the poset."""


# Precondition errors


class NotDeterministicError(FlowwidthException):
    """An interactive channel has entries outside {0, 1}."""


class UndefinedLeakageError(FlowwidthException):
    """Prior vulnerability is zero, so the leakage ratio is undefined."""


class HorizonError(FlowwidthException):
    """A strategy was asked to play beyond its horizon."""


class StrategyDomainError(FlowwidthException):
    """A strategy has no choice for the queried history."""


class InducedChannelError(FlowwidthException):
    """The induced channel is only stochastic when every state accepts."""


class ObservationLengthError(FlowwidthException):
    """Observations in one set have different lengths."""


# Budget errors


class BudgetExceededError(FlowwidthException):
    """A configured resource budget was exceeded; no number is reported."""

    def __init__(self, message: str):
        super().__init__(message, exit_code=ExitCode.BUDGET_EXCEEDED)


class StrategyBudgetError(BudgetExceededError):
    """Too many strategies to enumerate."""


class DeterminizationOverflowError(BudgetExceededError):
    """Subset construction produced more states than allowed."""


class EnumerationBudgetError(BudgetExceededError):
    """A language level is too large to enumerate."""


class TimeBudgetError(BudgetExceededError):
    """Width evaluation did not reach the minimum length in time."""


class ClassificationInconsistencyError(FlowwidthException):
    """The gadget order disagrees with the observed width ratios."""

    def __init__(self, message: str, gadget_order: int | None, observed_ratios: list[float]):
        self.gadget_order = gadget_order
        self.observed_ratios = observed_ratios
        super().__init__(
            f"{message} (gadget order {gadget_order}, ratios "
            f"{', '.join(f'{r:.4f}' for r in observed_ratios)})",
            exit_code=ExitCode.INCONSISTENT,
        )


def flowwidth_exception_handler(exc: FlowwidthException) -> int:
    """Handle flowwidth exceptions raised by a command."""
    logger.error(
        "flowwidth_exception",
        exception_type=type(exc).__name__,
        message=exc.message,
        exit_code=int(exc.exit_code),
    )
    typer.echo(f"error: {exc.message}", err=True)
    return int(exc.exit_code)


def general_exception_handler(exc: Exception) -> int:
    """Handle unexpected exceptions."""
    logger.error(
        "unexpected_exception",
        exception_type=type(exc).__name__,
        error=str(exc),
    )
    typer.echo("error: an unexpected error occurred; rerun with --verbose for details", err=True)
    return int(ExitCode.UNEXPECTED)
