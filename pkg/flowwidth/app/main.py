"""Command-line entry point."""

import sys

import click
import structlog
import typer

from flowwidth.app.commands import analyze, corpus, leakage, oracle, reduce, width
from flowwidth.app.config import settings
from flowwidth.app.constants import ExitCode
from flowwidth.app.exceptions import (
    FlowwidthException,
    flowwidth_exception_handler,
    general_exception_handler,
)
from flowwidth.app.logger import setup_logging

try:
    # Newer typer releases raise from a vendored copy of click.
    from typer._click import exceptions as typer_click_exceptions
except ImportError:
    typer_click_exceptions = click.exceptions

USAGE_ERRORS = (click.UsageError, typer_click_exceptions.UsageError)
CLICK_ERRORS = (click.ClickException, typer_click_exceptions.ClickException)
ABORTS = (click.exceptions.Abort, typer_click_exceptions.Abort)

# Setup logging
setup_logging(log_level=settings.log_level, environment=settings.environment)
logger = structlog.get_logger(__name__)

app = typer.Typer(
    name="flowwidth",
    help="Leakage growth of two-party interactive systems",
    add_completion=False,
    no_args_is_help=True,
)


@app.callback()
def main_callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log progress to stderr"),
) -> None:
    if verbose:
        setup_logging(log_level="DEBUG", environment=settings.environment)


# Register commands
app.command(name="analyze")(analyze.analyze_command)
app.command(name="width")(width.width_command)
app.command(name="reduce")(reduce.reduce_command)
app.command(name="oracle")(oracle.oracle_command)
app.command(name="leakage")(leakage.leakage_command)
app.command(name="corpus")(corpus.corpus_command)


def main(argv: list[str] | None = None) -> int:
    """Run the CLI on ``argv`` and return the exit code."""
    args = sys.argv[1:] if argv is None else argv
    try:
        result = app(args=args, prog_name="flowwidth", standalone_mode=False)
    except USAGE_ERRORS as exc:
        exc.show()
        return ExitCode.USAGE
    except CLICK_ERRORS as exc:
        exc.show()
        return ExitCode.INPUT_ERROR
    except ABORTS:
        return ExitCode.UNEXPECTED
    except FlowwidthException as exc:
        return flowwidth_exception_handler(exc)
    except Exception as exc:
        return general_exception_handler(exc)
    return int(result or 0)


def run() -> None:
    raise SystemExit(main())
