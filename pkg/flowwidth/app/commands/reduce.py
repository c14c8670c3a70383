"""``flowwidth reduce``: write Bob's observer automaton of a transducer."""

from pathlib import Path
from typing import Annotated

import structlog
import typer

from flowwidth.app.commands.options import InputPath, make_config
from flowwidth.app.constants import ExitCode
from flowwidth.app.services import analysis

logger = structlog.get_logger(__name__)


def reduce_command(
    path: InputPath,
    output: Annotated[
        Path | None, typer.Option("--output", "-o", help="Write the automaton here")
    ] = None,
) -> int:
    """Print the trimmed observer NFA in the nfa text format."""
    text = analysis.reduce_to_nfa(make_config("reduce", path))
    if output is None:
        typer.echo(text, nl=False)
    else:
        output.write_text(text, encoding="utf-8")
        logger.info("observer_nfa_written", path=str(output))
    return ExitCode.OK
