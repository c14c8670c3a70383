"""``flowwidth corpus``: list or print the bundled example files."""

from typing import Annotated

import typer

from flowwidth.app.constants import ExitCode
from flowwidth.app.formats import list_examples, load_example


def corpus_command(
    name: Annotated[str | None, typer.Argument(help="Example to print")] = None,
) -> int:
    """List bundled examples, or print one of them to use as a starting point."""
    if name is None:
        for example in list_examples():
            typer.echo(example)
    else:
        typer.echo(load_example(name), nl=False)
    return ExitCode.OK
