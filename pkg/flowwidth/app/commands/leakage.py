"""``flowwidth leakage``: capacities of channel, ichannel and joint files."""

from flowwidth.app.commands.options import Format, InputPath, make_config
from flowwidth.app.config import OutputFormat
from flowwidth.app.constants import ExitCode
from flowwidth.app.render import emit_records, leakage_fields, print_leakage
from flowwidth.app.services import analysis


def leakage_command(path: InputPath, output_format: Format = OutputFormat.TEXT) -> int:
    """Print min-entropy capacity, and leakage or Dalenius leakage where the file allows."""
    config = make_config("leakage", path, output_format=output_format)
    summary = analysis.leakage(config)
    if config.output_format is OutputFormat.RECORDS:
        emit_records("leakage", leakage_fields(summary))
    else:
        print_leakage(summary)
    return ExitCode.OK
