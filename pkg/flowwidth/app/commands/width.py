"""``flowwidth width``: exact antichain widths of language levels."""

from flowwidth.app.commands.options import Format, InputPath, NMax, StateBudget, make_config
from flowwidth.app.config import OutputFormat
from flowwidth.app.constants import AnalysisDefaults, ExitCode
from flowwidth.app.render import emit_records, print_width_table, width_fields
from flowwidth.app.services import analysis


def width_command(
    path: InputPath,
    n_max: NMax = AnalysisDefaults.N_MAX,
    budget_states: StateBudget = AnalysisDefaults.STATE_BUDGET,
    output_format: Format = OutputFormat.TEXT,
) -> int:
    """Print w(L_=n) for even n up to --n-max; transducers are reduced first."""
    config = make_config(
        "width", path, n_max=n_max, state_budget=budget_states, output_format=output_format
    )
    rows = analysis.width_table(config)
    if config.output_format is OutputFormat.RECORDS:
        emit_records("width", width_fields(rows))
    else:
        print_width_table(rows)
    return ExitCode.OK
