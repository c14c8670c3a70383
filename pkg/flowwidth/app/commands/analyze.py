"""``flowwidth analyze``: classify the leakage growth of a transducer."""

import structlog

from flowwidth.app.commands.options import (
    Format,
    InputPath,
    NMax,
    Seed,
    StateBudget,
    TimeBudget,
    make_config,
)
from flowwidth.app.config import OutputFormat
from flowwidth.app.constants import AnalysisDefaults, ExitCode
from flowwidth.app.models import Verdict
from flowwidth.app.render import emit_records, print_report, report_fields
from flowwidth.app.services import analysis

logger = structlog.get_logger(__name__)


def analyze_command(
    path: InputPath,
    n_max: NMax = AnalysisDefaults.N_MAX,
    budget_states: StateBudget = AnalysisDefaults.STATE_BUDGET,
    budget_seconds: TimeBudget = AnalysisDefaults.TIME_BUDGET_SECONDS,
    output_format: Format = OutputFormat.TEXT,
    seed: Seed = AnalysisDefaults.SEED,
) -> int:
    """
    Decide whether the leakage of a transducer grows linearly or logarithmically.

    Exits with 2 when the flow is linear and 0 when it is logarithmic.
    """
    config = make_config(
        "analyze",
        path,
        n_max=n_max,
        state_budget=budget_states,
        time_budget=budget_seconds,
        output_format=output_format,
        seed=seed,
    )
    report = analysis.analyze(config)
    if config.output_format is OutputFormat.RECORDS:
        emit_records("analyze", [("seed", config.seed), *report_fields(report)])
    else:
        print_report(report)
    logger.info("analysis_finished", verdict=report.verdict.value, order=report.order)
    return ExitCode.LINEAR_FLOW if report.verdict is Verdict.LINEAR else ExitCode.OK
