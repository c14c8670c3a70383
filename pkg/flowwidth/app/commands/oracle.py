"""``flowwidth oracle``: brute-force leakage next to the width it should equal."""

from flowwidth.app.commands.options import (
    EnumerationCap,
    Format,
    Horizon,
    InputPath,
    StateBudget,
    StrategyBudget,
    Workers,
    make_config,
)
from flowwidth.app.config import OutputFormat
from flowwidth.app.constants import AnalysisDefaults, ExitCode
from flowwidth.app.render import emit_records, oracle_fields, print_oracle
from flowwidth.app.services import analysis


def oracle_command(
    path: InputPath,
    k: Horizon = AnalysisDefaults.HORIZON,
    budget_strategies: StrategyBudget = AnalysisDefaults.STRATEGY_BUDGET,
    budget_states: StateBudget = AnalysisDefaults.STATE_BUDGET,
    enumeration_cap: EnumerationCap = AnalysisDefaults.ENUMERATION_CAP,
    workers: Workers = AnalysisDefaults.WORKERS,
    output_format: Format = OutputFormat.TEXT,
) -> int:
    """
    Compare L_k(T) computed over all strategy pairs with log2 w(L_=2k).

    Exits with 4 when the two disagree.
    """
    config = make_config(
        "oracle",
        path,
        horizon=k,
        strategy_budget=budget_strategies,
        state_budget=budget_states,
        enumeration_cap=enumeration_cap,
        workers=workers,
        output_format=output_format,
    )
    comparison = analysis.oracle(config)
    if config.output_format is OutputFormat.RECORDS:
        emit_records("oracle", oracle_fields(comparison))
    else:
        print_oracle(comparison)
    return ExitCode.OK if comparison.equal else ExitCode.INCONSISTENT
