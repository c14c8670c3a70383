"""Options shared by several subcommands, and the config they build."""

from pathlib import Path
from typing import Annotated

import typer

from flowwidth.app.config import AnalysisConfig, OutputFormat

InputPath = Annotated[Path, typer.Argument(help="Input file", show_default=False)]
Horizon = Annotated[int, typer.Option("--k", min=0, help="Horizon k (number of rounds)")]
NMax = Annotated[int, typer.Option("--n-max", min=0, help="Largest word length in width tables")]
StrategyBudget = Annotated[
    int, typer.Option("--budget-strategies", min=1, help="Most strategies enumerated per side")
]
StateBudget = Annotated[
    int, typer.Option("--budget-states", min=1, help="Most subset states during determinization")
]
TimeBudget = Annotated[
    float, typer.Option("--budget-seconds", min=0.001, help="Seconds allowed for the fit gate")
]
EnumerationCap = Annotated[
    int, typer.Option("--enumeration-cap", min=1, help="Most words enumerated by brute force")
]
Workers = Annotated[int, typer.Option("--workers", min=1, help="Worker threads for brute force")]
Format = Annotated[OutputFormat, typer.Option("--format", help="Output format")]
Seed = Annotated[int, typer.Option("--seed", help="Seed for randomized runs")]


def make_config(command: str, path: Path | None, **flags: object) -> AnalysisConfig:
    return AnalysisConfig(input_path=path, command=command, **flags)
