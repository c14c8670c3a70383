from enum import IntEnum

# Version of the line-delimited record output
RECORD_FORMAT_VERSION = 1


class AnalysisDefaults:
    # Horizons and tables
    HORIZON = 2
    N_MAX = 20

    # Budgets
    STRATEGY_BUDGET = 20_000
    STATE_BUDGET = 10_000
    TIME_BUDGET_SECONDS = 30.0
    ENUMERATION_CAP = 5_000

    # Fit gate
    FIT_MAX_LENGTH = 128
    FIT_MIN_LENGTH = 24

    # Capacity search oracle
    CAPACITY_GRID = 32
    ASCENT_MIN_STEP = 2.0**-40

    WORKERS = 1
    SEED = 0


class ExitCode(IntEnum):
    """Process exit codes; LINEAR_FLOW lets scripts gate on dangerous flow."""

    OK = 0
    INPUT_ERROR = 1
    LINEAR_FLOW = 2
    BUDGET_EXCEEDED = 3
    INCONSISTENT = 4
    UNEXPECTED = 5
    USAGE = 64
