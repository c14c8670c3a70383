"""Text and record output for command results."""

import math
from collections.abc import Iterable

import typer
from rich.console import Console
from rich.table import Table

from flowwidth.app.constants import RECORD_FORMAT_VERSION
from flowwidth.app.models import CapacityReport, LeakageSummary, OracleComparison, Verdict

console = Console(markup=False, highlight=False)


def _number(value: float | None) -> str:
    if value is None:
        return "-"
    if math.isinf(value):
        return "-inf" if value < 0 else "inf"
    return f"{value:.6f}"


def _word(w: Iterable[str]) -> str:
    return " ".join(w)


def emit_records(command: str, fields: list[tuple[str, object]]) -> None:
    """Write ``format: 1`` key-value records, one field per line."""
    typer.echo(f"format: {RECORD_FORMAT_VERSION}")
    typer.echo(f"command: {command}")
    for key, value in fields:
        text = "" if value is None else str(value)
        typer.echo(f"{key}: {text}".rstrip())


# Reports


def report_fields(report: CapacityReport) -> list[tuple[str, object]]:
    fields: list[tuple[str, object]] = [
        ("verdict", report.verdict.value),
        ("growth", report.growth.kind.value),
        ("order", report.order),
        ("bounded", str(report.bounded).lower()),
        ("states", report.states),
    ]
    if report.witness is not None:
        fields += [
            ("witness_state", report.witness.state),
            ("witness_u", _word(report.witness.u)),
            ("witness_v", _word(report.witness.v)),
        ]
    fields += [(f"width[{n}]", w) for n, w in report.width_table]
    if report.fit is not None:
        fields += [
            ("fit_passed", str(report.fit.passed).lower()),
            ("fit_finite", str(report.fit.finite).lower()),
            ("fit_lengths", " ".join(str(n) for n in report.fit.lengths)),
            ("fit_ratios", " ".join(f"{r:.4f}" for r in report.fit.ratios)),
        ]
    fields += [(f"timing_{name}", f"{secs:.6f}") for name, secs in report.timings.items()]
    return fields


def print_report(report: CapacityReport) -> None:
    if report.verdict is Verdict.LINEAR:
        console.print("verdict: linear (capacity grows linearly in the horizon)")
        if report.witness is not None:
            console.print(f"witness at state {report.witness.state}:")
            console.print(f"  u = {_word(report.witness.u)}")
            console.print(f"  v = {_word(report.witness.v)}")
    else:
        console.print(f"verdict: logarithmic (antichain growth of order {report.order})")
        if report.bounded:
            console.print("leakage is bounded by a constant")
        if report.fit is not None and report.fit.ratios:
            ratios = ", ".join(f"{r:.3f}" for r in report.fit.ratios)
            console.print(f"doubling ratios up to n = {report.fit.max_length}: {ratios}")
    console.print(f"observer states: {report.states}")
    print_width_table(list(report.width_table))


def print_width_table(rows: list[tuple[int, int]]) -> None:
    table = Table(show_header=True, header_style="bold")
    table.add_column("n", justify="right")
    table.add_column("width", justify="right")
    table.add_column("bits", justify="right")
    for n, w in rows:
        table.add_row(str(n), str(w), _number(math.log2(w)) if w else "-inf")
    console.print(table)


def width_fields(rows: list[tuple[int, int]]) -> list[tuple[str, object]]:
    return [(f"width[{n}]", w) for n, w in rows]


# Oracle and leakage


def oracle_fields(comparison: OracleComparison) -> list[tuple[str, object]]:
    return [
        ("k", comparison.horizon),
        ("bruteforce_count", comparison.bruteforce_count),
        ("bruteforce_bits", _number(comparison.bruteforce_bits)),
        ("width", comparison.width),
        ("width_bits", _number(comparison.width_bits)),
        ("dilworth_width", comparison.dilworth_width),
        ("equal", str(comparison.equal).lower()),
        ("witness_strategy", comparison.witness),
    ]


def print_oracle(comparison: OracleComparison) -> None:
    console.print(f"k = {comparison.horizon}")
    console.print(
        f"brute force: {comparison.bruteforce_count} observations "
        f"({_number(comparison.bruteforce_bits)} bits)"
    )
    console.print(
        f"width at n = {2 * comparison.horizon}: {comparison.width} "
        f"({_number(comparison.width_bits)} bits)"
    )
    if comparison.dilworth_width is not None:
        console.print(f"Dilworth width of the level: {comparison.dilworth_width}")
    console.print("equal" if comparison.equal else "NOT equal")
    if comparison.witness is not None:
        console.print(f"Bob strategy: {comparison.witness}")


def leakage_fields(summary: LeakageSummary) -> list[tuple[str, object]]:
    fields: list[tuple[str, object]] = [
        ("kind", summary.kind),
        ("capacity_bits", _number(summary.capacity_bits)),
    ]
    if summary.leakage_bits is not None:
        fields.append(("leakage_bits", _number(summary.leakage_bits)))
    if summary.dalenius_bits is not None:
        fields.append(("dalenius_bits", _number(summary.dalenius_bits)))
    if summary.witness is not None:
        fields.append(("witness", summary.witness))
    if summary.deterministic_bits is not None:
        fields.append(("deterministic_bits", _number(summary.deterministic_bits)))
    return fields


def print_leakage(summary: LeakageSummary) -> None:
    for key, value in leakage_fields(summary):
        console.print(f"{key.replace('_', ' ')}: {value}")
