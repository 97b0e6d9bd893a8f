"""
Evaluation harness: fault-injection matrix, cost-bound table, joint
YAML+code precision and dispatch micro-benchmarks.
"""

import json
import logging
import sys
from typing import Optional

import click

from lambdagent.api.cli import ExitCode, format_option, handle_errors
from lambdagent.core.config import settings
from lambdagent.services.benchmark import benchmark
from lambdagent.services.fault_harness import cost_frame, cost_table, load_baselines, render_report, run_matrix
from lambdagent.services.supplement_scanner import joint_precision, load_joint_cases

logger = logging.getLogger(__name__)


@click.group()
@click.option("--verbose", "-v", is_flag=True)
@click.pass_context
def harness(ctx: click.Context, verbose: bool):
    """Measure the lint, the cost model and the runtime."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


@harness.command("run-matrix")
@click.option("--baselines", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of clean baseline configs (the shipped set by default).")
@click.option("--allow-dirty", is_flag=True, help="Count baseline errors as false positives instead of aborting.")
@format_option
@handle_errors
def run_matrix_command(baselines: Optional[str], allow_dirty: bool, output_format: str):
    """Inject each fault kind into each baseline and report detection."""
    report = run_matrix(load_baselines(baselines), allow_dirty=allow_dirty)
    if output_format == "structured":
        click.echo(report.model_dump_json())
    else:
        click.echo(render_report(report))
    sys.exit(ExitCode.OK if report.detected == report.injected else ExitCode.WARNINGS)


@harness.command("cost-table")
@format_option
@handle_errors
def cost_table_command(output_format: str):
    """Predicted against observed oracle calls on the shipped fixtures."""
    rows = cost_table()
    if output_format == "structured":
        for row in rows:
            click.echo(row.model_dump_json())
        return
    click.echo(cost_frame(rows).to_string(index=False))


@harness.command("joint")
@click.argument("fixtures", type=click.Path(exists=True, file_okay=False))
@format_option
@handle_errors
def joint_command(fixtures: str, output_format: str):
    """YAML-only against joint YAML+code precision on labelled cases."""
    report = joint_precision(load_joint_cases(fixtures, settings.lint_workers))
    if output_format == "structured":
        click.echo(report.model_dump_json())
        return
    click.echo(report.render())


@harness.command("bench")
@click.option("--repeats", type=int, default=200, show_default=True)
@format_option
def bench_command(repeats: int, output_format: str):
    """Median per-operation dispatch overhead in microseconds."""
    results = benchmark(repeats)
    if output_format == "structured":
        click.echo(json.dumps(results))
        return
    for name, us in results.items():
        click.echo(f"{name:<16} {us:10.1f} µs")


def main() -> None:
    harness(obj={})


if __name__ == "__main__":
    main()
