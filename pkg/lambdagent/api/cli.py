"""
Command-line interface: compile, run, repl, lint, trace, lambda, tools, version.
"""

import functools
import json
import logging
import sys
from enum import IntEnum
from pathlib import Path
from typing import List, Optional, Tuple

import click

from lambdagent import __version__
from lambdagent.core.config import settings
from lambdagent.core.errors import ConfigLoadError, LambdagentError
from lambdagent.models.outcome import Ok
from lambdagent.models.schemas import CanonicalConfig, FrameworkKind, LintFinding, Severity
from lambdagent.models.trace import LlmCall, Trace, render_event
from lambdagent.models.terms import Term
from lambdagent.models.values import value_text
from lambdagent.services.compiler import compile_config
from lambdagent.services.evaluator import EvalContext, reduce
from lambdagent.services.frameworks import normalize
from lambdagent.services.lint_engine import exit_status, lint, lint_many, render, summarize
from lambdagent.services.loader import find_configs, load_document, load_oracle_script
from lambdagent.services.oracles import OracleProvider, build_oracle
from lambdagent.services.supplement_scanner import reconcile, scan_repo
from lambdagent.services.syntax import pretty_print_lambda
from lambdagent.services.tools import ToolRegistry, default_registry
from lambdagent.services.typechecker import TypeContext, typecheck_closed

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    WARNINGS = 1
    ERRORS = 2


FRAMEWORK_CHOICES = [kind.value for kind in FrameworkKind]


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def handle_errors(fn):
    """Turn library errors into a one-line diagnostic and exit code 2."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LambdagentError as e:
            if click.get_current_context().find_root().obj.get("verbose"):
                raise
            click.echo(f"error: {e}", err=True)
            sys.exit(ExitCode.ERRORS)

    return wrapper


def format_option(fn):
    return click.option(
        "--format", "output_format", type=click.Choice(["human", "structured"]), default="human",
        show_default=True, help="Human-readable text or one JSON object per line.",
    )(fn)


def framework_option(fn):
    return click.option(
        "--framework", type=click.Choice(FRAMEWORK_CHOICES, case_sensitive=False), default=None,
        help="Skip detection and read the config as this framework.",
    )(fn)


def load_config(path: str, framework: Optional[str] = None) -> CanonicalConfig:
    kind = FrameworkKind.parse(framework) if framework else None
    return normalize(load_document(path), kind, source_path=str(path))


def _error_findings(findings: List[LintFinding]) -> List[LintFinding]:
    return [f for f in findings if f.severity == Severity.ERROR]


def build_term(config: CanonicalConfig, registry: ToolRegistry, force: bool) -> Tuple[Term, List[LintFinding]]:
    """Lint, compile and typecheck; lint ERRORs stop compilation unless ``force``."""
    findings = lint(config)
    errors = _error_findings(findings)
    if errors and not force:
        click.echo(render(errors), err=True)
        click.echo("error: lint errors; pass --force to compile anyway", err=True)
        sys.exit(ExitCode.ERRORS)
    term = compile_config(config, settings.default_max_steps, settings.default_model, registry)
    typecheck_closed(term, TypeContext.from_registry(registry))
    return term, findings


def _oracle(script: Optional[str], registry: ToolRegistry) -> OracleProvider:
    if script:
        oracle, _ = load_oracle_script(script, registry)
        return oracle
    return build_oracle(settings)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging; errors show tracebacks.")
@click.pass_context
def cli(ctx: click.Context, verbose: bool):
    """Typed compilation, evaluation and lint for agent configurations."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    _configure_logging(verbose)


@cli.command("compile")
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@framework_option
@format_option
@click.option("--force", is_flag=True, help="Compile despite lint errors.")
@handle_errors
def compile_command(config: str, framework: Optional[str], output_format: str, force: bool):
    """Compile CONFIG, typecheck it and print the term."""
    canonical = load_config(config, framework)
    registry = default_registry()
    term, findings = build_term(canonical, registry, force)
    ty = typecheck_closed(term, TypeContext.from_registry(registry))
    if output_format == "structured":
        click.echo(json.dumps({"agentId": canonical.agent_id, "type": ty.render(), "lambda": pretty_print_lambda(term)},
                              ensure_ascii=False))
        if findings:
            click.echo(render(findings, structured=True))
        return
    click.echo(f"{canonical.agent_id} : {ty.render()}")
    click.echo(pretty_print_lambda(term))
    if findings:
        click.echo(render(findings))


@cli.command("lambda")
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@framework_option
@handle_errors
def lambda_command(config: str, framework: Optional[str]):
    """Print only the λ export of CONFIG."""
    canonical = load_config(config, framework)
    term = compile_config(canonical, settings.default_max_steps, settings.default_model, default_registry())
    click.echo(pretty_print_lambda(term))


def _stats(trace: Trace) -> str:
    return f"{trace.count(LlmCall)} steps, {trace.token_count()} tokens"


@cli.command("run")
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.argument("input_text", metavar="INPUT")
@click.option("--oracle-script", type=click.Path(exists=True, dir_okay=False), help="Scripted oracle (YAML/JSON).")
@click.option("--seed", type=int, default=None, help="Seed for probabilistic choice.")
@click.option("--trace-out", type=click.Path(dir_okay=False), help="Write the JSONL trace here.")
@click.option("--force", is_flag=True, help="Run despite lint errors.")
@framework_option
@format_option
@handle_errors
def run_command(config: str, input_text: str, oracle_script: Optional[str], seed: Optional[int],
                trace_out: Optional[str], force: bool, framework: Optional[str], output_format: str):
    """Compile CONFIG and apply it to INPUT."""
    canonical = load_config(config, framework)
    registry = default_registry()
    oracle = _oracle(oracle_script, registry)
    term, _ = build_term(canonical, registry, force)
    ctx = EvalContext(
        oracle=oracle,
        tools=registry,
        rng_seed=seed if seed is not None else settings.default_seed,
        summary_max_chars=settings.summary_max_chars,
    )
    outcome = reduce(term, input_text, ctx)
    if trace_out:
        Path(trace_out).write_text(ctx.trace.to_jsonl(), encoding="utf-8")
    ok = isinstance(outcome, Ok)
    if output_format == "structured":
        click.echo(json.dumps({
            "ok": ok,
            "result": outcome.text,
            "steps": ctx.trace.count(LlmCall),
            "tokens": ctx.trace.token_count(),
        }, ensure_ascii=False))
    else:
        click.echo(outcome.text)
        click.echo(_stats(ctx.trace))
    sys.exit(ExitCode.OK if ok else ExitCode.ERRORS)


@cli.command("repl")
@click.argument("config", type=click.Path(exists=True, dir_okay=False))
@click.option("--oracle-script", type=click.Path(exists=True, dir_okay=False), help="Scripted oracle (YAML/JSON).")
@click.option("--seed", type=int, default=None)
@click.option("--force", is_flag=True, help="Start despite lint errors.")
@framework_option
@handle_errors
def repl_command(config: str, oracle_script: Optional[str], seed: Optional[int], force: bool,
                 framework: Optional[str]):
    """Feed lines to the compiled CONFIG; memory persists between turns.

    Meta commands: :memory shows the store, :quit leaves.
    """
    canonical = load_config(config, framework)
    registry = default_registry()
    oracle = _oracle(oracle_script, registry)
    term, _ = build_term(canonical, registry, force)
    ctx = EvalContext(
        oracle=oracle,
        tools=registry,
        rng_seed=seed if seed is not None else settings.default_seed,
        summary_max_chars=settings.summary_max_chars,
    )
    stdin = click.get_text_stream("stdin")
    interactive = stdin.isatty()
    while True:
        if interactive:
            click.echo("λ> ", nl=False)
        line = stdin.readline()
        if not line:
            break
        line = line.rstrip("\n")
        if line.strip() == ":quit":
            break
        if line.strip() == ":memory":
            store = ctx.store
            entries = list(store.entries()) if store is not None else []
            if not entries:
                click.echo("(empty)")
            for key, entry in entries:
                click.echo(f"{key} = {value_text(entry.value)!r}")
            continue
        if not line.strip():
            continue
        ctx.reset_trace()
        outcome = reduce(term, line, ctx)
        click.echo(outcome.text)
        click.echo(_stats(ctx.trace))


@cli.command("lint")
@click.argument("path", type=click.Path(exists=True))
@click.option("--with-code", type=click.Path(exists=True, file_okay=False),
              help="Scan this source tree and downgrade findings it supplements.")
@click.option("--summary", is_flag=True, help="Print per-rule counts after the findings.")
@framework_option
@format_option
@handle_errors
def lint_command(path: str, with_code: Optional[str], summary: bool, framework: Optional[str], output_format: str):
    """Lint a config file or every config under a directory."""
    files = find_configs(path)
    configs = [load_config(str(f), framework) for f in files]
    results = lint_many(configs, settings.lint_workers)
    if with_code:
        index = scan_repo(with_code, settings.lint_workers)
        for error in index.errors:
            logger.warning("scan: %s", error)
        results = [reconcile(findings, index) for findings in results]
    structured = output_format == "structured"
    single = len(files) == 1 and Path(path).is_file()
    for file, findings in zip(files, results):
        if structured:
            for f in findings:
                click.echo(json.dumps({"file": str(file), **f.model_dump(mode="json")}, ensure_ascii=False))
            continue
        if not single:
            click.echo(f"{file}:")
        if findings:
            click.echo(render(findings))
        elif not single:
            click.echo("  clean")
    if summary:
        report = summarize(results)
        click.echo(report.model_dump_json() if structured else report.render())
    sys.exit(max((exit_status(f) for f in results), default=ExitCode.OK))


@cli.command("trace")
@click.argument("trace_file", type=click.Path(exists=True, dir_okay=False))
@format_option
@handle_errors
def trace_command(trace_file: str, output_format: str):
    """Render a JSONL trace written by ``run --trace-out``."""
    try:
        trace = Trace.from_jsonl(Path(trace_file).read_text(encoding="utf-8"))
    except ValueError as e:
        raise ConfigLoadError(f"{trace_file}: not a trace file ({e})") from None
    for event in trace:
        click.echo(event.model_dump_json() if output_format == "structured" else render_event(event))
    if output_format == "human":
        click.echo(_stats(trace))


@cli.command("tools")
@click.option("--invoke", "name", default=None, help="Tool to call.")
@click.option("--input", "input_text", default="", help="Input passed to --invoke.")
@click.option("--oracle-script", type=click.Path(exists=True, dir_okay=False),
              help="Bind the script's scripted tool tables first.")
@handle_errors
def tools_command(name: Optional[str], input_text: str, oracle_script: Optional[str]):
    """List the local tool registry, or invoke one tool with a test input."""
    registry = default_registry()
    if oracle_script:
        load_oracle_script(oracle_script, registry)
    if name is None:
        for spec in registry.specs():
            click.echo(f"{spec.name:<12} {spec.domain.render()} → {spec.codomain.render()}  {spec.description}")
        return
    click.echo(registry.invoke(name, input_text))


@cli.command("version")
def version_command():
    """Print the version."""
    click.echo(__version__)


def main() -> None:
    cli(obj={})


if __name__ == "__main__":
    main()
