"""
Fault injection into canonical configs and lint scoring, plus the cost-bound table.
"""

import logging
import os
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import pandas as pd
from pydantic import BaseModel

from lambdagent.core.errors import HarnessSetupError
from lambdagent.models.schemas import (
    AgentType,
    CanonicalConfig,
    FaultKind,
    FaultTally,
    LintFinding,
    MatrixCell,
    MatrixReport,
    RouteTable,
    Severity,
)
from lambdagent.models.terms import Abs, App, Fix, Term, Tool, Var
from lambdagent.models.trace import LlmCall, ToolCall
from lambdagent.models.types import STR, Arrow
from lambdagent.services.compiler import compile_config
from lambdagent.services.cost import cost_estimate
from lambdagent.services.evaluator import EvalContext, reduce
from lambdagent.services.frameworks import normalize
from lambdagent.services.lint_engine import PROMPTED_TYPES, is_react_like, lint
from lambdagent.services.loader import find_configs, load_document
from lambdagent.services.oracles import ScriptedOracle
from lambdagent.services.react_engine import TERMINATE
from lambdagent.services.tools import default_registry

logger = logging.getLogger(__name__)

BASELINE_DIR = Path(__file__).resolve().parent.parent / "data" / "baselines"


class Inapplicable:
    """Marker: the fault's target field group is absent from the config."""

    def __repr__(self) -> str:
        return "Inapplicable"


INAPPLICABLE = Inapplicable()


def _walk(c: CanonicalConfig) -> Iterator[CanonicalConfig]:
    yield c
    for _, sub in c.subconfigs():
        yield from _walk(sub)


def _prompted(c: CanonicalConfig) -> bool:
    return c.agent_type in PROMPTED_TYPES and c.condition is None


_TARGETS: dict = {
    FaultKind.REMOVE_TERMINATE: lambda c: is_react_like(c) and c.has_terminate,
    FaultKind.EMPTY_SYSTEM_PROMPT: _prompted,
    FaultKind.REMOVE_MODEL: lambda c: _prompted(c) and c.model is not None,
    FaultKind.ZERO_MAX_STEPS: lambda c: c.agent_type in (AgentType.REACT, AgentType.LOOP) or c.group_chat,
    FaultKind.EMPTY_ROUTES: lambda c: c.agent_type == AgentType.ROUTER,
}


def _mutate(c: CanonicalConfig, k: FaultKind) -> CanonicalConfig:
    if k == FaultKind.REMOVE_TERMINATE:
        return c.model_copy(update={
            "tools": [t for t in c.tools if t != TERMINATE],
            "online_tools": [
                g.model_copy(update={"tools": [t for t in g.tools if t != TERMINATE]}) for g in c.online_tools
            ],
        })
    if k == FaultKind.EMPTY_SYSTEM_PROMPT:
        return c.model_copy(update={"system_prompt": ""})
    if k == FaultKind.REMOVE_MODEL:
        return c.model_copy(update={"model": None})
    if k == FaultKind.ZERO_MAX_STEPS:
        return c.model_copy(update={"max_steps": 0})
    return c.model_copy(update={"routes": RouteTable()})


def _replace(c: CanonicalConfig, target: CanonicalConfig, new: CanonicalConfig) -> CanonicalConfig:
    if c is target:
        return new
    update = {}
    if c.stages is not None:
        update["stages"] = [_replace(s, target, new) for s in c.stages]
    if c.branches is not None:
        update["branches"] = [_replace(b, target, new) for b in c.branches]
    if c.routes is not None:
        update["routes"] = RouteTable(
            labeled={label: _replace(r, target, new) for label, r in c.routes.labeled.items()},
            default=_replace(c.routes.default, target, new) if c.routes.default is not None else None,
        )
    if c.body is not None:
        update["body"] = _replace(c.body, target, new)
    return c.model_copy(update=update) if update else c


def inject(c: CanonicalConfig, k: FaultKind) -> Union[CanonicalConfig, Inapplicable]:
    """Apply fault ``k`` to the first config in pre-order that carries its field group."""
    target = next((node for node in _walk(c) if _TARGETS[k](node)), None)
    if target is None:
        return INAPPLICABLE
    return _replace(c, target, _mutate(target, k))


def _errors(findings: Sequence[LintFinding]) -> List[Tuple[str, str]]:
    return [(f.rule_id, f.path) for f in findings if f.severity == Severity.ERROR]


def run_matrix(
    baselines: Sequence[Tuple[str, CanonicalConfig]],
    kinds: Sequence[FaultKind] = tuple(FaultKind),
    allow_dirty: bool = False,
) -> MatrixReport:
    """Inject every fault kind into every named baseline and score the lint."""
    report = MatrixReport(per_fault={k: FaultTally() for k in kinds})
    for name, baseline in baselines:
        base_errors = _errors(lint(baseline))
        if base_errors:
            if not allow_dirty:
                raise HarnessSetupError(f"baseline {name} is not clean: {', '.join(r for r, _ in base_errors)}")
            report.false_positives_on_baselines += len(base_errors)
        for k in kinds:
            injected = inject(baseline, k)
            if isinstance(injected, Inapplicable):
                report.skipped_inapplicable += 1
                report.cells.append(MatrixCell(
                    baseline=name, fault=k, applicable=False, detected=False, expected_rule=k.expected_rule,
                ))
                continue
            new_errors = [e for e in _errors(lint(injected)) if e not in base_errors]
            detected = any(rule == k.expected_rule for rule, _ in new_errors)
            tally = report.per_fault[k]
            tally.applicable += 1
            tally.detected += int(detected)
            report.injected += 1
            report.detected += int(detected)
            report.cells.append(MatrixCell(
                baseline=name, fault=k, applicable=True, detected=detected, expected_rule=k.expected_rule,
                new_errors=sorted({rule for rule, _ in new_errors}),
            ))
            logger.debug("%s x %s: detected=%s new=%s", name, k.value, detected, new_errors)
    return report


def load_baselines(root: Union[str, os.PathLike, None] = None) -> List[Tuple[str, CanonicalConfig]]:
    """Named, normalized baseline configs from a directory (the shipped set by default)."""
    root = Path(root) if root is not None else BASELINE_DIR
    return [(path.stem, normalize(load_document(path), source_path=str(path))) for path in find_configs(root)]


def matrix_table(report: MatrixReport) -> pd.DataFrame:
    """Baselines as rows, fault kinds as columns; cells are detected, missed or n/a."""
    if not report.cells:
        return pd.DataFrame()
    frame = pd.DataFrame([
        {
            "baseline": cell.baseline,
            "fault": cell.fault.value,
            "result": ("detected" if cell.detected else "MISSED") if cell.applicable else "n/a",
        }
        for cell in report.cells
    ])
    table = frame.pivot(index="baseline", columns="fault", values="result")
    return table.reindex(columns=[k.value for k in FaultKind if k.value in table.columns])


def render_report(report: MatrixReport) -> str:
    lines = [matrix_table(report).to_string()] if report.cells else []
    lines.append(
        f"injected={report.injected} detected={report.detected} "
        f"recall={100 * report.recall:.1f}% precision={100 * report.precision:.1f}% "
        f"baseline_fp={report.false_positives_on_baselines} skipped={report.skipped_inapplicable}"
    )
    return "\n".join(lines)


# Cost-bound validation

class CostRow(BaseModel):
    agent: str
    n: int
    predicted: int
    actual: int
    output: str

    @property
    def tightness(self) -> float:
        return self.actual / self.predicted if self.predicted else 1.0


def church_iteration(step_tool: str, n: int) -> Term:
    """fix_n (λs.λx. s (tool x)): apply ``step_tool`` exactly n times."""
    body = Abs("s", Arrow(STR, STR), Abs("x", STR, App(Var("s"), App(Tool(step_tool), Var("x")))))
    return Fix(n, body)


def _measure(agent: str, n: int, term: Term, input: str, oracle: ScriptedOracle,
             registry_setup: Optional[Callable] = None) -> CostRow:
    registry = default_registry()
    if registry_setup is not None:
        registry_setup(registry)
    ctx = EvalContext(oracle=oracle, tools=registry)
    outcome = reduce(term, input, ctx)
    actual = ctx.trace.count(LlmCall) + ctx.trace.count(ToolCall)
    predicted = int(cost_estimate(term, count_calls=True))
    return CostRow(agent=agent, n=n, predicted=predicted, actual=actual, output=outcome.text)


def cost_table() -> List[CostRow]:
    """Predicted versus observed oracle calls on the shipped fixed-iteration and ReAct fixtures."""
    rows = [
        _measure("factorial (3!)", 4, church_iteration("fact.step", 4), "0|1", ScriptedOracle()),
        _measure("factorial (5!)", 6, church_iteration("fact.step", 6), "0|1", ScriptedOracle()),
    ]
    looping = CanonicalConfig(
        agent_id="never_terminates",
        agent_type=AgentType.REACT,
        model={"name": "scripted"},
        system_prompt="Search until done.",
        max_steps=20,
        tools=["search"],
    )
    term = compile_config(looping)
    rows.append(_measure(
        "react (no terminate)", 20, term, "question",
        ScriptedOracle(default="ACTION: search\nARGS: more"),
        lambda registry: registry.bind_table("search", {"*": "nothing yet"}),
    ))
    calc = CanonicalConfig(
        agent_id="calculator",
        agent_type=AgentType.REACT,
        model={"name": "scripted"},
        system_prompt="Compute.",
        max_steps=20,
        tools=["calc", TERMINATE],
    )
    script = ScriptedOracle(sequences={"Compute.": [
        "ACTION: calc\nARGS: 3*5", "ACTION: calc\nARGS: 15*7", "ACTION: terminate\nARGS: 105",
    ]})
    rows.append(_measure("react (terminates at 3)", 20, compile_config(calc), "3*5*7", script))
    return rows


def cost_frame(rows: Sequence[CostRow]) -> pd.DataFrame:
    return pd.DataFrame([
        {"agent": r.agent, "n": r.n, "predicted": r.predicted, "actual": r.actual, "tightness": round(r.tightness, 2)}
        for r in rows
    ])
