"""
Structural lint rules over canonical configs.

Each implemented rule is a function from a config to findings at paths
relative to that config; ``lint`` runs them over the config and, with
prefixed paths, over every sub-config.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import pandas as pd

from lambdagent.models.schemas import (
    AgentType,
    CanonicalConfig,
    FrameworkKind,
    HintKind,
    LintFinding,
    LintSummary,
    Severity,
)

logger = logging.getLogger(__name__)

RuleFn = Callable[[CanonicalConfig], List[LintFinding]]

PROMPTED_TYPES = {AgentType.SIMPLE, AgentType.REACT, AgentType.ROUTER}
REACT_LIKE_FRAMEWORKS = {FrameworkKind.CREWAI, FrameworkKind.LANGCHAIN}

INTERNAL_MECHANISMS = {
    FrameworkKind.CREWAI: "CrewAI: handled by framework",
    FrameworkKind.LANGCHAIN: "LangChain: AgentFinish ends the loop",
    FrameworkKind.DIFY: "Dify: end node ends the workflow",
}


@dataclass(frozen=True)
class RuleDescriptor:
    rule_id: str
    severity: Optional[Severity]
    summary: str
    check: Optional[RuleFn] = None

    @property
    def implemented(self) -> bool:
        return self.check is not None


def is_react_like(c: CanonicalConfig) -> bool:
    return c.agent_type == AgentType.REACT or c.framework in REACT_LIKE_FRAMEWORKS


def _conditional(c: CanonicalConfig) -> bool:
    return c.agent_type == AgentType.ROUTER and c.condition is not None


def _finding(rule_id: str, severity: Severity, path: str, message: str,
             mitigation: Optional[str] = None) -> LintFinding:
    return LintFinding(rule_id=rule_id, severity=severity, path=path, message=message, mitigation=mitigation)


def check_prompt(c: CanonicalConfig) -> List[LintFinding]:
    if c.agent_type not in PROMPTED_TYPES or _conditional(c):
        return []
    if c.system_prompt is None or not c.system_prompt.strip():
        return [_finding("L001", Severity.ERROR, "systemPrompt", "empty or missing system prompt")]
    return []


def check_model(c: CanonicalConfig) -> List[LintFinding]:
    if c.agent_type not in PROMPTED_TYPES or _conditional(c) or c.framework == FrameworkKind.CREWAI:
        return []
    if c.model is None:
        return [_finding("L002", Severity.ERROR, "model", "no model configured")]
    return []


def check_zero_steps(c: CanonicalConfig) -> List[LintFinding]:
    if c.max_steps == 0:
        return [_finding("L003", Severity.ERROR, "react.maxSteps", "maxSteps is 0; the loop returns its input")]
    return []


def check_terminate(c: CanonicalConfig) -> List[LintFinding]:
    """No terminate tool, graded by the strongest alternative termination mechanism."""
    if not is_react_like(c) or c.has_terminate:
        return []
    path, message = "mcp.localTools", "no terminate tool"
    if c.has_hint(HintKind.IS_TERMINATION_MSG):
        return [_finding("L004d", Severity.INFO, path, message, "is_termination_msg ends the conversation")]
    if c.has_hint(HintKind.FRAMEWORK_INTERNAL, HintKind.DAG_END_NODE, HintKind.NO_DELEGATION):
        mitigation = INTERNAL_MECHANISMS.get(c.framework, f"{c.framework.value}: handled by framework")
        return [_finding("L004c", Severity.INFO, path, message, mitigation)]
    bound = c.hint(HintKind.MAX_ITER) or c.hint(HintKind.MAX_ROUNDS)
    if bound is not None:
        return [_finding("L004b", Severity.WARN, path, message, f"{bound.render()}: forced truncation")]
    return [_finding("L004a", Severity.ERROR, path, message)]


def check_routes(c: CanonicalConfig) -> List[LintFinding]:
    if c.agent_type != AgentType.ROUTER:
        return []
    if c.routes is None or c.routes.empty:
        return [_finding("L005", Severity.ERROR, "routes", "router has no routes")]
    return []


def check_default(c: CanonicalConfig) -> List[LintFinding]:
    if c.agent_type != AgentType.ROUTER or _conditional(c) or c.group_chat:
        return []
    if c.routes is None or c.routes.default is None:
        return [_finding("L013", Severity.WARN, "routes.default", "router has no default route")]
    return []


def check_steps_specified(c: CanonicalConfig) -> List[LintFinding]:
    if is_react_like(c) and c.max_steps is None:
        return [_finding("L017", Severity.WARN, "react.maxSteps", "not specified")]
    return []


def check_group_chat(c: CanonicalConfig) -> List[LintFinding]:
    if not c.group_chat or c.max_steps is not None:
        return []
    if c.has_hint(HintKind.IS_TERMINATION_MSG, HintKind.MAX_ROUNDS):
        return []
    return [_finding("L021", Severity.ERROR, "groupChat", "unbounded multi-agent loop: no max rounds and no termination check")]


_IMPLEMENTED = {
    "L001": (Severity.ERROR, "system prompt empty or missing", check_prompt),
    "L002": (Severity.ERROR, "model missing", check_model),
    "L003": (Severity.ERROR, "maxSteps is zero", check_zero_steps),
    "L004a": (Severity.ERROR, "no terminate tool and no alternative termination", check_terminate),
    "L004b": (Severity.WARN, "no terminate tool, bounded by an iteration limit", check_terminate),
    "L004c": (Severity.INFO, "no terminate tool, framework handles termination", check_terminate),
    "L004d": (Severity.INFO, "no terminate tool, termination message check", check_terminate),
    "L005": (Severity.ERROR, "router has no routes", check_routes),
    "L013": (Severity.WARN, "router has no default route", check_default),
    "L017": (Severity.WARN, "react maxSteps not specified", check_steps_specified),
    "L021": (Severity.ERROR, "group chat without bound or termination check", check_group_chat),
}


def _build_catalog() -> List[RuleDescriptor]:
    ids = [f"L{n:03d}" for n in range(1, 26)]
    catalog = []
    for rule_id in ids:
        if rule_id == "L004":
            for suffix in "abcd":
                severity, summary, _ = _IMPLEMENTED[rule_id + suffix]
                catalog.append(RuleDescriptor(rule_id + suffix, severity, summary, check_terminate))
            continue
        if rule_id in _IMPLEMENTED:
            severity, summary, fn = _IMPLEMENTED[rule_id]
            catalog.append(RuleDescriptor(rule_id, severity, summary, fn))
        else:
            catalog.append(RuleDescriptor(rule_id, None, "reserved, not implemented"))
    return catalog


CATALOG: List[RuleDescriptor] = _build_catalog()


def _checks() -> List[RuleFn]:
    unique: List[RuleFn] = []
    for rule in CATALOG:
        if rule.check is not None and rule.check not in unique:
            unique.append(rule.check)
    return unique


def _prefixed(prefix: str, path: str) -> str:
    return f"{prefix}.{path}" if prefix else path


def _lint(c: CanonicalConfig, prefix: str, out: List[LintFinding]) -> None:
    for check in _checks():
        for f in check(c):
            out.append(f.model_copy(update={"path": _prefixed(prefix, f.path)}))
    for sub_path, sub in c.subconfigs():
        _lint(sub, _prefixed(prefix, sub_path), out)


def lint(c: CanonicalConfig) -> List[LintFinding]:
    """All findings for ``c`` and its sub-configs, sorted by severity, rule id and path."""
    findings: List[LintFinding] = []
    _lint(c, "", findings)
    findings.sort(key=LintFinding.sort_key)
    logger.debug("lint %s: %d findings", c.agent_id, len(findings))
    return findings


def lint_many(configs: Sequence[CanonicalConfig], workers: int = 4) -> List[List[LintFinding]]:
    """Lint configs in a thread pool; results keep the input order."""
    if workers <= 1 or len(configs) <= 1:
        return [lint(c) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lint, configs))


def has_error(findings: Iterable[LintFinding]) -> bool:
    return any(f.severity == Severity.ERROR for f in findings)


def summarize(results: Sequence[Sequence[LintFinding]]) -> LintSummary:
    """Per-rule config counts, configs with at least one ERROR, and clean configs.

    A config is clean when it has no ERROR or WARN finding.
    """
    total = len(results)
    if total == 0:
        return LintSummary()
    rows = [
        {"config": i, "rule_id": f.rule_id, "severity": f.severity.value}
        for i, findings in enumerate(results)
        for f in findings
    ]
    frame = pd.DataFrame(rows, columns=["config", "rule_id", "severity"])
    per_rule: Dict[str, int] = {}
    if not frame.empty:
        counts = frame.groupby("rule_id")["config"].nunique().sort_index()
        per_rule = {str(rule): int(n) for rule, n in counts.items()}
    with_error = int(frame.loc[frame["severity"] == Severity.ERROR.value, "config"].nunique())
    flagged = frame["severity"].isin([Severity.ERROR.value, Severity.WARN.value])
    clean = total - int(frame.loc[flagged, "config"].nunique())
    return LintSummary(
        total_configs=total,
        per_rule=per_rule,
        configs_with_error=with_error,
        clean=clean,
        error_pct=round(100.0 * with_error / total, 1),
        clean_pct=round(100.0 * clean / total, 1),
    )


def render(findings: Sequence[LintFinding], structured: bool = False) -> str:
    if structured:
        return "\n".join(f.model_dump_json() for f in findings)
    return "\n".join(f.render() for f in findings)


def exit_status(findings: Iterable[LintFinding]) -> int:
    """0 clean, 1 warnings only, 2 any error."""
    severities = {f.severity for f in findings}
    if Severity.ERROR in severities:
        return 2
    if Severity.WARN in severities:
        return 1
    return 0
