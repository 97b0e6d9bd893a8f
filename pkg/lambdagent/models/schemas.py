"""
Pydantic models for canonical configs, lint findings and harness reports.
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from lambdagent.models.types import Predicate, parse_predicate


class FrameworkKind(str, Enum):
    CREWAI = "CrewAI"
    LANGCHAIN = "LangChain"
    AUTOGEN = "AutoGen"
    DIFY = "Dify"
    MULTI_AGENT = "MultiAgent"
    GENERIC = "Generic"
    LAMBDAGENT = "Lambdagent"

    @classmethod
    def parse(cls, name: str) -> "FrameworkKind":
        key = name.replace("-", "").replace("_", "").lower()
        for kind in cls:
            if kind.value.lower() == key:
                return kind
        raise ValueError(f"unknown framework {name!r}")


class AgentType(str, Enum):
    SIMPLE = "simple"
    REACT = "react"
    CHAIN = "chain"
    ROUTER = "router"
    PARALLEL = "parallel"
    TOOL = "tool"
    LOOP = "loop"


class HintKind(str, Enum):
    MAX_ITER = "maxIter"
    IS_TERMINATION_MSG = "isTerminationMsg"
    MAX_ROUNDS = "maxRounds"
    FRAMEWORK_INTERNAL = "frameworkInternal"
    DAG_END_NODE = "dagEndNode"
    NO_DELEGATION = "noDelegation"


class TerminationHint(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: HintKind
    value: Optional[int] = None

    def render(self) -> str:
        return f"{self.kind.value}({self.value})" if self.value is not None else self.kind.value


class ModelSpec(BaseModel):
    name: str
    temperature: float = Field(default=0.0, ge=0.0)


class OnlineTools(BaseModel):
    server: str
    tools: List[str] = Field(default_factory=list)


class MemorySpec(BaseModel):
    strategy: str = "memory"
    size: int = Field(default=20, ge=0)
    ttl: int = Field(default=0, ge=0)


def dedupe_hints(hints) -> List[TerminationHint]:
    """Hints without repeats, ordered by kind then value."""
    unique = {(h.kind.value, h.value): h for h in hints}
    return [unique[k] for k in sorted(unique, key=lambda k: (k[0], k[1] if k[1] is not None else -1))]


class RouteTable(BaseModel):
    labeled: Dict[str, "CanonicalConfig"] = Field(default_factory=dict)
    default: Optional["CanonicalConfig"] = None

    @property
    def empty(self) -> bool:
        return not self.labeled and self.default is None


class CanonicalConfig(BaseModel):
    """Framework-neutral agent configuration, the input to compile and lint."""

    agent_id: str = "agent"
    agent_type: AgentType
    model: Optional[ModelSpec] = None
    system_prompt: Optional[str] = None
    max_steps: Optional[int] = Field(default=None, ge=0)
    tools: List[str] = Field(default_factory=list)
    online_tools: List[OnlineTools] = Field(default_factory=list)
    routes: Optional[RouteTable] = None
    condition: Optional[Any] = None
    stages: Optional[List["CanonicalConfig"]] = None
    branches: Optional[List["CanonicalConfig"]] = None
    body: Optional["CanonicalConfig"] = None
    memory: Optional[MemorySpec] = None
    guard: Optional[Any] = None
    group_chat: bool = False
    termination_hints: List[TerminationHint] = Field(default_factory=list)
    framework: FrameworkKind = FrameworkKind.LAMBDAGENT
    source_path: str = ""
    extras: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("termination_hints")
    @classmethod
    def check_hints(cls, hints: List[TerminationHint]) -> List[TerminationHint]:
        return dedupe_hints(hints)

    @field_validator("guard", "condition")
    @classmethod
    def check_predicate(cls, v):
        if v is not None:
            parse_predicate(v)
        return v

    @property
    def all_tools(self) -> List[str]:
        """Online tool ids in server order, then local tools, without repeats."""
        seen: List[str] = []
        for group in self.online_tools:
            for name in group.tools:
                if name not in seen:
                    seen.append(name)
        for name in self.tools:
            if name not in seen:
                seen.append(name)
        return seen

    @property
    def has_terminate(self) -> bool:
        return "terminate" in self.all_tools

    def hint(self, kind: HintKind) -> Optional[TerminationHint]:
        for h in self.termination_hints:
            if h.kind == kind:
                return h
        return None

    def has_hint(self, *kinds: HintKind) -> bool:
        return any(h.kind in kinds for h in self.termination_hints)

    def guard_predicate(self) -> Optional[Predicate]:
        return parse_predicate(self.guard) if self.guard is not None else None

    def condition_predicate(self) -> Optional[Predicate]:
        return parse_predicate(self.condition) if self.condition is not None else None

    def subconfigs(self):
        """(path prefix, sub-config) pairs in pre-order of declaration."""
        for i, stage in enumerate(self.stages or []):
            yield f"stages[{i}]", stage
        for i, branch in enumerate(self.branches or []):
            yield f"branches[{i}]", branch
        if self.routes is not None:
            for label, route in self.routes.labeled.items():
                yield f"routes.{label}", route
            if self.routes.default is not None:
                yield "routes.default", self.routes.default
        if self.body is not None:
            yield "body", self.body


RouteTable.model_rebuild()
CanonicalConfig.model_rebuild()


class Severity(str, Enum):
    ERROR = "ERROR"
    WARN = "WARN"
    INFO = "INFO"

    @property
    def rank(self) -> int:
        return {"ERROR": 0, "WARN": 1, "INFO": 2}[self.value]


class LintFinding(BaseModel):
    model_config = ConfigDict(frozen=True)

    rule_id: str
    severity: Severity
    path: str
    message: str
    mitigation: Optional[str] = None

    def sort_key(self):
        return (self.severity.rank, self.rule_id, self.path)

    def render(self) -> str:
        line = f"{self.severity.value:<5} {self.rule_id:<6} {self.path}: {self.message}"
        if self.mitigation:
            line += f" ({self.mitigation})"
        return line


class LintSummary(BaseModel):
    total_configs: int = 0
    per_rule: Dict[str, int] = Field(default_factory=dict)
    configs_with_error: int = 0
    clean: int = 0
    error_pct: float = 0.0
    clean_pct: float = 0.0

    def render(self) -> str:
        lines = [f"{rule:<6} {count}" for rule, count in self.per_rule.items()]
        lines.append(
            f"configs with ≥1 ERROR = {self.configs_with_error} ({self.error_pct:.1f}%)"
        )
        lines.append(f"clean = {self.clean} ({self.clean_pct:.1f}%)")
        return "\n".join(lines)


class FaultKind(str, Enum):
    REMOVE_TERMINATE = "RemoveTerminate"
    EMPTY_SYSTEM_PROMPT = "EmptySystemPrompt"
    REMOVE_MODEL = "RemoveModel"
    ZERO_MAX_STEPS = "ZeroMaxSteps"
    EMPTY_ROUTES = "EmptyRoutes"

    @property
    def expected_rule(self) -> str:
        return {
            "RemoveTerminate": "L004a",
            "EmptySystemPrompt": "L001",
            "RemoveModel": "L002",
            "ZeroMaxSteps": "L003",
            "EmptyRoutes": "L005",
        }[self.value]


class FaultTally(BaseModel):
    applicable: int = 0
    detected: int = 0


class MatrixCell(BaseModel):
    baseline: str
    fault: FaultKind
    applicable: bool
    detected: bool
    expected_rule: str
    new_errors: List[str] = Field(default_factory=list)


class MatrixReport(BaseModel):
    injected: int = 0
    detected: int = 0
    false_positives_on_baselines: int = 0
    skipped_inapplicable: int = 0
    per_fault: Dict[FaultKind, FaultTally] = Field(default_factory=dict)
    cells: List[MatrixCell] = Field(default_factory=list)

    @property
    def recall(self) -> float:
        return self.detected / self.injected if self.injected else 1.0

    @property
    def precision(self) -> float:
        flagged = self.detected + self.false_positives_on_baselines
        return self.detected / flagged if flagged else 1.0


class SupplementHit(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    snippet: str
    file: str
    line: int

    @property
    def location(self) -> str:
        return f"{self.file}:{self.line}"


class PatternKind(str, Enum):
    CHAT_MODEL_CONSTRUCTOR = "chatModelConstructor"
    TERMINATION_MSG_ARG = "terminationMsgArg"
    TOOL_DECORATOR = "toolDecorator"


class SupplementIndex(BaseModel):
    constant_assignments: Dict[str, List[SupplementHit]] = Field(default_factory=dict)
    call_keyword_args: Dict[str, List[SupplementHit]] = Field(default_factory=dict)
    class_attributes: Dict[str, List[SupplementHit]] = Field(default_factory=dict)
    framework_patterns: Dict[PatternKind, List[SupplementHit]] = Field(default_factory=dict)
    errors: List[str] = Field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (
            self.constant_assignments
            or self.call_keyword_args
            or self.class_attributes
            or self.framework_patterns
        )
