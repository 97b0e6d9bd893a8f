"""
Evaluation trace events.

Events serialize to JSON lines with the discriminator first and the
remaining fields in declaration order.
"""

from typing import Annotated, Iterable, List, Literal, Type as PyType, Union

from pydantic import BaseModel, Field, TypeAdapter

PhaseName = Literal["Think", "Parse", "Route", "Invoke", "Observe", "Update", "Check"]
PHASES = ("Think", "Parse", "Route", "Invoke", "Observe", "Update", "Check")


class LlmCall(BaseModel):
    event: Literal["llm_call"] = "llm_call"
    prompt: str
    input: str
    output: str
    step_index: int


class ToolCall(BaseModel):
    event: Literal["tool_call"] = "tool_call"
    tool_id: str
    args: str
    output: str


class LoopIter(BaseModel):
    event: Literal["loop_iter"] = "loop_iter"
    remaining_bound: int


class GuardCheck(BaseModel):
    event: Literal["guard_check"] = "guard_check"
    predicate: str
    passed: bool


class MemWrite(BaseModel):
    event: Literal["mem_write"] = "mem_write"
    key: str


class ProbChoice(BaseModel):
    event: Literal["prob_choice"] = "prob_choice"
    side: Literal["left", "right"]
    p: float
    seed: int


class Phase(BaseModel):
    event: Literal["phase"] = "phase"
    name: PhaseName


TraceEvent = Annotated[
    Union[LlmCall, ToolCall, LoopIter, GuardCheck, MemWrite, ProbChoice, Phase],
    Field(discriminator="event"),
]

_event_adapter = TypeAdapter(TraceEvent)


class Trace:
    """Ordered event log of one evaluation."""

    def __init__(self, events: Iterable[BaseModel] = ()):
        self.events: List[BaseModel] = list(events)

    def append(self, event: BaseModel) -> None:
        self.events.append(event)

    def of(self, kind: PyType[BaseModel]) -> List[BaseModel]:
        return [e for e in self.events if isinstance(e, kind)]

    def count(self, kind: PyType[BaseModel]) -> int:
        return sum(1 for e in self.events if isinstance(e, kind))

    @property
    def oracle_calls(self) -> int:
        """LLM calls plus tool calls."""
        return self.count(LlmCall) + self.count(ToolCall)

    def token_count(self) -> int:
        """Whitespace tokens across every oracle input and output."""
        return sum(len(e.input.split()) + len(e.output.split()) for e in self.of(LlmCall))

    def to_jsonl(self) -> str:
        return "".join(e.model_dump_json() + "\n" for e in self.events)

    @classmethod
    def from_jsonl(cls, text: str) -> "Trace":
        return cls(_event_adapter.validate_json(line) for line in text.splitlines() if line.strip())

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __eq__(self, other) -> bool:
        return isinstance(other, Trace) and self.events == other.events


def render_event(event: BaseModel) -> str:
    """One human-readable line per event."""
    if isinstance(event, LlmCall):
        return f"[{event.step_index}] llm  {_clip(event.input)!r} -> {_clip(event.output)!r}"
    if isinstance(event, ToolCall):
        return f"     tool {event.tool_id}({_clip(event.args)!r}) -> {_clip(event.output)!r}"
    if isinstance(event, LoopIter):
        return f"     loop remaining={event.remaining_bound}"
    if isinstance(event, GuardCheck):
        return f"     guard {event.predicate} {'pass' if event.passed else 'FAIL'}"
    if isinstance(event, MemWrite):
        return f"     mem  write {event.key}"
    if isinstance(event, ProbChoice):
        return f"     prob {event.side} (p={event.p}, seed={event.seed})"
    if isinstance(event, Phase):
        return f"     phase {event.name}"
    return repr(event)


def _clip(text: str, width: int = 60) -> str:
    return text if len(text) <= width else text[: width - 3] + "..."
