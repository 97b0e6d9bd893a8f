"""
Runtime values and their conversion to and from value terms.
"""

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from lambdagent.models.terms import (
    Abs,
    App,
    LabelLit,
    LamOracle,
    ModelParams,
    Pair,
    StrLit,
    Term,
    Tool,
    Var,
    is_value,
)
from lambdagent.models.types import STR, Type
from lambdagent.core.errors import ContractViolation


@dataclass(frozen=True)
class StrV:
    text: str


@dataclass(frozen=True)
class ClosureV:
    param: str
    param_type: Type
    body: Term
    captured_env: Mapping[str, "Value"] = field(default_factory=dict, compare=False, hash=False)


@dataclass(frozen=True)
class PairV:
    left: "Value"
    right: "Value"


@dataclass(frozen=True)
class ToolV:
    tool_id: str


@dataclass(frozen=True)
class OracleV:
    prompt: str
    params: ModelParams


@dataclass(frozen=True)
class LabelV:
    label: str


Value = Union[StrV, ClosureV, PairV, ToolV, OracleV, LabelV]


def to_value(t: Term, fresh: Optional[str] = None) -> Value:
    """Read a value term as a runtime value.

    Function formers other than abstractions become closures over their
    eta-expansion, so every function value carries a parameter.
    """
    if not is_value(t):
        raise ContractViolation(f"not a value: {type(t).__name__}")
    if isinstance(t, StrLit):
        return StrV(t.text)
    if isinstance(t, LabelLit):
        return LabelV(t.label)
    if isinstance(t, Pair):
        return PairV(to_value(t.left), to_value(t.right))
    if isinstance(t, Tool):
        return ToolV(t.tool_id)
    if isinstance(t, LamOracle):
        return OracleV(t.prompt, t.params)
    if isinstance(t, Abs):
        return ClosureV(t.param, t.param_type, t.body)
    name = fresh or "x"
    return ClosureV(name, STR, App(t, Var(name)))


def from_value(v: Union[Value, str]) -> Term:
    if isinstance(v, str):
        return StrLit(v)
    if isinstance(v, StrV):
        return StrLit(v.text)
    if isinstance(v, LabelV):
        return LabelLit(v.label)
    if isinstance(v, PairV):
        return Pair(from_value(v.left), from_value(v.right))
    if isinstance(v, ToolV):
        return Tool(v.tool_id)
    if isinstance(v, OracleV):
        return LamOracle(v.prompt, v.params)
    if isinstance(v, ClosureV):
        return Abs(v.param, v.param_type, v.body)
    raise ContractViolation(f"not a value: {v!r}")


def value_text(v: Value) -> str:
    """Plain-text rendering used for CLI results and traces."""
    if isinstance(v, StrV):
        return v.text
    if isinstance(v, LabelV):
        return v.label
    if isinstance(v, PairV):
        return f"⟨{value_text(v.left)}, {value_text(v.right)}⟩"
    if isinstance(v, ToolV):
        return f"tool[{v.tool_id}]"
    if isinstance(v, OracleV):
        return f"lam {v.prompt!r}"
    return f"<closure λ{v.param}>"
