"""
Tool registry: named total functions an agent term may invoke.
"""

import ast
import logging
import operator
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from lambdagent.core.errors import OracleError
from lambdagent.models.types import STR, Type
from lambdagent.services.react_engine import register_react_primitives

logger = logging.getLogger(__name__)

ToolFn = Callable[[Any], str]


@dataclass(frozen=True)
class ToolSpec:
    name: str
    fn: ToolFn
    domain: Type = STR
    codomain: Type = STR
    description: str = ""
    primitive: bool = False


class ToolRegistry:
    """Map from tool id to a total string function.

    Always holds ``terminate`` and the ``react.*`` runtime primitives.
    """

    def __init__(self, specs: Iterable[ToolSpec] = ()):
        self._tools: Dict[str, ToolSpec] = {}
        self.register("terminate", lambda text: text, description="identity; ends a ReAct loop")
        register_react_primitives(self)
        for spec in specs:
            self._tools[spec.name] = spec

    def register(
        self,
        name: str,
        fn: ToolFn,
        domain: Type = STR,
        codomain: Type = STR,
        description: str = "",
        primitive: bool = False,
    ) -> ToolSpec:
        spec = ToolSpec(name, fn, domain, codomain, description, primitive)
        self._tools[name] = spec
        return spec

    def declare(self, name: str, description: str = "declared, not bound") -> None:
        """Give ``name`` a Str → Str signature without an implementation."""
        if name in self._tools:
            return

        def unbound(_: Any) -> str:
            raise OracleError(f"tool {name!r} has no local implementation")

        self.register(name, unbound, description=description)

    def bind_table(self, name: str, table: Mapping[str, str]) -> None:
        """Bind ``name`` to a lookup table of scripted outputs."""

        def lookup(args: Any) -> str:
            key = str(args)
            if key in table:
                return table[key]
            if "*" in table:
                return table["*"]
            raise OracleError(f"tool {name!r} has no scripted output for {key!r}")

        self.register(name, lookup, description="scripted")

    def get(self, name: str) -> ToolSpec:
        try:
            return self._tools[name]
        except KeyError:
            raise OracleError(f"unknown tool {name!r}") from None

    def invoke(self, name: str, arg: Any) -> str:
        spec = self.get(name)
        try:
            return spec.fn(arg)
        except OracleError:
            raise
        except Exception as e:
            logger.warning("tool %s raised %s", name, e)
            raise OracleError(f"tool {name!r} failed: {e}") from e

    def signatures(self) -> Dict[str, Tuple[Type, Type]]:
        return {name: (spec.domain, spec.codomain) for name, spec in self._tools.items()}

    def names(self, include_primitives: bool = False) -> List[str]:
        return sorted(n for n, s in self._tools.items() if include_primitives or not s.primitive)

    def specs(self, include_primitives: bool = False) -> List[ToolSpec]:
        return [self._tools[n] for n in self.names(include_primitives)]

    def __contains__(self, name: str) -> bool:
        return name in self._tools


_BINARY = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.FloorDiv: operator.floordiv,
    ast.Mod: operator.mod,
    ast.Pow: operator.pow,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def _arith(node: ast.AST) -> float:
    if isinstance(node, ast.Expression):
        return _arith(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.BinOp) and type(node.op) in _BINARY:
        return _BINARY[type(node.op)](_arith(node.left), _arith(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_arith(node.operand))
    raise ValueError("unsupported expression")


def _number(value: float) -> str:
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    return str(value)


def calc(text: str) -> str:
    """Evaluate an arithmetic expression; ``error: ...`` on bad input."""
    try:
        return _number(_arith(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError, OverflowError) as e:
        return f"error: {e}"


def sum_numbers(text: str) -> str:
    total = 0.0
    for token in text.replace(",", " ").split():
        try:
            total += float(token)
        except ValueError:
            continue
    return _number(total)


def factorial_step(state: str) -> str:
    """One iteration of the counter/accumulator factorial on ``"i|acc"``."""
    i, acc = (int(part) for part in state.strip().split("|"))
    return f"{i + 1}|{acc * max(i, 1)}"


def default_registry(extra: Optional[Iterable[ToolSpec]] = None) -> ToolRegistry:
    registry = ToolRegistry()
    registry.register("echo", lambda text: text, description="identity")
    registry.register("upper", lambda text: text.upper(), description="uppercase the input")
    registry.register("lower", lambda text: text.lower(), description="lowercase the input")
    registry.register("reverse", lambda text: text[::-1], description="reverse the characters")
    registry.register("wordcount", lambda text: str(len(text.split())), description="count words")
    registry.register("calc", calc, description="evaluate an arithmetic expression")
    registry.register("sum", sum_numbers, description="sum the numbers in the input")
    registry.register("fact.step", factorial_step, description="factorial step on 'i|acc'")
    for spec in extra or ():
        registry.register(spec.name, spec.fn, spec.domain, spec.codomain, spec.description, spec.primitive)
    return registry
