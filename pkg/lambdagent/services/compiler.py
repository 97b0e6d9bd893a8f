"""
Compilation of canonical configs into agent terms.
"""

import logging
from typing import List, Optional

from lambdagent.core.config import settings
from lambdagent.core.errors import CompileError
from lambdagent.models.schemas import AgentType, CanonicalConfig, FrameworkKind, HintKind
from lambdagent.models.terms import (
    Abs,
    App,
    Case,
    Comp,
    Fix,
    Guard,
    If,
    LamOracle,
    Mem,
    ModelParams,
    Pair,
    StoreRef,
    Term,
    Tool,
    Var,
)
from lambdagent.models.types import STR, Arrow
from lambdagent.services.react_engine import ANSWER_TOOL, ARGS_TOOL, OBSERVE_TOOL, PARSE_TOOL, TERMINATE
from lambdagent.services.tools import ToolRegistry

logger = logging.getLogger(__name__)

SELF_TYPE = Arrow(STR, STR)
ROUTE_INSTRUCTION = "\nReply with exactly one of: "


def _join(prefix: str, field: str) -> str:
    return f"{prefix}.{field}" if prefix else field


class _Compiler:
    def __init__(self, default_max_steps: int, default_model: str, registry: Optional[ToolRegistry]):
        self.default_max_steps = default_max_steps
        self.default_model = default_model
        self.registry = registry

    def declare(self, names: List[str]) -> None:
        if self.registry is None:
            return
        for name in names:
            if name not in self.registry:
                logger.debug("declaring unbound tool %s", name)
                self.registry.declare(name)

    def params(self, c: CanonicalConfig, path: str) -> ModelParams:
        if c.model is not None:
            return ModelParams(c.model.name, c.model.temperature)
        if c.framework == FrameworkKind.CREWAI:
            return ModelParams(self.default_model)
        raise CompileError(f"agent {c.agent_id} has no model", _join(path, "model"))

    def bound(self, c: CanonicalConfig) -> int:
        return c.max_steps if c.max_steps is not None else self.default_max_steps

    def compile(self, c: CanonicalConfig, path: str = "", in_memory: bool = False) -> Term:
        if c.memory is not None and in_memory:
            raise CompileError("memory scopes cannot nest", _join(path, "memory"))
        term = self.core(c, path, in_memory or c.memory is not None)
        predicate = c.guard_predicate()
        if predicate is not None:
            term = Guard(term, predicate)
        if c.memory is not None:
            ref = StoreRef(c.agent_id, c.memory.strategy, c.memory.size, c.memory.ttl)
            term = Mem(term, ref)
        return term

    def core(self, c: CanonicalConfig, path: str, in_memory: bool) -> Term:
        kind = c.agent_type
        if kind == AgentType.SIMPLE:
            return LamOracle(c.system_prompt or "", self.params(c, path))
        if kind == AgentType.REACT:
            return self.react(c, path)
        if kind == AgentType.TOOL:
            return self.tool(c, path)
        if kind == AgentType.CHAIN:
            return self.chain(c, path, in_memory)
        if kind == AgentType.PARALLEL:
            return self.parallel(c, path, in_memory)
        if kind == AgentType.ROUTER:
            return self.router(c, path, in_memory)
        if kind == AgentType.LOOP:
            return self.loop(c, path, in_memory)
        raise CompileError(f"unsupported agent type {kind}", _join(path, "type"))

    def react(self, c: CanonicalConfig, path: str) -> Term:
        tools = [name for name in c.all_tools if name != TERMINATE]
        self.declare(tools)
        branches = [
            (
                name,
                Abs("r", STR, App(
                    Var("s"),
                    App(Tool(OBSERVE_TOOL), Pair(Var("x"), Pair(Var("r"), App(Tool(name), App(Tool(ARGS_TOOL), Var("r")))))),
                )),
            )
            for name in tools
        ]
        if c.has_terminate or c.has_hint(
            HintKind.FRAMEWORK_INTERNAL, HintKind.DAG_END_NODE, HintKind.NO_DELEGATION, HintKind.IS_TERMINATION_MSG
        ):
            branches.append(
                (TERMINATE, Abs("r", STR, App(Tool(TERMINATE), App(Tool(ANSWER_TOOL), Pair(Var("x"), Var("r")))))),
            )
        think = App(LamOracle(c.system_prompt or "", self.params(c, path)), Var("x"))
        step = Abs("t", STR, App(Case(Tool(PARSE_TOOL), tuple(branches), None), Var("t")))
        body = Abs("s", SELF_TYPE, Abs("x", STR, App(step, think)))
        return Fix(self.bound(c), body)

    def tool(self, c: CanonicalConfig, path: str) -> Term:
        names = c.all_tools
        if len(names) != 1:
            raise CompileError(f"tool agent {c.agent_id} must name exactly one tool", _join(path, "mcp.localTools"))
        self.declare(names)
        return Tool(names[0])

    def chain(self, c: CanonicalConfig, path: str, in_memory: bool) -> Term:
        if not c.stages:
            raise CompileError(f"chain {c.agent_id} has no stages", _join(path, "stages"))
        terms = []
        last = len(c.stages) - 1
        for i, stage in enumerate(c.stages):
            stage_path = _join(path, f"stages[{i}]")
            if stage.agent_type == AgentType.PARALLEL and i != last:
                raise CompileError("a parallel fan must be the last stage of a chain", stage_path)
            terms.append(self.compile(stage, stage_path, in_memory))
        return _nest(terms, Comp)

    def parallel(self, c: CanonicalConfig, path: str, in_memory: bool) -> Term:
        if not c.branches:
            raise CompileError(f"parallel {c.agent_id} has no branches", _join(path, "branches"))
        terms = [self.compile(b, _join(path, f"branches[{i}]"), in_memory) for i, b in enumerate(c.branches)]
        return _nest(terms, Pair)

    def router(self, c: CanonicalConfig, path: str, in_memory: bool) -> Term:
        routes_path = _join(path, "routes")
        if c.routes is None or c.routes.empty:
            raise CompileError(f"router {c.agent_id} has no routes", routes_path)
        if c.condition is not None:
            missing = [label for label in ("then", "else") if label not in c.routes.labeled]
            if missing:
                raise CompileError(f"conditional router needs a {missing[0]!r} route", routes_path)
            return If(
                c.condition_predicate(),
                self.compile(c.routes.labeled["then"], _join(routes_path, "then"), in_memory),
                self.compile(c.routes.labeled["else"], _join(routes_path, "else"), in_memory),
            )
        if c.group_chat:
            return self.group_chat(c, path, in_memory)
        branches = tuple(
            (label, self.compile(route, _join(routes_path, label), in_memory))
            for label, route in c.routes.labeled.items()
        )
        default = None
        if c.routes.default is not None:
            default = self.compile(c.routes.default, _join(routes_path, "default"), in_memory)
        selector = LamOracle(
            (c.system_prompt or "") + ROUTE_INSTRUCTION + ", ".join(label for label, _ in branches),
            self.params(c, path),
        )
        return Case(selector, branches, default)

    def group_chat(self, c: CanonicalConfig, path: str, in_memory: bool) -> Term:
        routes_path = _join(path, "routes")
        branches = [
            (label, Comp(self.compile(member, _join(routes_path, label), in_memory), Var("s")))
            for label, member in c.routes.labeled.items()
        ]
        if c.has_hint(HintKind.IS_TERMINATION_MSG):
            branches.append((TERMINATE, Tool(TERMINATE)))
        selector = LamOracle(
            (c.system_prompt or "") + ROUTE_INSTRUCTION + ", ".join(label for label, _ in branches),
            self.params(c, path),
        )
        default = None
        if c.routes.default is not None:
            default = self.compile(c.routes.default, _join(routes_path, "default"), in_memory)
        body = Abs("s", SELF_TYPE, Abs("x", STR, App(Case(selector, tuple(branches), default), Var("x"))))
        return Fix(self.bound(c), body)

    def loop(self, c: CanonicalConfig, path: str, in_memory: bool) -> Term:
        if c.body is None:
            raise CompileError(f"loop {c.agent_id} has no body", _join(path, "body"))
        inner = self.compile(c.body, _join(path, "body"), in_memory)
        return Fix(self.bound(c), Abs("s", SELF_TYPE, Abs("x", STR, App(Var("s"), App(inner, Var("x"))))))


def _nest(terms: List[Term], former) -> Term:
    result = terms[-1]
    for term in reversed(terms[:-1]):
        result = former(term, result)
    return result


def compile_config(
    c: CanonicalConfig,
    default_max_steps: Optional[int] = None,
    default_model: Optional[str] = None,
    registry: Optional[ToolRegistry] = None,
) -> Term:
    """Compile ``c`` to a closed term.

    Tools named by the config but missing from ``registry`` are declared
    there so the result typechecks; invoking them fails at run time.
    """
    compiler = _Compiler(
        default_max_steps if default_max_steps is not None else settings.default_max_steps,
        default_model or settings.default_model,
        registry,
    )
    term = compiler.compile(c)
    logger.debug("compiled %s (%s)", c.agent_id, c.agent_type.value)
    return term
