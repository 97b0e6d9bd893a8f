"""
Call-by-value small-step evaluator.

``step`` performs exactly one reduction by substitution; ``reduce`` iterates
it to a value or an error outcome. Every oracle call, tool call, loop
unfolding, guard check, memory write and probabilistic choice is appended to
the context's trace.
"""

import logging
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional, Union

import numpy as np

from lambdagent.core.errors import ContractViolation, OracleError
from lambdagent.models.outcome import GuardStuck, Ok, OracleFailure, Outcome, RouteError
from lambdagent.models.store import Store
from lambdagent.models.terms import (
    Abs,
    App,
    Case,
    Checking,
    Comp,
    Dispatch,
    Fix,
    Guard,
    If,
    LabelLit,
    LamOracle,
    Mem,
    Pair,
    Prob,
    Proj,
    Scoped,
    StoreRef,
    StrLit,
    Term,
    Tool,
    Var,
    is_value,
)
from lambdagent.models.trace import GuardCheck, LlmCall, LoopIter, MemWrite, ProbChoice, ToolCall, Trace
from lambdagent.models.types import STR, Arrow, Type, Variant, erase
from lambdagent.models.values import StrV, Value, from_value, to_value
from lambdagent.services.oracles import OracleProvider
from lambdagent.services.react_engine import OBSERVE_TOOL, step_summary
from lambdagent.services.syntax import free_vars, fresh_name, substitute
from lambdagent.services.tools import ToolRegistry, default_registry
from lambdagent.services.typechecker import TypeContext, infer

logger = logging.getLogger(__name__)

ERROR_OUTCOMES = (GuardStuck, RouteError, OracleFailure)


class LogicalClock:
    """Injected, monotone seconds counter."""

    def __init__(self, start: float = 0.0):
        self._now = float(start)

    def now(self) -> float:
        return self._now

    def advance(self, seconds: float) -> float:
        if seconds < 0:
            raise ValueError("clock is monotone")
        self._now += seconds
        return self._now


@dataclass
class EvalContext:
    oracle: OracleProvider
    tools: ToolRegistry = field(default_factory=default_registry)
    store: Optional[Store] = None
    rng_seed: int = 0
    clock: LogicalClock = field(default_factory=LogicalClock)
    trace: Trace = field(default_factory=Trace)
    summary_max_chars: int = 512

    def __post_init__(self):
        self.rng = np.random.default_rng(self.rng_seed)
        self.llm_calls = 0
        self.observations = 0
        self.turns = 0
        self._scope_depth = 0

    def type_context(self) -> TypeContext:
        return TypeContext.from_registry(self.tools, self.store.typing if self.store else None)

    def store_for(self, ref: StoreRef) -> Store:
        if self.store is None:
            self.store = Store(ref.capacity, ref.ttl_seconds)
        return self.store

    @property
    def in_scope(self) -> bool:
        return self._scope_depth > 0

    @contextmanager
    def scope(self, ref: StoreRef) -> Iterator[Store]:
        store = self.store_for(ref)
        self._scope_depth += 1
        try:
            yield store
        finally:
            self._scope_depth -= 1

    def write(self, key: str, value: Value, ty: Type) -> None:
        store = self.store
        if store is None:
            return
        store.write(key, value, ty, self.llm_calls, self.clock.now())
        self.trace.append(MemWrite(key=key))

    def reset_trace(self) -> Trace:
        previous, self.trace = self.trace, Trace()
        return previous


Step = Union[Term, GuardStuck, RouteError, OracleFailure]


def step(t: Term, ctx: EvalContext) -> Step:
    """Perform exactly one reduction of the closed, well-typed term ``t``."""
    if is_value(t):
        raise ContractViolation("cannot step a value")
    return _step(t, ctx)


def _congruence(sub: Term, ctx: EvalContext, rebuild: Callable[[Term], Term]) -> Step:
    result = _step(sub, ctx)
    if isinstance(result, ERROR_OUTCOMES):
        return result
    return rebuild(result)


def _step(t: Term, ctx: EvalContext) -> Step:
    if isinstance(t, App):
        if not is_value(t.fn):
            return _congruence(t.fn, ctx, lambda fn: App(fn, t.arg))
        if not is_value(t.arg):
            return _congruence(t.arg, ctx, lambda arg: App(t.fn, arg))
        return _apply(t.fn, t.arg, ctx)

    if isinstance(t, Pair):
        if not is_value(t.left):
            return _congruence(t.left, ctx, lambda left: Pair(left, t.right))
        return _congruence(t.right, ctx, lambda right: Pair(t.left, right))

    if isinstance(t, Proj):
        if not is_value(t.inner):
            return _congruence(t.inner, ctx, lambda inner: Proj(t.index, inner))
        if not isinstance(t.inner, Pair):
            raise ContractViolation("projection of a non-pair")
        return t.inner.left if t.index == 1 else t.inner.right

    if isinstance(t, Prob):
        u = float(ctx.rng.random())
        left = u < t.p
        ctx.trace.append(ProbChoice(side="left" if left else "right", p=t.p, seed=ctx.rng_seed))
        return t.left if left else t.right

    if isinstance(t, Dispatch):
        if not is_value(t.scrutinee):
            return _congruence(
                t.scrutinee, ctx, lambda s: Dispatch(s, t.branches, t.default, t.arg)
            )
        return _route(t, ctx)

    if isinstance(t, Checking):
        if not is_value(t.inner):
            return _congruence(t.inner, ctx, lambda inner: Checking(inner, t.predicate))
        return _check(t, ctx)

    if isinstance(t, Scoped):
        if not is_value(t.inner):
            with ctx.scope(t.store):
                return _congruence(t.inner, ctx, lambda inner: Scoped(inner, t.store))
        ctx.store_for(t.store)
        ctx.turns += 1
        ctx.write(f"turn:{ctx.turns}", to_value(t.inner), _type_of(t.inner, ctx))
        return t.inner

    if isinstance(t, Var):
        raise ContractViolation(f"free variable {t.name}")
    raise ContractViolation(f"no reduction for {type(t).__name__}")


def _apply(fn: Term, arg: Term, ctx: EvalContext) -> Step:
    if isinstance(fn, Abs):
        return substitute(fn.body, fn.param, arg)

    if isinstance(fn, LamOracle):
        text = _text(arg)
        try:
            output = ctx.oracle.complete(fn.prompt, fn.params, text)
        except OracleError as e:
            return OracleFailure(str(e))
        except Exception as e:
            return OracleFailure(f"oracle raised {type(e).__name__}: {e}")
        ctx.llm_calls += 1
        ctx.trace.append(LlmCall(prompt=fn.prompt, input=text, output=output, step_index=ctx.llm_calls))
        return StrLit(output)

    if isinstance(fn, Tool):
        return _invoke(fn.tool_id, arg, ctx)

    if isinstance(fn, Comp):
        return App(fn.second, App(fn.first, arg))

    if isinstance(fn, If):
        branch = fn.then_branch if fn.cond.holds(_text(arg)) else fn.else_branch
        return App(branch, arg)

    if isinstance(fn, Fix):
        if fn.bound == 0:
            return arg
        ctx.trace.append(LoopIter(remaining_bound=fn.bound - 1))
        x = fresh_name("x", free_vars(fn.body))
        self_ref = Abs(x, _self_type(fn.body, ctx), App(Fix(fn.bound - 1, fn.body), Var(x)))
        return App(App(fn.body, self_ref), arg)

    if isinstance(fn, Pair):
        return Pair(App(fn.left, arg), App(fn.right, arg))

    if isinstance(fn, Case):
        return Dispatch(App(fn.classifier, arg), fn.branches, fn.default, arg)

    if isinstance(fn, Guard):
        return Checking(App(fn.inner, arg), fn.predicate)

    if isinstance(fn, Mem):
        return Scoped(App(fn.inner, arg), fn.store)

    raise ContractViolation(f"{type(fn).__name__} is not a function")


def _invoke(tool_id: str, arg: Term, ctx: EvalContext) -> Step:
    try:
        spec = ctx.tools.get(tool_id)
        payload = _python(arg)
        output = ctx.tools.invoke(tool_id, payload)
    except OracleError as e:
        return OracleFailure(str(e))
    if not spec.primitive:
        ctx.trace.append(ToolCall(tool_id=tool_id, args=_text(arg), output=output))
    if tool_id == OBSERVE_TOOL and ctx.in_scope:
        ctx.observations += 1
        _, (think, observation) = payload
        summary = step_summary(think, observation, ctx.summary_max_chars)
        ctx.write(f"step:{ctx.observations}", StrV(summary), STR)
    if isinstance(erase(spec.codomain), Variant):
        return LabelLit(output.strip())
    return StrLit(output)


def _route(t: Dispatch, ctx: EvalContext) -> Step:
    scrutinee = t.scrutinee
    if isinstance(scrutinee, LabelLit):
        label = scrutinee.label
    elif isinstance(scrutinee, StrLit):
        label = scrutinee.text.strip()
    else:
        raise ContractViolation("case classifier returned a non-label value")
    for name, body in t.branches:
        if name == label:
            return App(body, t.arg)
    if t.default is not None:
        return App(t.default, t.arg)
    logger.debug("no route for label %r", label)
    return RouteError(label)


def _check(t: Checking, ctx: EvalContext) -> Step:
    passed = t.predicate.holds(_text(t.inner))
    ctx.trace.append(GuardCheck(predicate=t.predicate.render(), passed=passed))
    if passed:
        return t.inner
    return GuardStuck(t.predicate, to_value(t.inner))


def _self_type(body: Term, ctx: EvalContext) -> Type:
    if isinstance(body, Abs) and isinstance(body.param_type, Arrow):
        return body.param_type.dom
    ty = infer(ctx.type_context(), body)
    if isinstance(ty, Arrow) and isinstance(ty.dom, Arrow):
        return ty.dom.dom
    return STR


def _type_of(value: Term, ctx: EvalContext) -> Type:
    if isinstance(value, StrLit):
        return STR
    return infer(ctx.type_context(), value)


def _text(t: Term) -> str:
    if isinstance(t, StrLit):
        return t.text
    if isinstance(t, LabelLit):
        return t.label
    if isinstance(t, Pair):
        return f"⟨{_text(t.left)}, {_text(t.right)}⟩"
    raise ContractViolation(f"expected a string value, got {type(t).__name__}")


def _python(t: Term) -> Any:
    if isinstance(t, Pair):
        return (_python(t.left), _python(t.right))
    return _text(t)


def reduce(t: Term, input: Union[Value, str, Term], ctx: EvalContext) -> Outcome:
    """Apply ``t`` to ``input`` and step to a value or an error outcome."""
    arg = input if isinstance(input, Term) else from_value(input)
    term: Term = App(t, arg)
    while not is_value(term):
        result = step(term, ctx)
        if isinstance(result, ERROR_OUTCOMES):
            logger.debug("evaluation stopped: %s", result.text)
            return result
        term = result
    return Ok(to_value(term), ctx.store)


def evaluate(t: Term, ctx: EvalContext) -> Outcome:
    """Step a closed, not necessarily applied, term to a value or an error outcome."""
    term = t
    while not is_value(term):
        result = step(term, ctx)
        if isinstance(result, ERROR_OUTCOMES):
            return result
        term = result
    return Ok(to_value(term), ctx.store)
