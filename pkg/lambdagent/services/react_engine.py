"""
Big-step ReAct engine and the action protocol shared with compiled loops.

One iteration runs the phases Think, Parse, Route, Invoke, Observe, Update
and Check. A compiled ``react`` term reaches the same result through the
``react.*`` runtime primitives registered here.
"""

import logging
import re
from typing import TYPE_CHECKING, Optional, Sequence, Tuple

from lambdagent.core.errors import OracleError
from lambdagent.models.outcome import OracleFailure, Ok, Outcome, RouteError
from lambdagent.models.store import Store
from lambdagent.models.terms import ModelParams
from lambdagent.models.trace import LlmCall, LoopIter, MemWrite, Phase, ToolCall
from lambdagent.models.types import STR, Product
from lambdagent.models.values import StrV

if TYPE_CHECKING:
    from lambdagent.services.evaluator import EvalContext
    from lambdagent.services.tools import ToolRegistry

logger = logging.getLogger(__name__)

TERMINATE = "terminate"
PARSE_TOOL = "react.parse"
ARGS_TOOL = "react.args"
OBSERVE_TOOL = "react.observe"
ANSWER_TOOL = "react.answer"
OBSERVATION_SEPARATOR = "\nObservation: "

_ACTION = re.compile(r"^\s*ACTION:\s*(.*?)\s*$", re.MULTILINE)
_ARGS = re.compile(r"^\s*ARGS:[ \t]*", re.MULTILINE)


def parse_action(llm_output: str) -> Tuple[str, str]:
    """Split an oracle reply into ``(action, args)``.

    ``ACTION: <name>`` names the action; an ``ARGS:`` line after it carries
    the arguments (to the end of the reply). A reply without an ACTION line
    is a final answer: ``("terminate", reply)``.
    """
    match = _ACTION.search(llm_output)
    if match is None or not match.group(1):
        return TERMINATE, llm_output
    args_match = _ARGS.search(llm_output, match.end())
    args = llm_output[args_match.end():].strip() if args_match else ""
    return match.group(1), args


def observe(state: str, observation: str) -> str:
    return state + OBSERVATION_SEPARATOR + observation


def final_answer(state: str, reply: str) -> str:
    """The terminate branch returns the parsed args, or the state when they are empty."""
    _, args = parse_action(reply)
    return args if args.strip() else state


def step_summary(think: str, observation: str, limit: int = 512) -> str:
    return f"{think} | {observation}"[:limit]


def register_react_primitives(registry: "ToolRegistry") -> None:
    registry.register(PARSE_TOOL, lambda text: parse_action(text)[0], primitive=True,
                      description="action name of a ReAct reply")
    registry.register(ARGS_TOOL, lambda text: parse_action(text)[1], primitive=True,
                      description="action arguments of a ReAct reply")
    registry.register(
        OBSERVE_TOOL,
        lambda arg: observe(arg[0], arg[1][1]),
        domain=Product(STR, Product(STR, STR)),
        primitive=True,
        description="append a tool observation to the loop state",
    )
    registry.register(
        ANSWER_TOOL,
        lambda arg: final_answer(arg[0], arg[1]),
        domain=Product(STR, STR),
        primitive=True,
        description="final answer of a terminating ReAct reply",
    )


def run_react(
    prompt: str,
    params: ModelParams,
    tools: Sequence[str],
    max_steps: int,
    memory: Optional[Store],
    input: str,
    ctx: "EvalContext",
) -> Outcome:
    """Run at most ``max_steps`` ReAct iterations starting from ``input``."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    trace = ctx.trace
    state = input
    for i in range(1, max_steps + 1):
        trace.append(LoopIter(remaining_bound=max_steps - i))

        trace.append(Phase(name="Think"))
        try:
            think = ctx.oracle.complete(prompt, params, state)
        except OracleError as e:
            return OracleFailure(str(e))
        except Exception as e:
            return OracleFailure(f"oracle raised {type(e).__name__}: {e}")
        trace.append(LlmCall(prompt=prompt, input=state, output=think, step_index=i))

        trace.append(Phase(name="Parse"))
        action, args = parse_action(think)

        trace.append(Phase(name="Route"))
        if action not in tools:
            logger.debug("react step %d: unknown action %r", i, action)
            return RouteError(action)

        trace.append(Phase(name="Invoke"))
        if action == TERMINATE:
            answer = final_answer(state, think)
            trace.append(ToolCall(tool_id=TERMINATE, args=answer, output=answer))
            trace.append(Phase(name="Check"))
            return Ok(StrV(answer), memory)
        try:
            observation = ctx.tools.invoke(action, args)
        except OracleError as e:
            return OracleFailure(str(e))
        trace.append(ToolCall(tool_id=action, args=args, output=observation))

        trace.append(Phase(name="Observe"))
        next_state = observe(state, observation)

        trace.append(Phase(name="Update"))
        if memory is not None:
            summary = step_summary(think, observation, ctx.summary_max_chars)
            memory.write(f"step:{i}", StrV(summary), STR, i, ctx.clock.now())
            trace.append(MemWrite(key=f"step:{i}"))

        trace.append(Phase(name="Check"))
        state = next_state
    logger.debug("react loop truncated after %d steps", max_steps)
    return Ok(StrV(state), memory)
