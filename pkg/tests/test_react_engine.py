import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import make_ctx
from lambdagent.models.outcome import Ok, RouteError
from lambdagent.models.schemas import AgentType, CanonicalConfig, MemorySpec
from lambdagent.models.terms import ModelParams
from lambdagent.models.trace import LlmCall, MemWrite, Phase, ToolCall
from lambdagent.models.values import StrV
from lambdagent.services.compiler import compile_config
from lambdagent.services.evaluator import reduce
from lambdagent.services.oracles import ScriptedOracle
from lambdagent.services.react_engine import TERMINATE, final_answer, observe, parse_action, run_react

PROMPT = "You are a calculator."
CALC_STEPS = [
    "Thought: first\nACTION: calc\nARGS: 3*5",
    "Thought: again\nACTION: calc\nARGS: 15*7",
    "ACTION: terminate\nARGS: 105",
]


class TestParseAction:
    def test_action_and_args(self):
        assert parse_action("Thought: hmm\nACTION: search\nARGS: weather in Paris") == ("search", "weather in Paris")

    def test_multiline_args(self):
        assert parse_action("ACTION: shell\nARGS: ls\n-la") == ("shell", "ls\n-la")

    def test_missing_args(self):
        assert parse_action("ACTION: search") == ("search", "")

    def test_plain_reply_is_final(self):
        assert parse_action("The answer is 4.") == (TERMINATE, "The answer is 4.")


def test_observe_appends():
    assert observe("q", "result") == "q\nObservation: result"


def test_final_answer_falls_back_to_state():
    assert final_answer("state", "ACTION: terminate\nARGS: 42") == "42"
    assert final_answer("state", "ACTION: terminate") == "state"


def calc_config(max_steps=5, tools=("calc", "terminate"), memory=None) -> CanonicalConfig:
    return CanonicalConfig(
        agent_id="calculator",
        agent_type=AgentType.REACT,
        model={"name": "scripted"},
        system_prompt=PROMPT,
        max_steps=max_steps,
        tools=list(tools),
        memory=memory,
    )


def script(replies) -> ScriptedOracle:
    return ScriptedOracle(sequences={PROMPT: list(replies)})


class TestRunReact:
    def test_terminates_with_answer(self):
        ctx = make_ctx(script(CALC_STEPS))
        outcome = run_react(PROMPT, ModelParams("scripted"), ["calc", TERMINATE], 5, None, "3*5*7", ctx)
        assert outcome == Ok(StrV("105"))
        assert ctx.trace.count(LlmCall) == 3
        assert [e.tool_id for e in ctx.trace.of(ToolCall)] == ["calc", "calc", TERMINATE]

    def test_phases_in_order(self):
        ctx = make_ctx(script(CALC_STEPS))
        run_react(PROMPT, ModelParams("scripted"), ["calc", TERMINATE], 5, None, "3*5*7", ctx)
        names = [e.name for e in ctx.trace.of(Phase)]
        assert names[:7] == ["Think", "Parse", "Route", "Invoke", "Observe", "Update", "Check"]

    def test_truncates_at_bound(self):
        ctx = make_ctx(script(["ACTION: calc\nARGS: 1+1"]))
        outcome = run_react(PROMPT, ModelParams("scripted"), ["calc"], 2, None, "q", ctx)
        assert outcome.text == "q\nObservation: 2\nObservation: 2"
        assert ctx.trace.count(LlmCall) == 2

    def test_zero_steps_returns_input(self):
        ctx = make_ctx(script(CALC_STEPS))
        assert run_react(PROMPT, ModelParams("scripted"), ["calc"], 0, None, "q", ctx) == Ok(StrV("q"))
        assert len(ctx.trace) == 0

    def test_unknown_action(self):
        ctx = make_ctx(script(["ACTION: browse\nARGS: x"]))
        assert run_react(PROMPT, ModelParams("scripted"), ["calc"], 3, None, "q", ctx) == RouteError("browse")

    def test_negative_bound(self):
        with pytest.raises(ValueError):
            run_react(PROMPT, ModelParams("scripted"), ["calc"], -1, None, "q", make_ctx())


class TestCompiledLoop:
    def test_compiled_loop_matches_engine(self):
        compiled_ctx = make_ctx(script(CALC_STEPS))
        compiled = reduce(compile_config(calc_config()), "3*5*7", compiled_ctx)
        engine_ctx = make_ctx(script(CALC_STEPS))
        engine = run_react(PROMPT, ModelParams("scripted"), ["calc", TERMINATE], 5, None, "3*5*7", engine_ctx)
        assert compiled.text == engine.text == "105"
        assert compiled_ctx.trace.of(LlmCall) == engine_ctx.trace.of(LlmCall)
        assert compiled_ctx.trace.of(ToolCall) == engine_ctx.trace.of(ToolCall)

    def test_memory_records_step_summaries(self):
        ctx = make_ctx(script(CALC_STEPS))
        reduce(compile_config(calc_config(memory=MemorySpec(size=10))), "3*5*7", ctx)
        keys = [e.key for e in ctx.trace.of(MemWrite)]
        assert keys == ["step:1", "step:2", "turn:1"]
        assert ctx.store.read("step:1").text.endswith("| 15")

    def test_route_error_for_unlisted_tool(self):
        ctx = make_ctx(script(["ACTION: shell\nARGS: rm -rf /"]))
        assert reduce(compile_config(calc_config()), "q", ctx) == RouteError("shell")


actions = st.lists(
    st.one_of(
        st.builds(lambda e: f"ACTION: calc\nARGS: {e}", st.sampled_from(["1+1", "2*3", "10/4", "7-9"])),
        st.builds(lambda a: f"ACTION: terminate\nARGS: {a}", st.sampled_from(["done", "42", ""])),
        st.just("no action, just an answer"),
    ),
    min_size=1,
    max_size=6,
)


@settings(max_examples=60, deadline=None)
@given(actions, st.integers(min_value=0, max_value=5))
def test_compiled_loop_agrees_with_engine(replies, bound):
    compiled_ctx = make_ctx(script(replies))
    compiled = reduce(compile_config(calc_config(max_steps=bound)), "start", compiled_ctx)
    engine_ctx = make_ctx(script(replies))
    engine = run_react(PROMPT, ModelParams("scripted"), ["calc", TERMINATE], bound, None, "start", engine_ctx)
    assert compiled == engine
    assert compiled_ctx.trace.of(LlmCall) == engine_ctx.trace.of(LlmCall)
    assert compiled_ctx.trace.of(ToolCall) == engine_ctx.trace.of(ToolCall)
