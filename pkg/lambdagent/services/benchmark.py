"""
Micro-benchmarks of per-operation dispatch overhead.
"""

import time
from pathlib import Path
from typing import Callable, Dict, Optional

import numpy as np

from lambdagent.models.store import Store
from lambdagent.models.terms import Comp, Guard, If, Tool
from lambdagent.models.trace import ToolCall, Trace
from lambdagent.models.types import STR, MinWords, NonEmpty
from lambdagent.models.values import StrV
from lambdagent.services.compiler import compile_config
from lambdagent.services.evaluator import EvalContext, reduce
from lambdagent.services.frameworks import normalize
from lambdagent.services.loader import load_document
from lambdagent.services.oracles import ScriptedOracle

SAMPLE_CONFIG = Path(__file__).resolve().parent.parent / "data" / "coder_agent.yaml"


def median_us(fn: Callable[[], object], repeats: int = 200, warmup: int = 10) -> float:
    """Median wall time of ``fn`` in microseconds."""
    for _ in range(warmup):
        fn()
    samples = np.empty(repeats, dtype=np.float64)
    for i in range(repeats):
        start = time.perf_counter_ns()
        fn()
        samples[i] = time.perf_counter_ns() - start
    return float(np.median(samples)) / 1000.0


def benchmark(repeats: int = 200, config: Optional[Path] = None) -> Dict[str, float]:
    """Median microseconds per operation; ``compile`` is a whole compile of the sample ReAct config."""
    ctx = EvalContext(oracle=ScriptedOracle(default=""))

    def run(term, text="hello world"):
        ctx.reset_trace()
        return reduce(term, text, ctx)

    pipeline = Comp(Tool("upper"), Comp(Tool("reverse"), Tool("lower")))
    branch = If(MinWords(2), Tool("upper"), Tool("lower"))
    guarded = Guard(Tool("echo"), NonEmpty())
    store = Store(capacity=1000)
    counter = iter(range(10**9))
    trace = Trace()
    event = ToolCall(tool_id="echo", args="a", output="a")
    document = load_document(config or SAMPLE_CONFIG)

    return {
        "tool call": median_us(lambda: run(Tool("echo")), repeats),
        "3-stage compose": median_us(lambda: run(pipeline), repeats),
        "if branch": median_us(lambda: run(branch), repeats),
        "guard": median_us(lambda: run(guarded), repeats),
        "memory write": median_us(lambda: store.write(f"k{next(counter) % 500}", StrV("v"), STR, 0), repeats),
        "trace log": median_us(lambda: trace.append(event), repeats),
        "compile": median_us(lambda: compile_config(normalize(document)), max(10, repeats // 10)),
    }
