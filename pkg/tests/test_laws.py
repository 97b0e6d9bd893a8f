"""
Algebraic and termination laws checked over seeded random terms.
"""

import numpy as np
import pytest

from generators import church, make_ctx, random_input, random_term, store_typing
from lambdagent.models.outcome import GuardStuck
from lambdagent.models.terms import Abs, App, StrLit, Var, is_value
from lambdagent.models.trace import LoopIter
from lambdagent.models.types import STR, preserves
from lambdagent.services.evaluator import ERROR_OUTCOMES, reduce, step
from lambdagent.services.oracles import ScriptedOracle
from lambdagent.services.typechecker import infer

IDENTITY = Abs("x", STR, Var("x"))


def tagging_oracle() -> ScriptedOracle:
    # Tags the input with the first word of the prompt.
    return ScriptedOracle(responder=lambda prompt, text: f"{prompt.split()[0].lower()}({text})")


def run(term, text, seed):
    return reduce(term, text, make_ctx(tagging_oracle(), seed=seed))


@pytest.mark.slow
def test_composition_is_a_monoid():
    for seed in range(200):
        rng = np.random.default_rng(seed)
        a, b, c = (random_term(rng, depth=2) for _ in range(3))
        text = random_input(rng)
        assert run((a >> b) >> c, text, seed) == run(a >> (b >> c), text, seed), seed
        assert run(a >> IDENTITY, text, seed) == run(a, text, seed), seed
        assert run(IDENTITY >> a, text, seed) == run(a, text, seed), seed


@pytest.mark.slow
def test_loops_unfold_at_most_their_bound():
    for seed in range(1000):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(33))
        body = random_term(rng, depth=2, loops=False)
        ctx = make_ctx(seed=seed)
        reduce(church(body, n), random_input(rng), ctx)
        unfoldings = ctx.trace.of(LoopIter)
        assert len(unfoldings) <= n, seed
        assert all(0 <= e.remaining_bound < n for e in unfoldings), seed


@pytest.mark.slow
def test_progress_and_preservation_over_many_terms():
    for seed in range(10_000):
        rng = np.random.default_rng(seed)
        ctx = make_ctx(seed=seed)
        current = App(random_term(rng), StrLit(random_input(rng)))
        current_type = infer(ctx.type_context(), current)
        while not is_value(current):
            before = store_typing(ctx).snapshot()
            result = step(current, ctx)
            if isinstance(result, ERROR_OUTCOMES):
                assert isinstance(result, GuardStuck), seed
                break
            next_type = infer(ctx.type_context(), result)
            assert preserves(current_type, next_type), seed
            assert store_typing(ctx).includes(before), seed
            current, current_type = result, next_type
