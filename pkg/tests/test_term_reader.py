"""
The lambda export reads back to the term it was printed from.
"""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from generators import agent_terms, inputs, make_ctx
from lambdagent.models.terms import (
    Abs,
    App,
    Case,
    Fix,
    LabelLit,
    Mem,
    Pair,
    Proj,
    StoreRef,
    StrLit,
    Tool,
    Var,
    is_value,
)
from lambdagent.models.types import STR, Arrow, Conj, MaxWords, NonEmpty, Product, Refinement, variant_of
from lambdagent.services.compiler import compile_config
from lambdagent.services.evaluator import ERROR_OUTCOMES, step
from lambdagent.services.frameworks import normalize
from lambdagent.services.loader import find_configs, load_document
from lambdagent.services.syntax import alpha_normalize, pretty_print_lambda
from lambdagent.services.tools import default_registry
from term_reader import ReadError, read_term


def round_trip(term):
    return read_term(pretty_print_lambda(term))


def test_reads_a_memory_wrapped_loop():
    text = "mem (fix_20 (λs:(Str → Str). λx:Str. s x)) σ[agent, redis, capacity=20, ttl=7200]"
    body = Abs("s", Arrow(STR, STR), Abs("x", STR, App(Var("s"), Var("x"))))
    assert read_term(text) == Mem(Fix(20, body), StoreRef("agent", "redis", 20, 7200))


def test_application_is_left_associative():
    assert read_term("f a (b c)") == App(App(Var("f"), Var("a")), App(Var("b"), Var("c")))


@pytest.mark.parametrize("term", [
    Abs("p", Product(STR, Arrow(STR, STR)), Proj(1, Var("p"))),
    Abs("r", Refinement(STR, Conj(NonEmpty(), MaxWords(3))), Var("r")),
    Abs("v", variant_of("yes", "no"), Pair(Var("v"), LabelLit("yes"))),
    Case(Tool("react.parse"), (("calc", Tool("calc")),), None),
    Case(Tool("lower"), (), None),
    App(Tool("echo"), StrLit('quote " and\nnewline')),
])
def test_round_trip_examples(term):
    assert round_trip(term) == term


@pytest.mark.parametrize("text", ["λx:Str.", "tool[echo] )", "case tool[a] of {x ⇒}", "lam 'x'"])
def test_rejects_malformed_text(text):
    with pytest.raises(ReadError):
        read_term(text)


@given(agent_terms)
def test_generated_terms_round_trip(term):
    assert round_trip(term) == term


@settings(max_examples=50, deadline=None)
@given(agent_terms, inputs)
def test_intermediate_terms_round_trip(term, text):
    current = App(term, StrLit(text))
    ctx = make_ctx()
    for _ in range(200):
        assert round_trip(current) == current
        if is_value(current):
            break
        result = step(current, ctx)
        if isinstance(result, ERROR_OUTCOMES):
            break
        current = result


@settings(suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(agent_terms, min_size=2, max_size=10))
def test_printing_is_injective_on_normalized_terms(terms):
    seen = {}
    for term in terms:
        normal = alpha_normalize(term)
        text = pretty_print_lambda(normal)
        assert seen.setdefault(text, normal) == normal


def test_compiled_configs_round_trip(data_dir):
    files = find_configs(data_dir / "baselines") + [data_dir / "coder_agent.yaml", data_dir / "crewai_analyst.yaml"]
    for path in files:
        term = compile_config(normalize(load_document(path)), default_model="gpt-4o-mini", registry=default_registry())
        text = pretty_print_lambda(term)
        assert read_term(text) == term, path.name
        assert pretty_print_lambda(read_term(text)) == text
