import pytest
from hypothesis import given

from generators import agent_terms, term_registry
from lambdagent.core.errors import TypeCheckError, TypeErrorKind
from lambdagent.models.store import Store, StoreTyping
from lambdagent.models.terms import (
    Abs,
    App,
    Case,
    Comp,
    Fix,
    Guard,
    If,
    LabelLit,
    LamOracle,
    Mem,
    ModelParams,
    Pair,
    Prob,
    Proj,
    StoreRef,
    StrLit,
    Tool,
    Var,
)
from lambdagent.models.types import STR, Arrow, MaxWords, NonEmpty, Product, Refinement, Variant, erase, variant_of
from lambdagent.models.values import PairV, StrV
from lambdagent.services.tools import ToolSpec, default_registry
from lambdagent.services.typechecker import (
    TypeContext,
    case_exhaustive,
    check_store_compat,
    infer,
    typecheck_closed,
)

LLM = LamOracle("Answer.", ModelParams("m"))
STR_TO_STR = Arrow(STR, STR)


@pytest.fixture
def tctx():
    intent = ToolSpec("intent", lambda text: "search", codomain=variant_of("search", "chat"))
    return TypeContext.from_registry(default_registry([intent]))


def kind_of(term, ctx) -> TypeErrorKind:
    with pytest.raises(TypeCheckError) as info:
        typecheck_closed(term, ctx)
    return info.value.kind


class TestRules:
    def test_literals(self, tctx):
        assert typecheck_closed(StrLit("hi"), tctx) == STR
        assert typecheck_closed(LabelLit("ok"), tctx) == Variant((("ok", STR),))

    def test_oracle_and_tool(self, tctx):
        assert typecheck_closed(LLM, tctx) == STR_TO_STR
        assert typecheck_closed(Tool("echo"), tctx) == STR_TO_STR

    def test_terminate_is_always_known(self):
        assert typecheck_closed(Tool("terminate"), TypeContext()) == STR_TO_STR

    def test_application(self, tctx):
        assert typecheck_closed(App(Tool("upper"), StrLit("a")), tctx) == STR

    def test_composition(self, tctx):
        assert typecheck_closed(Comp(LLM, Tool("upper")), tctx) == STR_TO_STR

    def test_guard_refines_codomain(self, tctx):
        ty = typecheck_closed(Guard(LLM, MaxWords(50)), tctx)
        assert ty == Arrow(STR, Refinement(STR, MaxWords(50)))

    def test_refined_result_feeds_next_stage(self, tctx):
        term = Comp(Guard(LLM, NonEmpty()), Tool("upper"))
        assert typecheck_closed(term, tctx) == STR_TO_STR

    def test_if_joins_branches(self, tctx):
        term = If(NonEmpty(), Guard(LLM, NonEmpty()), Tool("echo"))
        assert typecheck_closed(term, tctx) == STR_TO_STR

    def test_fix(self, tctx):
        body = Abs("s", STR_TO_STR, Abs("x", STR, App(Var("s"), App(LLM, Var("x")))))
        assert typecheck_closed(Fix(3, body), tctx) == STR_TO_STR

    def test_parallel_pair_is_a_function(self, tctx):
        term = App(Pair(LLM, Tool("upper")), StrLit("q"))
        assert typecheck_closed(term, tctx) == Product(STR, STR)

    def test_projection(self, tctx):
        assert typecheck_closed(Proj(2, Pair(StrLit("a"), LabelLit("b"))), tctx) == Variant((("b", STR),))

    def test_memory_is_transparent(self, tctx):
        assert typecheck_closed(Mem(LLM, StoreRef()), tctx) == STR_TO_STR

    def test_choice(self, tctx):
        assert typecheck_closed(Prob(LLM, Tool("echo"), 0.5), tctx) == STR_TO_STR


class TestCase:
    def test_open_classifier(self, tctx):
        term = Case(LLM, (("a", Tool("upper")), ("b", Tool("lower"))), None)
        assert typecheck_closed(term, tctx) == STR_TO_STR

    def test_closed_classifier_exhaustive(self, tctx):
        term = Case(Tool("intent"), (("search", Tool("upper")), ("chat", LLM)), None)
        assert typecheck_closed(term, tctx) == STR_TO_STR

    def test_closed_classifier_missing_label(self, tctx):
        term = Case(Tool("intent"), (("search", Tool("upper")),), None)
        assert kind_of(term, tctx) == TypeErrorKind.NON_EXHAUSTIVE_CASE

    def test_default_makes_exhaustive(self, tctx):
        term = Case(Tool("intent"), (("search", Tool("upper")),), LLM)
        assert typecheck_closed(term, tctx) == STR_TO_STR

    def test_label_outside_variant(self, tctx):
        term = Case(Tool("intent"), (("weather", Tool("upper")),), LLM)
        assert kind_of(term, tctx) == TypeErrorKind.MISMATCH

    def test_case_exhaustive(self):
        classifier = Arrow(STR, variant_of("a", "b"))
        assert case_exhaustive(classifier, ["a", "b"], False)
        assert not case_exhaustive(classifier, ["a"], False)
        assert case_exhaustive(classifier, [], True)
        with pytest.raises(TypeCheckError):
            case_exhaustive(STR_TO_STR, ["a"], False)


class TestErrors:
    def test_unbound_variable(self, tctx):
        assert kind_of(Abs("x", STR, Var("y")), tctx) == TypeErrorKind.UNBOUND_VAR

    def test_unknown_tool(self, tctx):
        assert kind_of(Tool("weather"), tctx) == TypeErrorKind.UNKNOWN_TOOL

    def test_applying_a_string(self, tctx):
        assert kind_of(App(StrLit("a"), StrLit("b")), tctx) == TypeErrorKind.MISMATCH

    def test_stage_mismatch(self, tctx):
        # A pair of results cannot feed a Str stage.
        term = Comp(Pair(LLM, LLM), Tool("upper"))
        assert kind_of(term, tctx) == TypeErrorKind.MISMATCH

    def test_fix_shape(self, tctx):
        assert kind_of(Fix(2, LLM), tctx) == TypeErrorKind.BAD_FIX_SHAPE

    def test_error_names_location(self, tctx):
        with pytest.raises(TypeCheckError) as info:
            typecheck_closed(Comp(LLM, Tool("weather")), tctx)
        assert info.value.location == "$.second"
        assert "UnknownTool" in str(info.value)


class TestStoreCompat:
    def test_matching_store(self):
        store = Store()
        store.write("turn:1", StrV("hi"), STR, 0)
        check_store_compat(store, store.typing)

    def test_conflicting_store(self):
        store = Store()
        store.write("turn:1", PairV(StrV("a"), StrV("b")), Product(STR, STR), 0)
        with pytest.raises(TypeCheckError) as info:
            check_store_compat(store, StoreTyping({"turn:1": STR}))
        assert info.value.kind == TypeErrorKind.STORE_TYPE_CONFLICT

    def test_untyped_key(self):
        store = Store()
        store.write("k", StrV("v"), STR, 0)
        with pytest.raises(TypeCheckError):
            check_store_compat(store, StoreTyping())


@given(agent_terms)
def test_generated_terms_are_string_functions(term):
    ty = typecheck_closed(term, TypeContext.from_registry(term_registry()))
    assert erase(ty) == STR_TO_STR


@given(agent_terms)
def test_inference_ignores_unrelated_bindings(term):
    ctx = TypeContext.from_registry(term_registry())
    assert infer(ctx.extend("unused", STR), term) == infer(ctx, term)
