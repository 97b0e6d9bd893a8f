"""
Type inference for agent terms and the store compatibility check.

Abstractions carry their parameter type, so inference is syntax directed:
every rule either returns the unique type of a term or raises a
``TypeCheckError`` naming the violated premise.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Tuple

from lambdagent.core.errors import TypeCheckError, TypeErrorKind
from lambdagent.models.store import Store, StoreTyping
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
    StrLit,
    Term,
    Tool,
    Var,
)
from lambdagent.models.types import (
    STR,
    Arrow,
    Product,
    Refinement,
    Type,
    Variant,
    conforms,
    erase,
    join,
)
from lambdagent.models.values import Value, from_value

logger = logging.getLogger(__name__)

TERMINATE_SIGNATURE = (STR, STR)


@dataclass(frozen=True)
class TypeContext:
    """Γ;Σ together with the signatures of the registered tools."""

    var_bindings: Mapping[str, Type] = field(default_factory=dict)
    store_typing: StoreTyping = field(default_factory=StoreTyping, compare=False)
    tool_signatures: Mapping[str, Tuple[Type, Type]] = field(default_factory=dict)
    stores: Mapping[str, Store] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if "terminate" not in self.tool_signatures:
            object.__setattr__(
                self, "tool_signatures", {**self.tool_signatures, "terminate": TERMINATE_SIGNATURE}
            )

    def extend(self, name: str, ty: Type) -> "TypeContext":
        return replace(self, var_bindings={**self.var_bindings, name: ty})

    @classmethod
    def from_registry(cls, registry, store_typing: Optional[StoreTyping] = None) -> "TypeContext":
        return cls(
            tool_signatures=registry.signatures(),
            store_typing=store_typing if store_typing is not None else StoreTyping(),
        )


def as_function(ty: Type) -> Optional[Tuple[Type, Type]]:
    """View a type as a function: an arrow, or a product of functions sharing a domain."""
    if isinstance(ty, Refinement):
        return as_function(ty.base)
    if isinstance(ty, Arrow):
        return ty.dom, ty.cod
    if isinstance(ty, Product):
        left = as_function(ty.left)
        right = as_function(ty.right)
        if left and right and erase(left[0]) == erase(right[0]):
            return left[0], Product(left[1], right[1])
    return None


def _fail(kind: TypeErrorKind, path: str, expected: Optional[Type] = None,
          found: Optional[Type] = None, detail: str = "") -> TypeCheckError:
    return TypeCheckError(kind, path, expected, found, detail)


def _function(ctx: TypeContext, t: Term, path: str) -> Tuple[Type, Type]:
    ty = infer(ctx, t, path)
    fn = as_function(ty)
    if fn is None:
        raise _fail(TypeErrorKind.MISMATCH, path, Arrow(STR, STR), ty, "expected a function")
    return fn


def _join_all(types: Iterable[Type], path: str) -> Optional[Type]:
    result: Optional[Type] = None
    for ty in types:
        if result is None:
            result = ty
            continue
        joined = join(result, ty)
        if joined is None:
            raise _fail(TypeErrorKind.MISMATCH, path, result, ty, "branch results disagree")
        result = joined
    return result


def _branch_results(ctx: TypeContext, dom: Type, branches, default, path: str) -> Optional[Type]:
    results = []
    arms = list(branches) + ([("_", default)] if default is not None else [])
    for label, body in arms:
        arm_path = f"{path}.{label}"
        b_dom, b_cod = _function(ctx, body, arm_path)
        if not conforms(dom, b_dom):
            raise _fail(TypeErrorKind.MISMATCH, arm_path, b_dom, dom, "branch input")
        results.append(b_cod)
    return _join_all(results, path)


def infer(ctx: TypeContext, t: Term, path: str = "$") -> Type:
    """Infer the type of ``t`` under ``ctx``."""
    if isinstance(t, Var):
        if t.name not in ctx.var_bindings:
            raise _fail(TypeErrorKind.UNBOUND_VAR, path, detail=f"unbound variable {t.name}")
        return ctx.var_bindings[t.name]

    if isinstance(t, StrLit):
        return STR

    if isinstance(t, LabelLit):
        return Variant(((t.label, STR),))

    if isinstance(t, Abs):
        return Arrow(t.param_type, infer(ctx.extend(t.param, t.param_type), t.body, f"{path}.body"))

    if isinstance(t, App):
        dom, cod = _function(ctx, t.fn, f"{path}.fn")
        arg = infer(ctx, t.arg, f"{path}.arg")
        if not conforms(arg, dom):
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.arg", dom, arg)
        return cod

    if isinstance(t, LamOracle):
        return Arrow(STR, STR)

    if isinstance(t, Tool):
        signature = ctx.tool_signatures.get(t.tool_id)
        if signature is None:
            raise _fail(TypeErrorKind.UNKNOWN_TOOL, path, detail=f"unknown tool {t.tool_id}")
        return Arrow(*signature)

    if isinstance(t, Comp):
        dom1, cod1 = _function(ctx, t.first, f"{path}.first")
        dom2, cod2 = _function(ctx, t.second, f"{path}.second")
        if not conforms(cod1, dom2):
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.second", dom2, cod1, "stage input")
        return Arrow(dom1, cod2)

    if isinstance(t, If):
        dom1, cod1 = _function(ctx, t.then_branch, f"{path}.then")
        dom2, cod2 = _function(ctx, t.else_branch, f"{path}.else")
        if erase(dom1) != STR:
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.then", STR, dom1, "condition input")
        if erase(dom2) != erase(dom1):
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.else", dom1, dom2)
        result = join(cod1, cod2)
        if result is None:
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.else", cod1, cod2, "branch results disagree")
        return Arrow(dom1, result)

    if isinstance(t, Fix):
        body = infer(ctx, t.body, f"{path}.body")
        if not (
            isinstance(body, Arrow)
            and isinstance(body.dom, Arrow)
            and isinstance(body.cod, Arrow)
            and erase(body.dom) == erase(body.cod)
            and erase(body.cod.dom) == erase(body.cod.cod)
        ):
            raise _fail(
                TypeErrorKind.BAD_FIX_SHAPE, f"{path}.body",
                Arrow(Arrow(STR, STR), Arrow(STR, STR)), body,
            )
        return body.cod

    if isinstance(t, Pair):
        return Product(infer(ctx, t.left, f"{path}.left"), infer(ctx, t.right, f"{path}.right"))

    if isinstance(t, Proj):
        inner = infer(ctx, t.inner, f"{path}.inner")
        if isinstance(inner, Refinement):
            inner = inner.base
        if not isinstance(inner, Product):
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.inner", Product(STR, STR), inner)
        return inner.left if t.index == 1 else inner.right

    if isinstance(t, Case):
        return _infer_case(ctx, t, path)

    if isinstance(t, Dispatch):
        infer(ctx, t.scrutinee, f"{path}.scrutinee")
        arg = infer(ctx, t.arg, f"{path}.arg")
        result = _branch_results(ctx, arg, t.branches, t.default, path)
        return result if result is not None else arg

    if isinstance(t, Guard):
        dom, cod = _function(ctx, t.inner, f"{path}.inner")
        if erase(cod) != STR:
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.inner", Arrow(dom, STR), Arrow(dom, cod))
        return Arrow(dom, Refinement(cod, t.predicate))

    if isinstance(t, Checking):
        inner = infer(ctx, t.inner, f"{path}.inner")
        if erase(inner) != STR:
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.inner", STR, inner)
        return Refinement(inner, t.predicate)

    if isinstance(t, Mem):
        store = ctx.stores.get(t.store.name)
        if store is not None:
            check_store_compat(store, ctx.store_typing, ctx)
        dom, cod = _function(ctx, t.inner, f"{path}.inner")
        return Arrow(dom, cod)

    if isinstance(t, Scoped):
        return infer(ctx, t.inner, f"{path}.inner")

    if isinstance(t, Prob):
        left = infer(ctx, t.left, f"{path}.left")
        right = infer(ctx, t.right, f"{path}.right")
        result = join(left, right)
        if result is None:
            raise _fail(TypeErrorKind.MISMATCH, f"{path}.right", left, right, "choice branches differ")
        return result

    raise _fail(TypeErrorKind.MISMATCH, path, detail=f"unknown term former {type(t).__name__}")


def _infer_case(ctx: TypeContext, t: Case, path: str) -> Type:
    dom, cod = _function(ctx, t.classifier, f"{path}.classifier")
    labels = t.labels
    erased = erase(cod)
    if isinstance(erased, Variant):
        unknown = [label for label in labels if label not in erased.labels]
        if unknown:
            raise _fail(
                TypeErrorKind.MISMATCH, f"{path}.{unknown[0]}", erased, None,
                f"label {unknown[0]} not in classifier variant",
            )
        if not case_exhaustive(Arrow(dom, erased), labels, t.default is not None):
            missing = [label for label in erased.labels if label not in labels]
            raise _fail(
                TypeErrorKind.NON_EXHAUSTIVE_CASE, path, erased, None,
                f"no branch for {', '.join(missing)}",
            )
    elif erased != STR:
        raise _fail(TypeErrorKind.MISMATCH, f"{path}.classifier", Arrow(dom, STR), Arrow(dom, cod))
    result = _branch_results(ctx, dom, t.branches, t.default, path)
    return Arrow(dom, result if result is not None else dom)


def case_exhaustive(classifier_type: Type, branches: Iterable, has_default: bool) -> bool:
    """Whether every label of the classifier's variant has a branch, or a default exists.

    ``branches`` may hold labels or ``(label, term)`` pairs.
    """
    fn = as_function(classifier_type)
    variant = erase(fn[1]) if fn is not None else None
    if not isinstance(variant, Variant):
        raise _fail(
            TypeErrorKind.MISMATCH, "classifier", Arrow(STR, Variant(())), classifier_type,
            "classifier must return a variant",
        )
    if has_default:
        return True
    covered = {b[0] if isinstance(b, tuple) else b for b in branches}
    return all(label in covered for label in variant.labels)


def value_type(ctx: TypeContext, value: Value) -> Type:
    return infer(replace(ctx, var_bindings={}), from_value(value), "value")


def check_store_compat(store: Store, sigma: StoreTyping, ctx: Optional[TypeContext] = None) -> None:
    """Raise ``StoreTypeConflict`` unless every populated key holds a value of its assigned type."""
    ctx = ctx or TypeContext()
    for key, entry in store.entries():
        expected = sigma.get(key)
        found = value_type(ctx, entry.value)
        if expected is None or expected != found:
            raise _fail(TypeErrorKind.STORE_TYPE_CONFLICT, key, expected, found)


def typecheck_closed(t: Term, ctx: Optional[TypeContext] = None) -> Type:
    """Infer a closed term's type, logging the outcome."""
    ctx = ctx or TypeContext()
    ty = infer(replace(ctx, var_bindings={}), t)
    logger.debug("typechecked term : %s", ty.render())
    return ty
