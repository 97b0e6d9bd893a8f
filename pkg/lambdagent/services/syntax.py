"""
Pure syntactic operations on terms: free variables, capture-avoiding
substitution, composition desugaring, alpha-normalization and the textual
lambda export.
"""

import json
from dataclasses import replace
from typing import AbstractSet, Callable, Dict, FrozenSet

from lambdagent.core.errors import ContractViolation
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
)
from lambdagent.models.types import STR, Type, type_atom


def free_vars(t: Term) -> FrozenSet[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.param}
    result: FrozenSet[str] = frozenset()
    for child in _children(t):
        result |= free_vars(child)
    return result


def fresh_name(base: str, avoid: AbstractSet[str]) -> str:
    """``base`` itself when unused, otherwise ``base`` plus the smallest free counter."""
    if base not in avoid:
        return base
    i = 1
    while f"{base}{i}" in avoid:
        i += 1
    return f"{base}{i}"


def map_children(t: Term, f: Callable[[Term], Term]) -> Term:
    """Rebuild a non-binding term with ``f`` applied to each immediate subterm."""
    if isinstance(t, (Var, Tool, LamOracle, StrLit, LabelLit)):
        return t
    if isinstance(t, Abs):
        return replace(t, body=f(t.body))
    if isinstance(t, App):
        return App(f(t.fn), f(t.arg))
    if isinstance(t, Comp):
        return Comp(f(t.first), f(t.second))
    if isinstance(t, If):
        return If(t.cond, f(t.then_branch), f(t.else_branch))
    if isinstance(t, Fix):
        return Fix(t.bound, f(t.body))
    if isinstance(t, Pair):
        return Pair(f(t.left), f(t.right))
    if isinstance(t, Proj):
        return Proj(t.index, f(t.inner))
    if isinstance(t, Prob):
        return Prob(f(t.left), f(t.right), t.p)
    if isinstance(t, Case):
        return Case(
            f(t.classifier),
            tuple((label, f(body)) for label, body in t.branches),
            f(t.default) if t.default is not None else None,
        )
    if isinstance(t, Dispatch):
        return Dispatch(
            f(t.scrutinee),
            tuple((label, f(body)) for label, body in t.branches),
            f(t.default) if t.default is not None else None,
            f(t.arg),
        )
    if isinstance(t, Guard):
        return Guard(f(t.inner), t.predicate)
    if isinstance(t, Checking):
        return Checking(f(t.inner), t.predicate)
    if isinstance(t, Mem):
        return Mem(f(t.inner), t.store)
    if isinstance(t, Scoped):
        return Scoped(f(t.inner), t.store)
    raise ContractViolation(f"unknown term former {type(t).__name__}")


def _children(t: Term):
    collected = []

    def collect(child: Term) -> Term:
        collected.append(child)
        return child

    map_children(t, collect)
    return collected


def substitute(body: Term, var_name: str, replacement: Term) -> Term:
    """Replace free occurrences of ``var_name`` in ``body``, renaming binders to avoid capture."""
    repl_free = free_vars(replacement)

    def go(t: Term) -> Term:
        if isinstance(t, Var):
            return replacement if t.name == var_name else t
        if isinstance(t, Abs):
            if t.param == var_name:
                return t
            if var_name not in free_vars(t.body):
                return t
            if t.param in repl_free:
                new_param = fresh_name(t.param, repl_free | free_vars(t.body) | {var_name})
                renamed = substitute(t.body, t.param, Var(new_param))
                return Abs(new_param, t.param_type, go(renamed))
            return Abs(t.param, t.param_type, go(t.body))
        return map_children(t, go)

    return go(body)


def desugar_comp(t: Term, param_type: Type = STR) -> Abs:
    """``e1 >> e2`` as ``λx. e2 (e1 x)`` with a fresh ``x``."""
    if not isinstance(t, Comp):
        raise ContractViolation(f"desugar_comp expects a composition, got {type(t).__name__}")
    x = fresh_name("x", free_vars(t))
    return Abs(x, param_type, App(t.second, App(t.first, Var(x))))


def alpha_normalize(t: Term) -> Term:
    """Rename every binder to ``x<level>`` where level counts the enclosing binders."""

    def go(term: Term, env: Dict[str, str], depth: int) -> Term:
        if isinstance(term, Var):
            return Var(env.get(term.name, term.name))
        if isinstance(term, Abs):
            name = f"x{depth}"
            return Abs(name, term.param_type, go(term.body, {**env, term.param: name}, depth + 1))
        return map_children(term, lambda child: go(child, env, depth))

    return go(t, {}, 0)


def alpha_equivalent(a: Term, b: Term) -> bool:
    return alpha_normalize(a) == alpha_normalize(b)


def _string(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def _store(ref: StoreRef) -> str:
    return f"σ[{ref.name}, {ref.strategy}, capacity={ref.capacity}, ttl={ref.ttl_seconds}]"


def _branches(branches, default) -> str:
    arms = [f"{label} ⇒ {pretty_print_lambda(body)}" for label, body in branches]
    if default is not None:
        arms.append(f"_ ⇒ {pretty_print_lambda(default)}")
    return "{" + " | ".join(arms) + "}"


def _atom(t: Term) -> str:
    text = pretty_print_lambda(t)
    if isinstance(t, (Var, StrLit, LabelLit, Tool, Pair)):
        return text
    return f"({text})"


def _fn(t: Term) -> str:
    if isinstance(t, App):
        return pretty_print_lambda(t)
    return _atom(t)


def pretty_print_lambda(t: Term) -> str:
    """Deterministic textual rendering of a term."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, StrLit):
        return _string(t.text)
    if isinstance(t, LabelLit):
        return f"#{t.label}"
    if isinstance(t, Tool):
        return f"tool[{t.tool_id}]"
    if isinstance(t, Abs):
        return f"λ{t.param}:{type_atom(t.param_type)}. {pretty_print_lambda(t.body)}"
    if isinstance(t, App):
        return f"{_fn(t.fn)} {_atom(t.arg)}"
    if isinstance(t, Comp):
        return f"{_atom(t.first)} >> {_atom(t.second)}"
    if isinstance(t, If):
        return f"if {t.cond.render()} then {_atom(t.then_branch)} else {_atom(t.else_branch)}"
    if isinstance(t, Fix):
        return f"fix_{t.bound} {_atom(t.body)}"
    if isinstance(t, Pair):
        return f"⟨{pretty_print_lambda(t.left)}, {pretty_print_lambda(t.right)}⟩"
    if isinstance(t, Proj):
        return f"π{t.index} {_atom(t.inner)}"
    if isinstance(t, Case):
        return f"case {_atom(t.classifier)} of {_branches(t.branches, t.default)}"
    if isinstance(t, Guard):
        return f"guard {_atom(t.inner)} {t.predicate.render()}"
    if isinstance(t, Mem):
        return f"mem {_atom(t.inner)} {_store(t.store)}"
    if isinstance(t, Prob):
        return f"{_atom(t.left)} ⊕_{t.p!r} {_atom(t.right)}"
    if isinstance(t, LamOracle):
        return f"lam {_string(t.prompt)} θ[{t.params.model_name}, t={t.params.temperature!r}]"
    if isinstance(t, Dispatch):
        return (
            f"dispatch {_atom(t.scrutinee)} of {_branches(t.branches, t.default)} at {_atom(t.arg)}"
        )
    if isinstance(t, Checking):
        return f"checking {_atom(t.inner)} {t.predicate.render()}"
    if isinstance(t, Scoped):
        return f"scoped {_atom(t.inner)} {_store(t.store)}"
    raise ContractViolation(f"unknown term former {type(t).__name__}")
