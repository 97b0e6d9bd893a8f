"""
Abstract syntax of agent terms.

One frozen dataclass per term former. ``Dispatch``, ``Checking`` and
``Scoped`` never appear in source terms; the evaluator introduces them while
a case classifier, a guarded body or a memory-scoped body is being reduced.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from lambdagent.models.types import STR, Predicate, Type


@dataclass(frozen=True)
class ModelParams:
    model_name: str
    temperature: float = 0.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")


@dataclass(frozen=True)
class StoreRef:
    name: str = "memory"
    strategy: str = "memory"
    capacity: int = 20
    ttl_seconds: int = 0

    def __post_init__(self):
        if self.capacity < 0 or self.ttl_seconds < 0:
            raise ValueError("store capacity and ttl must be non-negative")


class Term:
    """Base class of agent terms."""

    def __rshift__(self, other: "Term") -> "Comp":
        return Comp(self, other)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Abs(Term):
    param: str
    param_type: Type
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Comp(Term):
    first: Term
    second: Term


@dataclass(frozen=True)
class If(Term):
    """Conditional on a decidable predicate of the argument."""

    cond: Predicate
    then_branch: Term
    else_branch: Term


@dataclass(frozen=True)
class Fix(Term):
    bound: int
    body: Term

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("fix bound must be a natural number")


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Proj(Term):
    index: int
    inner: Term

    def __post_init__(self):
        if self.index not in (1, 2):
            raise ValueError("projection index must be 1 or 2")


@dataclass(frozen=True)
class Tool(Term):
    tool_id: str


@dataclass(frozen=True)
class Case(Term):
    classifier: Term
    branches: Tuple[Tuple[str, Term], ...] = ()
    default: Optional[Term] = None

    def __post_init__(self):
        labels = [label for label, _ in self.branches]
        if len(set(labels)) != len(labels):
            raise ValueError(f"case labels must be distinct: {labels}")

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.branches)

    def branch(self, label: str) -> Optional[Term]:
        for name, term in self.branches:
            if name == label:
                return term
        return None


@dataclass(frozen=True)
class Guard(Term):
    inner: Term
    predicate: Predicate


@dataclass(frozen=True)
class Mem(Term):
    inner: Term
    store: StoreRef


@dataclass(frozen=True)
class Prob(Term):
    left: Term
    right: Term
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("choice probability must lie in [0, 1]")


@dataclass(frozen=True)
class LamOracle(Term):
    prompt: str
    params: ModelParams


@dataclass(frozen=True)
class StrLit(Term):
    text: str


@dataclass(frozen=True)
class LabelLit(Term):
    label: str


@dataclass(frozen=True)
class Dispatch(Term):
    scrutinee: Term
    branches: Tuple[Tuple[str, Term], ...]
    default: Optional[Term]
    arg: Term


@dataclass(frozen=True)
class Checking(Term):
    inner: Term
    predicate: Predicate


@dataclass(frozen=True)
class Scoped(Term):
    inner: Term
    store: StoreRef


# Formers that denote functions and wait for an argument.
FUNCTION_FORMERS = (Abs, Tool, LamOracle, Comp, If, Fix, Case, Guard, Mem)


def is_value(t: Term) -> bool:
    if isinstance(t, (StrLit, LabelLit)) or isinstance(t, FUNCTION_FORMERS):
        return True
    if isinstance(t, Pair):
        return is_value(t.left) and is_value(t.right)
    return False


def identity(param_type: Type = STR, name: str = "x") -> Abs:
    return Abs(name, param_type, Var(name))


def children(t: Term) -> Tuple[Term, ...]:
    """Immediate subterms in a fixed left-to-right order."""
    if isinstance(t, Abs):
        return (t.body,)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, Comp):
        return (t.first, t.second)
    if isinstance(t, If):
        return (t.then_branch, t.else_branch)
    if isinstance(t, Fix):
        return (t.body,)
    if isinstance(t, (Pair, Prob)):
        return (t.left, t.right)
    if isinstance(t, Proj):
        return (t.inner,)
    if isinstance(t, Case):
        kids = (t.classifier,) + tuple(term for _, term in t.branches)
        return kids + ((t.default,) if t.default is not None else ())
    if isinstance(t, Dispatch):
        kids = (t.scrutinee,) + tuple(term for _, term in t.branches)
        kids += (t.default,) if t.default is not None else ()
        return kids + (t.arg,)
    if isinstance(t, (Guard, Mem, Checking, Scoped)):
        return (t.inner,)
    return ()


def iter_terms(t: Term):
    """Pre-order walk over a term and all of its subterms."""
    yield t
    for child in children(t):
        yield from iter_terms(child)


def term_depth(t: Term) -> int:
    kids = children(t)
    return 1 + max((term_depth(k) for k in kids), default=0)
