"""
Types and refinement predicates of the calculus.

Every type is an immutable dataclass; equality is structural, so two
refinements are equal exactly when their bases and predicates are.
"""

import json
import re
from dataclasses import dataclass
from typing import Any, Optional, Tuple, Union


class Predicate:
    """A decidable predicate over strings."""

    def holds(self, text: str) -> bool:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class NonEmpty(Predicate):
    def holds(self, text: str) -> bool:
        return text.strip() != ""

    def render(self) -> str:
        return "nonempty"


@dataclass(frozen=True)
class MaxWords(Predicate):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("MaxWords bound must be non-negative")

    def holds(self, text: str) -> bool:
        return len(text.split()) <= self.n

    def render(self) -> str:
        return f"maxwords({self.n})"


@dataclass(frozen=True)
class MinWords(Predicate):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("MinWords bound must be non-negative")

    def holds(self, text: str) -> bool:
        return len(text.split()) >= self.n

    def render(self) -> str:
        return f"minwords({self.n})"


@dataclass(frozen=True)
class MatchesRegex(Predicate):
    pattern: str

    def __post_init__(self):
        re.compile(self.pattern)

    def holds(self, text: str) -> bool:
        return re.search(self.pattern, text) is not None

    def render(self) -> str:
        return f"matches({json.dumps(self.pattern, ensure_ascii=False)})"


@dataclass(frozen=True)
class ValidJson(Predicate):
    def holds(self, text: str) -> bool:
        try:
            json.loads(text)
        except ValueError:
            return False
        return True

    def render(self) -> str:
        return "json"


@dataclass(frozen=True)
class Conj(Predicate):
    left: Predicate
    right: Predicate

    def holds(self, text: str) -> bool:
        return self.left.holds(text) and self.right.holds(text)

    def render(self) -> str:
        return f"({self.left.render()} ∧ {self.right.render()})"


@dataclass(frozen=True)
class Neg(Predicate):
    inner: Predicate

    def holds(self, text: str) -> bool:
        return not self.inner.holds(text)

    def render(self) -> str:
        return f"¬{self.inner.render()}"


PredicateSpec = Union[str, dict, list]


def parse_predicate(spec: Any) -> Predicate:
    """Build a predicate from its configuration form.

    Accepted forms: ``"nonEmpty"``, ``"validJson"``, ``{"maxWords": 50}``,
    ``{"minWords": 3}``, ``{"matches": "^OK"}``, ``{"not": spec}`` and
    ``{"and": [spec, spec, ...]}``. A list is read as a conjunction.
    """
    if isinstance(spec, Predicate):
        return spec
    if isinstance(spec, str):
        key = spec.replace("_", "").lower()
        if key == "nonempty":
            return NonEmpty()
        if key in ("validjson", "json"):
            return ValidJson()
        raise ValueError(f"unknown predicate {spec!r}")
    if isinstance(spec, list):
        return _conjoin([parse_predicate(item) for item in spec])
    if isinstance(spec, dict):
        if len(spec) != 1:
            return _conjoin([parse_predicate({k: v}) for k, v in spec.items()])
        (name, arg), = spec.items()
        key = name.replace("_", "").lower()
        if key == "maxwords":
            return MaxWords(int(arg))
        if key == "minwords":
            return MinWords(int(arg))
        if key in ("matches", "regex"):
            return MatchesRegex(str(arg))
        if key == "not":
            return Neg(parse_predicate(arg))
        if key == "and":
            return _conjoin([parse_predicate(item) for item in arg])
        if key in ("nonempty", "validjson") and arg:
            return parse_predicate(name)
        raise ValueError(f"unknown predicate {name!r}")
    raise ValueError(f"cannot read predicate from {spec!r}")


def _conjoin(parts) -> Predicate:
    if not parts:
        raise ValueError("empty conjunction")
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Conj(part, result)
    return result


class Type:
    """Base class of calculus types."""

    def render(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class StrType(Type):
    def render(self) -> str:
        return "Str"


STR = StrType()


@dataclass(frozen=True)
class Arrow(Type):
    dom: Type
    cod: Type

    def render(self) -> str:
        dom = self.dom.render()
        if isinstance(self.dom, Arrow):
            dom = f"({dom})"
        return f"{dom} → {self.cod.render()}"


@dataclass(frozen=True)
class Product(Type):
    left: Type
    right: Type

    def render(self) -> str:
        return f"{type_atom(self.left)} × {type_atom(self.right)}"


@dataclass(frozen=True)
class Variant(Type):
    cases: Tuple[Tuple[str, Type], ...]

    def __post_init__(self):
        labels = [label for label, _ in self.cases]
        if len(set(labels)) != len(labels):
            raise ValueError(f"variant labels must be distinct: {labels}")

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(label for label, _ in self.cases)

    def render(self) -> str:
        inner = ", ".join(f"{label}:{ty.render()}" for label, ty in self.cases)
        return f"⟨{inner}⟩"


@dataclass(frozen=True)
class Refinement(Type):
    base: Type
    predicate: Predicate

    def render(self) -> str:
        return f"{{x:{self.base.render()} | {self.predicate.render()}}}"


def type_atom(ty: Type) -> str:
    if isinstance(ty, (Arrow, Product)):
        return f"({ty.render()})"
    return ty.render()


def variant_of(*labels: str) -> Variant:
    return Variant(tuple((label, STR) for label in labels))


def erase(ty: Type) -> Type:
    """Strip every refinement, leaving the underlying simple type."""
    if isinstance(ty, Refinement):
        return erase(ty.base)
    if isinstance(ty, Arrow):
        return Arrow(erase(ty.dom), erase(ty.cod))
    if isinstance(ty, Product):
        return Product(erase(ty.left), erase(ty.right))
    if isinstance(ty, Variant):
        return Variant(tuple((label, erase(t)) for label, t in ty.cases))
    return ty


def conforms(found: Type, expected: Type) -> bool:
    """Whether a value of type ``found`` may be used where ``expected`` is required.

    Refinements are discharged at guards and erased at use sites. A variant
    conforms to any variant that carries each of its labels with the same
    payload type, so a single label fits the classifier type it came from.
    """
    if found == expected:
        return True
    found, expected = erase(found), erase(expected)
    if isinstance(found, Variant) and isinstance(expected, Variant):
        cases = dict(expected.cases)
        return all(cases.get(label) == ty for label, ty in found.cases)
    return found == expected


def join(a: Type, b: Type) -> Optional[Type]:
    """Common result type of two branches, or None when they disagree."""
    if a == b:
        return a
    if erase(a) == erase(b):
        return erase(a)
    return None


def preserves(old: Type, new: Type) -> bool:
    """Whether a step from a term of type ``old`` to one of type ``new`` kept its type."""
    return conforms(new, old)
