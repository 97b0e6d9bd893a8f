"""
Results of evaluating a term.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

from lambdagent.models.store import Store
from lambdagent.models.types import Predicate
from lambdagent.models.values import Value, value_text


@dataclass(frozen=True)
class Ok:
    value: Value
    final_store: Optional[Store] = field(default=None, compare=False)

    @property
    def text(self) -> str:
        return value_text(self.value)


@dataclass(frozen=True)
class GuardStuck:
    failed_predicate: Predicate
    offending_value: Value

    @property
    def text(self) -> str:
        return f"guard failure: {self.failed_predicate.render()} rejected {value_text(self.offending_value)!r}"


@dataclass(frozen=True)
class RouteError:
    unmatched_label: str

    @property
    def text(self) -> str:
        return f"route error: no branch for {self.unmatched_label!r}"


@dataclass(frozen=True)
class OracleFailure:
    detail: str

    @property
    def text(self) -> str:
        return f"oracle failure: {self.detail}"


Outcome = Union[Ok, GuardStuck, RouteError, OracleFailure]
