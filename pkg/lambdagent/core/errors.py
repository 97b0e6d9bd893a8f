"""
Exception hierarchy shared by the compiler, checker, evaluator and harnesses.
"""

from enum import Enum
from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from lambdagent.models.types import Type


class LambdagentError(Exception):
    """Base class for every error raised by lambdagent."""


class ConfigLoadError(LambdagentError):
    """A configuration or script file could not be read or parsed."""


class NormalizationError(LambdagentError):
    """A parsed document does not have the shape its framework requires."""


class CompileError(LambdagentError):
    """A canonical config is missing a group its agent type needs."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class TypeErrorKind(str, Enum):
    MISMATCH = "Mismatch"
    UNBOUND_VAR = "UnboundVar"
    UNKNOWN_TOOL = "UnknownTool"
    NON_EXHAUSTIVE_CASE = "NonExhaustiveCase"
    BAD_FIX_SHAPE = "BadFixShape"
    STORE_TYPE_CONFLICT = "StoreTypeConflict"


class TypeCheckError(LambdagentError):
    """A violated premise of a typing rule."""

    def __init__(
        self,
        kind: TypeErrorKind,
        location: str,
        expected: Optional["Type"] = None,
        found: Optional["Type"] = None,
        detail: str = "",
    ):
        self.kind = kind
        self.location = location
        self.expected = expected
        self.found = found
        self.detail = detail
        super().__init__(str(self))

    def __str__(self) -> str:
        parts = [f"{self.kind.value} at {self.location}"]
        if self.expected is not None or self.found is not None:
            expected = self.expected.render() if self.expected is not None else "-"
            found = self.found.render() if self.found is not None else "-"
            parts.append(f"expected {expected}, found {found}")
        if self.detail:
            parts.append(self.detail)
        return ": ".join(parts)


class StoreTypeError(LambdagentError):
    """A store write would change the type already recorded for its key."""

    def __init__(self, key: str, expected: "Type", found: "Type"):
        self.key = key
        self.expected = expected
        self.found = found
        super().__init__(
            f"store key {key!r} is typed {expected.render()}, refusing write of {found.render()}"
        )


class OracleError(LambdagentError):
    """An oracle or tool provider failed to produce an output."""


class UnknownOracleError(LambdagentError):
    """A cost table has no entry for an oracle referenced by a term."""

    def __init__(self, oracle_id: str):
        self.oracle_id = oracle_id
        super().__init__(f"no cost registered for oracle {oracle_id!r}")


class HarnessSetupError(LambdagentError):
    """A fault-injection baseline is not clean at ERROR level."""


class ContractViolation(LambdagentError):
    """An operation was called outside its precondition."""
