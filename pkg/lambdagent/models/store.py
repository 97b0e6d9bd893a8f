"""
Persistent agent memory and its append-only typing.
"""

from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Tuple

from lambdagent.core.errors import StoreTypeError
from lambdagent.models.types import Type
from lambdagent.models.values import Value


class StoreTyping:
    """Append-only assignment of types to store keys."""

    def __init__(self, initial: Optional[Mapping[str, Type]] = None):
        self._types: Dict[str, Type] = dict(initial or {})

    def get(self, key: str) -> Optional[Type]:
        return self._types.get(key)

    def check(self, key: str, ty: Type) -> None:
        existing = self._types.get(key)
        if existing is not None and existing != ty:
            raise StoreTypeError(key, existing, ty)

    def extend(self, key: str, ty: Type) -> None:
        self.check(key, ty)
        self._types.setdefault(key, ty)

    def includes(self, other: "StoreTyping") -> bool:
        """Whether this typing extends ``other`` (Σ′ ⊇ Σ)."""
        return all(self._types.get(k) == t for k, t in other.items())

    def snapshot(self) -> "StoreTyping":
        return StoreTyping(self._types)

    def items(self):
        return self._types.items()

    def __contains__(self, key: str) -> bool:
        return key in self._types

    def __len__(self) -> int:
        return len(self._types)

    def __eq__(self, other) -> bool:
        return isinstance(other, StoreTyping) and self._types == other._types

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {t.render()}" for k, t in self._types.items())
        return f"StoreTyping({{{body}}})"


@dataclass(frozen=True)
class StoreEntry:
    value: Value
    inserted_at_step: int
    inserted_at: float = 0.0


class Store:
    """Bounded key-value memory with per-store capacity and time-to-live.

    A ttl of 0 disables expiry. On overflow the entry with the oldest
    insertion step is evicted.
    """

    def __init__(self, capacity: int = 20, ttl_seconds: int = 0, typing: Optional[StoreTyping] = None):
        if capacity < 0 or ttl_seconds < 0:
            raise ValueError("store capacity and ttl must be non-negative")
        self.capacity = capacity
        self.ttl_seconds = ttl_seconds
        self.typing = typing if typing is not None else StoreTyping()
        self._entries: Dict[str, StoreEntry] = {}

    def write(self, key: str, value: Value, ty: Type, step: int, now: float = 0.0) -> None:
        # Typing is checked before any mutation.
        self.typing.check(key, ty)
        if self.capacity == 0:
            return
        self.typing.extend(key, ty)
        if key not in self._entries and len(self._entries) >= self.capacity:
            oldest = min(self._entries, key=lambda k: self._entries[k].inserted_at_step)
            del self._entries[oldest]
        self._entries[key] = StoreEntry(value, step, now)

    def is_live(self, entry: StoreEntry, now: float) -> bool:
        return self.ttl_seconds == 0 or now - entry.inserted_at <= self.ttl_seconds

    def read(self, key: str, now: float = 0.0) -> Optional[Value]:
        entry = self._entries.get(key)
        if entry is None or not self.is_live(entry, now):
            return None
        return entry.value

    def visible(self, now: float = 0.0) -> Dict[str, Value]:
        return {k: e.value for k, e in self._entries.items() if self.is_live(e, now)}

    def entries(self) -> Iterator[Tuple[str, StoreEntry]]:
        return iter(list(self._entries.items()))

    def keys(self):
        return list(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"Store(capacity={self.capacity}, ttl={self.ttl_seconds}, keys={self.keys()})"
