"""Three-valued verdicts."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Optional


class Value(enum.Enum):
    TRUE = "TRUE"
    FALSE = "FALSE"
    UNKNOWN = "UNKNOWN"

    @staticmethod
    def of(b: bool) -> "Value":
        return Value.TRUE if b else Value.FALSE

    def __invert__(self) -> "Value":
        if self is Value.TRUE:
            return Value.FALSE
        if self is Value.FALSE:
            return Value.TRUE
        return Value.UNKNOWN

    def __and__(self, other: "Value") -> "Value":
        if self is Value.FALSE or other is Value.FALSE:
            return Value.FALSE
        if self is Value.TRUE and other is Value.TRUE:
            return Value.TRUE
        return Value.UNKNOWN

    def __or__(self, other: "Value") -> "Value":
        return ~(~self & ~other)

    @property
    def definite(self) -> bool:
        return self is not Value.UNKNOWN


TRUE, FALSE, UNKNOWN = Value.TRUE, Value.FALSE, Value.UNKNOWN


@dataclass
class Verdict:
    value: Value
    witness: Optional[Any] = None
    note: str = ""
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.value is Value.UNKNOWN:
            self.witness = None

    def __bool__(self):
        raise TypeError("a Verdict is three-valued; compare .value instead")

    @property
    def is_true(self) -> bool:
        return self.value is Value.TRUE

    @property
    def is_false(self) -> bool:
        return self.value is Value.FALSE

    @property
    def is_unknown(self) -> bool:
        return self.value is Value.UNKNOWN

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"verdict": self.value.value}
        if self.note:
            out["note"] = self.note
        if isinstance(self.witness, dict):
            out["witness"] = self.witness
        elif self.witness:
            out["witness"] = [w.to_json() if hasattr(w, "to_json") else repr(w) for w in self.witness]
        return out
