from dataclasses import asdict, dataclass, field
from typing import Any

from .enums import Status


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one exact check over a stated range."""

    name: str
    passed: bool
    checked: str
    counterexample: str | None = None
    data: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class PropertyReport:
    """Per-item results of a property sweep."""

    title: str
    items: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def to_json(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "items": [item.to_json() for item in self.items],
        }


@dataclass(frozen=True)
class VerdictRecord:
    """One instance of a statement checked against the period approximation."""

    check_id: str
    claim: str
    status: Status
    measured: str
    expected: str
    data: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "check_id": self.check_id,
            "claim": self.claim,
            "status": str(self.status),
            "measured": self.measured,
            "expected": self.expected,
            "data": self.data,
        }


@dataclass(frozen=True)
class SelfCheck:
    """Named audit attached to a period certificate."""

    name: str
    passed: bool
    data: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "data": self.data}
