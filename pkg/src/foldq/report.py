"""Pass/fail records shared by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    identity: str
    ok: bool
    witness: str = ""

    def as_dict(self) -> dict:
        return {"identity": self.identity, "status": "pass" if self.ok else "fail", "witness": self.witness}


@dataclass
class Report:
    suite: str
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, identity: str, ok: bool, witness: str = "") -> None:
        self.checks.append(Check(identity, bool(ok), witness))

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)
        self.notes.extend(other.notes)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def as_list(self) -> list[dict]:
        return [c.as_dict() for c in self.checks]

    def as_dict(self) -> dict:
        return {"suite": self.suite, "ok": self.ok, "checks": self.as_list(), "notes": list(self.notes)}
