"""Structured outcomes of individual checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    check: str
    objects: tuple[str, ...] = ()
    passed: bool = True
    message: str = ""
    witness: dict[str, Any] = field(default_factory=dict)
    details: list["CheckReport"] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed

    def failures(self) -> list["CheckReport"]:
        out = [] if self.passed or self.details else [self]
        for d in self.details:
            out.extend(d.failures())
        return out

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"check": self.check, "objects": list(self.objects), "passed": self.passed}
        if self.message:
            d["message"] = self.message
        if self.witness:
            d["witness"] = self.witness
        if self.details:
            d["details"] = [x.to_dict() for x in self.details]
        return d


def combine(check: str, reports: list[CheckReport], objects: tuple[str, ...] = ()) -> CheckReport:
    ok = all(r.passed for r in reports)
    bad = sum(not r.passed for r in reports)
    msg = f"{len(reports)} cases" + ("" if ok else f", {bad} failing")
    return CheckReport(check, objects, ok, msg, details=reports)
