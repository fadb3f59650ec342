"""Check results and their stable JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Check:
    """One verdict: an axiom, law, square or verdict of an audit."""

    axiom: str
    passed: bool
    witness: tuple[str, ...] = ()
    mode: str = "exact"
    bounds: dict[str, int] | None = None
    note: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "axiom": self.axiom,
            "status": self.status,
            "witness": list(self.witness),
            "mode": self.mode,
            "bounds": dict(self.bounds) if self.bounds else None,
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Report:
    title: str
    checks: list[Check] = field(default_factory=list)
    info: dict[str, Any] = field(default_factory=dict)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, checks: Iterable[Check]) -> None:
        self.checks.extend(checks)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def get(self, axiom: str) -> Check:
        for c in self.checks:
            if c.axiom == axiom:
                return c
        raise KeyError(axiom)

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
            "info": self.info,
        }

    def text(self) -> str:
        lines = [self.title]
        for c in self.checks:
            line = f"  {c.status.upper():4} {c.axiom} [{c.mode}]"
            if c.witness:
                line += "  witness: " + "; ".join(c.witness)
            if c.note:
                line += f"  ({c.note})"
            lines.append(line)
        for k in sorted(self.info):
            lines.append(f"  {k}: {self.info[k]}")
        return "\n".join(lines)


def dumps(payload: dict[str, Any]) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
