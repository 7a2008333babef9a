"""Structured results for well-formedness and property checks.

Checkers never raise on a bad model; they return a Report whose violations
pinpoint the condition and a witness tuple.  Raising is reserved for inputs
that are not models at all (parse errors, missing symbols).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Violation:
    condition: str
    witness: tuple
    message: str

    def to_json(self) -> dict:
        return {
            "condition": self.condition,
            "witness": [_jsonable(x) for x in self.witness],
            "message": self.message,
        }


@dataclass
class Report:
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, condition: str, witness: tuple, message: str) -> None:
        self.violations.append(Violation(condition, witness, message))

    def note(self, text: str) -> None:
        self.notes.append(text)

    def merge(self, other: "Report") -> "Report":
        self.violations.extend(other.violations)
        self.notes.extend(other.notes)
        return self

    def by_condition(self, condition: str) -> list[Violation]:
        return [v for v in self.violations if v.condition == condition]

    def conditions(self) -> set[str]:
        return {v.condition for v in self.violations}

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "ok": self.ok,
            "violations": [v.to_json() for v in self.violations],
            "notes": list(self.notes),
        }

    def summary(self) -> str:
        if self.ok:
            return "no violations"
        counts: dict[str, int] = {}
        for v in self.violations:
            counts[v.condition] = counts.get(v.condition, 0) + 1
        parts = ", ".join("%s x%d" % (c, n) for c, n in sorted(counts.items()))
        return "%d violation(s): %s" % (len(self.violations), parts)


def _jsonable(x):
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    if isinstance(x, (tuple, list, frozenset, set)):
        items = list(x)
        if isinstance(x, (frozenset, set)):
            items = sorted(items, key=repr)
        return [_jsonable(i) for i in items]
    return str(x)


def merge_reports(reports: Iterable[Report]) -> Report:
    out = Report()
    for r in reports:
        out.merge(r)
    return out
