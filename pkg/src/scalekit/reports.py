"""Uniform check reports.

Every verifier returns a ``CheckReport`` so callers (and the command line
tool) can treat pass/fail, witnesses and counterexamples uniformly.  A report
always carries either witnesses for the passing case or a counterexample for
the failing one, plus a truncation label when the verdict is only meaningful
relative to the loaded truncation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckReport:
    name: str
    status: bool
    witnesses: tuple = ()
    counterexample: dict | None = None
    notes: tuple[str, ...] = ()
    truncation: str | None = None

    def __bool__(self) -> bool:
        return self.status

    def to_payload(self) -> dict:
        return {
            "check": self.name,
            "status": "pass" if self.status else "fail",
            "witnesses": list(self.witnesses),
            "counterexample": self.counterexample,
            "notes": list(self.notes),
            "truncation": self.truncation,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_payload(), sort_keys=True)


def truncation_label(space) -> str | None:
    if space.filtration is None:
        return None
    return "RELATIVE-TO-TRUNCATION(levels=%d, points=%d)" % (
        len(space.filtration), space.n)
