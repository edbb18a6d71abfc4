"""Outcome record shared by both testers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .oracle import QueryStats

ACCEPT = "accept"
REJECT = "reject"

# reason codes
ACCEPTED = "accepted"
EMPTY_FUNCTION = "empty-function"
TOO_MANY_BLOCKS = "too-many-blocks"
UNIFORM_JUNTA_REJECT = "uniform-junta-reject"
MIRROR_TEST_REJECT = "mirror-test-reject"
COUNTER_MISMATCH = "counter-mismatch"
FINAL_DISAGREEMENT = "final-disagreement"
APPROX_EMPTY = "approx-empty"
PHASE4_UNSATISFIED = "phase4-unsatisfied"


@dataclass
class TesterVerdict:
    outcome: str
    phase: str
    reason: str
    stats: QueryStats
    seed: int | None = None
    # relevant blocks, witnesses and other run details for inspection
    trace: dict[str, Any] = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return self.outcome == ACCEPT

    def as_dict(self) -> dict:
        return {
            "verdict": self.outcome,
            "phase": self.phase,
            "reason": self.reason,
            "mq": self.stats.mq,
            "samp": self.stats.samp,
            "total": self.stats.total,
        }
