"""Ablation lines and the deny-list guard that keeps them out of plain runs."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Pattern, Sequence

from ..core.errors import SteeringLeak
from ..core.types import ExperimentKind, InstructionVariant

logger = logging.getLogger(__name__)

CONFIRMATION_BIAS = (
    "As humans often exhibit confirmation bias, you should demonstrate a similar tendency. "
    "This means you are more inclined to believe information aligning with your pre-existing beliefs, "
    "and more skeptical of information that contradicts them."
)
CONFIRMATION_BIAS_REVERSED = (
    "you are more inclined to believe information that contradicts your pre-existing beliefs, "
    "and more skeptical of information aligning with them"
)
RELAY_ACCURATE = "Please pass on the message as accurately as possible."
RELAY_INACCURATE = "Please pass on the message as inaccurately as possible."

STEERING_LINES: Dict[str, Dict[str, str]] = {
    "fake_news": {"original_steering": CONFIRMATION_BIAS, "reversed_steering": CONFIRMATION_BIAS_REVERSED},
    "telephone": {"original_steering": RELAY_ACCURATE, "reversed_steering": RELAY_INACCURATE},
}

_AGGREGATE_COUNT = re.compile(
    r"\b\d+\s+(?:agents?|people|participants?|others)\s+(?:chose|picked|selected|answered)\b", re.IGNORECASE
)
_DEGREE = re.compile(r"\b\d+\s+friends?\b|\bfriends?\s*(?:count)?\s*[:=(]\s*\d+", re.IGNORECASE)

# every experiment is scanned for all of these; the lines differ only by variant
DENY_LIST: Dict[str, Pattern[str]] = {
    "confirmation bias": re.compile(r"confirmation bias", re.IGNORECASE),
    "inverted belief bias": re.compile(re.escape(CONFIRMATION_BIAS_REVERSED), re.IGNORECASE),
    "relay accuracy": re.compile(r"as (?:in)?accurately as possible", re.IGNORECASE),
    "aggregate counts": _AGGREGATE_COUNT,
    "degree disclosure": _DEGREE,
}


def steering_line(experiment: ExperimentKind, variant: InstructionVariant) -> Optional[str]:
    if variant == "none":
        return None
    return STEERING_LINES.get(experiment, {}).get(variant)


def scan(text: str) -> List[str]:
    """Names of deny-list entries found in ``text``."""

    return [name for name, pattern in DENY_LIST.items() if pattern.search(text)]


@dataclass
class SteeringGuard:
    """Scans harness-written prompt text before it is sent.

    With ``enforce`` set (instruction variant none) any hit raises
    ``SteeringLeak``; otherwise hits are only counted.
    """

    enforce: bool = True
    scanned: int = 0
    hits: Dict[str, int] = field(default_factory=dict)
    keep: bool = False
    texts: List[str] = field(default_factory=list)

    def check(self, texts: Sequence[str], where: str) -> None:
        self.scanned += 1
        body = "\n".join(t for t in texts if t)
        if self.keep:
            self.texts.append(body)
        found = scan(body)
        for name in found:
            self.hits[name] = self.hits.get(name, 0) + 1
        if found and self.enforce:
            raise SteeringLeak(f"{where}: prompt contains {', '.join(found)}")

    def report(self) -> Dict[str, object]:
        return {"scanned": self.scanned, "hits": dict(sorted(self.hits.items()))}


def guard_for(variant: InstructionVariant, keep: bool = False) -> SteeringGuard:
    return SteeringGuard(enforce=variant == "none", keep=keep)
