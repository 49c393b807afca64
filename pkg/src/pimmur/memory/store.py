"""Per-agent memory: an append-only event log with window or reflection compaction.

The store is a pure fold over its events. Reflection events supersede the raw
events they summarize; superseded events stay in the log for replay but are
never rendered again.
"""
from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Optional

from pydantic import BaseModel

from ..core.config import MemoryVariant
from ..core.types import canonical_json
from ..core.errors import EmptySentence, ReflectionScheduleError, RoundRegression
from ..llm.base import ChatBackend, ChatRequest, ChatTurn
from .base import MemoryEvent

logger = logging.getLogger(__name__)

HISTORY_HEADER = "Here are the history of past conversations:\n"
IMPRESSIONS_HEADER = "\n\nHere are your impression of each person you have chat with:\n"

REFLECTION_PROMPT = (
    "Here are things that happened to you recently:\n{events}\n\n"
    "Summarize what you experienced and what you now think in at most three sentences, "
    "written in the first person. Only output the summary."
)


class MemoryStore(BaseModel):
    variant: MemoryVariant = MemoryVariant()
    events: List[MemoryEvent] = []
    # agent_id -> one-sentence impression
    impressions: Dict[str, str] = {}
    impression_names: Dict[str, str] = {}

    @property
    def last_round(self) -> int:
        return self.events[-1].round if self.events else 0

    def record(self, event: MemoryEvent) -> "MemoryStore":
        if self.events and event.round < self.last_round:
            raise RoundRegression(f"event round {event.round} precedes last recorded round {self.last_round}")
        if event.kind == "reflection":
            self._supersede_pending()
        if event.kind == "impression_update" and event.about:
            sentence = event.content or event.description
            suffix = f": {sentence}"
            label = event.description[: -len(suffix)] if event.description.endswith(suffix) else event.about
            self.impressions[event.about] = sentence
            self.impression_names[event.about] = label or event.about
        self.events.append(event.model_copy(update={"superseded": False}))
        return self

    def _pending(self) -> List[int]:
        """Indices of raw events recorded since the last reflection."""

        pending: List[int] = []
        for idx in range(len(self.events) - 1, -1, -1):
            event = self.events[idx]
            if event.kind == "reflection":
                break
            if event.kind in {"heard", "said"} and not event.superseded:
                pending.append(idx)
        return list(reversed(pending))

    def _supersede_pending(self) -> None:
        for idx in self._pending():
            self.events[idx] = self.events[idx].model_copy(update={"superseded": True})

    def set_impression(self, about: str, sentence: str, name: Optional[str] = None, round: Optional[int] = None) -> "MemoryStore":
        """Replace the impression of ``about``; with a round, also log it as an event."""

        sentence = sentence.strip()
        if not sentence:
            raise EmptySentence(f"impression of {about} is empty")
        label = name or about
        if round is None:
            self.impressions[about] = sentence
            self.impression_names[about] = label
            return self
        return self.record(
            MemoryEvent(round=round, kind="impression_update", description=f"{label}: {sentence}", content=sentence, about=about)
        )

    def visible_events(self) -> List[MemoryEvent]:
        return [e for e in self.events if not e.superseded and e.kind != "impression_update"]

    def last_heard(self) -> Optional[MemoryEvent]:
        for event in reversed(self.events):
            if event.kind == "heard":
                return event
        return None

    def render_history(self, char_budget: int) -> str:
        window = self.variant.size if self.variant.kind == "window" else None
        selected: List[str] = []
        used = 0
        raw_taken = 0
        for event in reversed(self.visible_events()):
            if window is not None and event.kind != "reflection" and raw_taken >= window:
                continue
            line = f"[Round {event.round}] {event.description}"
            cost = len(line) + (1 if selected else 0)
            if used + cost > char_budget:
                break
            selected.append(line)
            used += cost
            if event.kind != "reflection":
                raw_taken += 1
        return "\n".join(reversed(selected))

    def render_impressions(self) -> str:
        return "\n".join(
            f"{self.impression_names.get(about, about)}: {sentence}" for about, sentence in sorted(self.impressions.items())
        )

    def render_context(self, char_budget: int = 6000) -> str:
        """History and impressions blocks, never longer than ``char_budget``."""

        impressions = self.render_impressions()
        fixed = len(HISTORY_HEADER) + len(IMPRESSIONS_HEADER) + len(impressions)
        history = self.render_history(max(char_budget - fixed, 0))
        text = f"{HISTORY_HEADER}{history}{IMPRESSIONS_HEADER}{impressions}"
        return text[:char_budget]

    def reflection_request(self, owner: str, temperature: float = 0.7, max_tokens: int = 512) -> ChatRequest:
        lines = [f"[Round {self.events[i].round}] {self.events[i].description}" for i in self._pending()]
        return ChatRequest(
            system_prompt=f"You are {owner}.",
            turns=[ChatTurn(role="system", content=REFLECTION_PROMPT.format(events="\n".join(lines)))],
            temperature=temperature,
            max_tokens=max_tokens,
            kind="reflection",
            slots={"name": owner, "round": str(self.last_round)},
        )

    def reflect(self, backend: ChatBackend, round: int, owner: str = "yourself", temperature: float = 0.7) -> "MemoryStore":
        """Summarize pending raw events into one reflection event.

        The store is left untouched when the backend fails. Nothing happens when
        no raw event is pending.
        """

        if self.variant.kind != "reflection":
            raise ReflectionScheduleError("reflect called on a window memory")
        if round % self.variant.interval != 0:
            raise ReflectionScheduleError(f"round {round} is not a multiple of interval {self.variant.interval}")
        if not self._pending():
            return self
        summary = backend.chat(self.reflection_request(owner, temperature)).strip()
        if not summary:
            logger.warning("empty reflection for %s at round %d; skipped", owner, round)
            return self
        return self.record(MemoryEvent(round=max(round, self.last_round), kind="reflection", description=summary, content=summary))

    @classmethod
    def replay(cls, variant: MemoryVariant, events: Iterable[MemoryEvent]) -> "MemoryStore":
        store = cls(variant=variant)
        for event in events:
            store.record(event)
        return store

    def dump_lines(self) -> List[str]:
        return [canonical_json(e.model_dump(mode="json")) for e in self.events]
