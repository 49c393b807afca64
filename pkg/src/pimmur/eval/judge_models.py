"""Offline judge wrappers and model-name resolution for audits."""
from __future__ import annotations

from typing import Dict, List, Sequence

from ..experiments.steering import scan
from ..infra.config import Settings
from ..llm.base import ChatBackend, ChatRequest
from ..llm.embeddings import tokenize
from ..llm.router import backend_from_model

KEYWORD = "keyword"

# phrase in the instructions -> phenomenon a careful reader would name
PHENOMENA: Dict[str, str] = {
    "confirmation bias": "confirmation bias",
    "believe the following claim": "fake news spreading",
    "agents chose": "herd effect",
    "friend or an enemy": "social balance",
    "as accurately as possible": "message distortion in the telephone game",
    "make friend with": "preferential attachment",
}


class KeywordJudge:
    """Deterministic stand-in for a judge model.

    As a judge it compares goal tokens with the inference (unawareness) or
    scans the instructions with the steering deny-list (minimal control). As
    a subject it names phenomena whose trigger phrases appear verbatim.
    """

    name = KEYWORD

    def chat(self, request: ChatRequest) -> str:
        if request.kind == "audit_probe":
            return self._infer(request.slots.get("prompt", request.prompt_text()))
        check = request.slots.get("check")
        if check == "unawareness":
            goal = set(tokenize(request.slots.get("goal", "")))
            inferred = set(tokenize(request.slots.get("inference", "")))
            verdict = "Yes" if goal and goal <= inferred else "No"
            return f"Analysis: goal tokens {'found' if verdict == 'Yes' else 'missing'}.\nFinal Answer:\n{verdict}"
        if check == "min_control":
            hits = scan(request.slots.get("prompt", ""))
            if hits:
                return f"Analysis: the instructions contain {', '.join(hits)}.\nFinal Answer:\nNo"
            return "Analysis: no steering phrases found.\nFinal Answer:\nYes"
        return "Final Answer:\nYes"

    async def achat(self, request: ChatRequest) -> str:
        return self.chat(request)

    @staticmethod
    def _infer(instructions: str) -> str:
        lowered = instructions.lower()
        found = [name for phrase, name in PHENOMENA.items() if phrase in lowered]
        if not found:
            return "I cannot tell what is being studied."
        return "This looks like a study of " + " and ".join(dict.fromkeys(found)) + "."


def resolve_model(name: str, settings: Settings, seed: int = 0) -> ChatBackend:
    if name == KEYWORD:
        return KeywordJudge()
    return backend_from_model(name, settings, seed)


def resolve_models(names: Sequence[str], settings: Settings, seed: int = 0) -> List[ChatBackend]:
    return [resolve_model(name, settings, seed) for name in names]
