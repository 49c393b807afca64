"""Deterministic rule-driven backend standing in for a language model."""
from __future__ import annotations

import asyncio
import re
import string
from typing import Dict, FrozenSet, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, model_validator

from ..core.errors import ScriptError, TransportError
from .base import ChatRequest, RequestKind
from .embeddings import fnv1a_64


class _Slots(dict):
    def __missing__(self, key: str) -> str:
        return ""


_FORMATTER = string.Formatter()


class ScriptedRule(BaseModel):
    """First-match rule: regex over the last turn, optional kind, sender and slot filters."""

    model_config = ConfigDict(frozen=True)

    pattern: str = ".*"
    kinds: Optional[FrozenSet[RequestKind]] = None
    senders: Optional[FrozenSet[str]] = None
    # slot values that must all be present, e.g. {"role": "fixed"}
    when: Optional[Dict[str, str]] = None
    response: Optional[str] = None
    # seeded pick among several responses
    choices: Optional[List[str]] = None
    # raise a transport error instead of answering
    fail: bool = False

    @model_validator(mode="after")
    def _has_outcome(self) -> "ScriptedRule":
        if not self.fail and self.response is None and not self.choices:
            raise ValueError("a rule needs a response, choices, or fail=True")
        re.compile(self.pattern)
        return self

    @property
    def is_catch_all(self) -> bool:
        return self.pattern in {".*", ""} and self.kinds is None and self.senders is None and not self.when and not self.fail

    def matches(self, request: ChatRequest) -> bool:
        if self.kinds is not None and request.kind not in self.kinds:
            return False
        if self.senders is not None and request.slots.get("sender") not in self.senders:
            return False
        if self.when and any(request.slots.get(k) != v for k, v in self.when.items()):
            return False
        return re.search(self.pattern, request.last_turn, flags=re.DOTALL) is not None


def _render(template: str, request: ChatRequest) -> str:
    slots = _Slots(request.slots)
    slots.setdefault("last_turn", request.last_turn)
    return _FORMATTER.vformat(template, (), slots)


def scripted_chat(request: ChatRequest, script: Sequence[ScriptedRule], seed: int = 0) -> str:
    """Answer with the first matching rule; the script must end in a catch-all."""

    for rule in script:
        if not rule.matches(request):
            continue
        if rule.fail:
            raise TransportError(f"scripted failure for {request.slots.get('sender', 'request')}")
        if rule.choices:
            key = f"{seed}\x1f{request.kind}\x1f{request.system_prompt}\x1f{request.last_turn}"
            template = rule.choices[fnv1a_64(key) % len(rule.choices)]
        else:
            template = rule.response or ""
        return _render(template, request)
    raise ScriptError("no scripted rule matched; scripts must end with a catch-all")


class ScriptedBackend:
    """ChatBackend over a rule list."""

    def __init__(self, script: Sequence[ScriptedRule], seed: int = 0, name: str = "scripted") -> None:
        if not any(rule.is_catch_all for rule in script):
            raise ScriptError(f"script {name!r} has no catch-all rule")
        self.script = list(script)
        self.seed = seed
        self.name = name

    def chat(self, request: ChatRequest) -> str:
        return scripted_chat(request, self.script, self.seed)

    async def achat(self, request: ChatRequest) -> str:
        return await asyncio.to_thread(self.chat, request)
