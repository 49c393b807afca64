"""Bundled claim, question, and relay-message corpora."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Literal, Optional, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..core.errors import InvalidConfig


class _Entry(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    text: str = Field(min_length=1)


class Claim(_Entry):
    type: Literal["social", "science"] = "social"


class Question(_Entry):
    # answer labels, e.g. A-D, and the option text behind each label
    choices: List[str]
    options: List[str] = []
    type: Optional[str] = None

    @model_validator(mode="after")
    def _enough_choices(self) -> "Question":
        if len(self.choices) < 2:
            raise ValueError("a question needs at least two choices")
        if self.options and len(self.options) != len(self.choices):
            raise ValueError("options must pair up with choices")
        return self

    def render(self) -> str:
        lines = [self.text]
        lines.extend(f"{label}. {option}" for label, option in zip(self.choices, self.options))
        return "\n".join(lines)


class RelayMessage(_Entry):
    pass


E = TypeVar("E", bound=_Entry)


def _load(filename: str, model: Type[E]) -> Dict[str, E]:
    text = resources.files("pimmur.experiments").joinpath(f"data/{filename}").read_text(encoding="utf-8")
    entries: Dict[str, E] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            entry = model.model_validate(json.loads(line))
        except (json.JSONDecodeError, ValidationError) as exc:
            raise InvalidConfig(f"{filename}:{lineno}: {exc}") from exc
        entries[entry.id] = entry
    return entries


@lru_cache(maxsize=None)
def claims() -> Dict[str, Claim]:
    return _load("claims.jsonl", Claim)


@lru_cache(maxsize=None)
def questions() -> Dict[str, Question]:
    return _load("questions.jsonl", Question)


@lru_cache(maxsize=None)
def relay_messages() -> Dict[str, RelayMessage]:
    return _load("messages.jsonl", RelayMessage)


def _lookup(table: Dict[str, E], key: str, label: str) -> E:
    if key not in table:
        raise InvalidConfig(f"unknown {label} {key!r}; available: {', '.join(sorted(table))}")
    return table[key]


def get_claim(claim_id: str) -> Claim:
    return _lookup(claims(), claim_id, "claim")


def get_message(message_id: str) -> RelayMessage:
    return _lookup(relay_messages(), message_id, "message")


def question_bank() -> List[Question]:
    return [questions()[k] for k in sorted(questions())]
