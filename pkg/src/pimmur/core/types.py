"""Domain value types shared by the engine, experiments, and reports."""
from __future__ import annotations

import hashlib
import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

ExperimentKind = Literal["fake_news", "social_balance", "telephone", "herd", "network_growth"]
TopologyKind = Literal["chain", "complete", "dynamic_growth"]
InstructionVariant = Literal["none", "original_steering", "reversed_steering"]
MessageKind = Literal["group_turn", "private_turn", "impression"]

TRAIT_NAMES = ("openness", "conscientiousness", "extraversion", "agreeableness", "neuroticism")


def canonical_json(payload: Any) -> str:
    """Stable JSON text used for hashing and byte-identical artifacts."""

    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class BigFiveTraits(BaseModel):
    model_config = ConfigDict(frozen=True)

    openness: float = Field(ge=0.0, le=1.0)
    conscientiousness: float = Field(ge=0.0, le=1.0)
    extraversion: float = Field(ge=0.0, le=1.0)
    agreeableness: float = Field(ge=0.0, le=1.0)
    neuroticism: float = Field(ge=0.0, le=1.0)

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in TRAIT_NAMES}


class AgentProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    agent_id: str
    display_name: str
    traits: BigFiveTraits
    life_story: str = Field(min_length=1)


class Audience(BaseModel):
    """Broadcast when recipient is None, otherwise a private message."""

    model_config = ConfigDict(frozen=True)

    recipient: Optional[str] = None

    @classmethod
    def broadcast(cls) -> "Audience":
        return cls()

    @classmethod
    def private(cls, recipient: str) -> "Audience":
        return cls(recipient=recipient)

    @property
    def is_broadcast(self) -> bool:
        return self.recipient is None


class Message(BaseModel):
    model_config = ConfigDict(frozen=True)

    episode: int = Field(default=0, ge=0)
    round: int = Field(ge=0)
    sender: str
    audience: Audience
    kind: MessageKind
    content: str
    # for impressions: the agent the remark is about
    subject: Optional[str] = None

    @model_validator(mode="after")
    def _impressions_are_private(self) -> "Message":
        if self.kind == "impression" and self.audience.is_broadcast:
            raise ValueError("impression messages must have a private audience")
        return self


class Transcript(BaseModel):
    config_hash: str
    messages: List[Message] = []
    snapshots: List[Dict[str, Any]] = []

    def append(self, message: Message) -> None:
        if self.messages:
            last = self.messages[-1]
            if (message.episode, message.round) < (last.episode, last.round):
                raise ValueError(
                    f"message round {message.round} precedes round {last.round} in episode {message.episode}"
                )
        self.messages.append(message)

    def message_lines(self) -> List[str]:
        return [canonical_json(m.model_dump(mode="json")) for m in self.messages]

    def snapshot_lines(self) -> List[str]:
        return [canonical_json(s) for s in self.snapshots]

    def digest(self) -> str:
        body = "\n".join([self.config_hash, *self.message_lines(), *self.snapshot_lines()])
        return sha256_hex(body)
