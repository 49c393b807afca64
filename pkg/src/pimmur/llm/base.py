"""LLM and embedding interface definitions."""
from __future__ import annotations

from typing import Dict, List, Literal, Protocol

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Role = Literal["system", "agent", "peer"]
RequestKind = Literal[
    "group_turn",
    "private_turn",
    "impression",
    "query",
    "reflection",
    "life_story",
    "audit_probe",
    "audit_judge",
]

# engine-side roles mapped onto the chat-completions wire roles
WIRE_ROLES: Dict[str, str] = {"system": "user", "agent": "assistant", "peer": "user"}


class ChatTurn(BaseModel):
    model_config = ConfigDict(frozen=True)

    role: Role
    content: str


class ChatRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    system_prompt: str
    turns: List[ChatTurn]
    temperature: float = Field(default=0.7, ge=0.0)
    max_tokens: int = Field(default=512, ge=1)
    kind: RequestKind = "query"
    # template values for scripted backends; never sent over the wire
    slots: Dict[str, str] = {}

    @field_validator("turns")
    @classmethod
    def _turns_nonempty(cls, value: List[ChatTurn]) -> List[ChatTurn]:
        if not value:
            raise ValueError("a chat request needs at least one turn")
        return value

    @property
    def last_turn(self) -> str:
        return self.turns[-1].content

    def wire_messages(self) -> List[Dict[str, str]]:
        messages = [{"role": "system", "content": self.system_prompt}] if self.system_prompt else []
        messages.extend({"role": WIRE_ROLES[t.role], "content": t.content} for t in self.turns)
        return messages

    def prompt_text(self) -> str:
        """Everything a model would read, for deny-list scans."""

        return "\n".join([self.system_prompt, *(t.content for t in self.turns)])

    def followup(self, response: str, instruction: str) -> "ChatRequest":
        """The same request with the model's answer and a corrective instruction appended."""

        turns = [*self.turns, ChatTurn(role="agent", content=response), ChatTurn(role="system", content=instruction)]
        return self.model_copy(update={"turns": turns, "slots": {**self.slots, "reprompt": "1"}})


class ChatBackend(Protocol):
    name: str

    def chat(self, request: ChatRequest) -> str:
        ...

    async def achat(self, request: ChatRequest) -> str:
        ...


class EmbeddingVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    values: List[float]
    dimension: int = Field(ge=1)

    @model_validator(mode="after")
    def _dimension_matches(self) -> "EmbeddingVector":
        if len(self.values) != self.dimension:
            raise ValueError(f"dimension {self.dimension} != {len(self.values)} values")
        return self


class Embedder(Protocol):
    name: str
    dimension: int | None

    def embed(self, text: str) -> EmbeddingVector:
        ...
