"""Memory event definitions."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

MemoryKind = Literal["heard", "said", "reflection", "impression_update"]


class MemoryEvent(BaseModel):
    model_config = ConfigDict(frozen=True)

    round: int = Field(ge=0)
    description: str = Field(min_length=1)
    kind: MemoryKind
    # raw utterance behind the description, when there is one
    content: Optional[str] = None
    # impression updates: the agent the sentence is about
    about: Optional[str] = None
    superseded: bool = False
