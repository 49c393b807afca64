"""Prompt templates for simulation turns and out-of-band queries.

Only the topic and the query change between experiments; everything else is
the same chatroom framing for every agent.
"""
from __future__ import annotations

from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict

from ..llm.base import ChatRequest, ChatTurn, RequestKind
from .profiles import describe_traits
from .types import AgentProfile

PROFILE_BLOCK = (
    "You are in a virtual chatroom. Below is a description of yourself:\n"
    "{profile}\n\n"
    "You and others are discussing the following topic:\n"
    "{topic}\n\n"
    "Never mix up yourself with others.\n"
    "{memory}"
)

INDIVIDUAL_BLOCK = (
    "\n\nNow, you are having an individual conversation with {target}.\n"
    "Here is your conversation history so far:\n"
    "{history}\n"
)

GROUP_CHAT = "Now, it is your turn to speak.\nPlease express your opinion and output what you will send to others."
INDIVIDUAL_CHAT = "Now please generate what you would say to {target}. Only output your response with no explanation."
IMPRESSION = (
    "Now, based on your conversation, please output a one sentence remark on your impression of {target}. "
    "please output your impression with no explanation."
)
GENERIC_QUERY = (
    "You have exited the group discussion.\n"
    "Now, please answer the following question, please be concise. "
    "At the last line, output the answer with no explanation:\n"
    "{query}"
)


class _Action(BaseModel):
    model_config = ConfigDict(frozen=True)


class GroupChat(_Action):
    type: Literal["group_chat"] = "group_chat"


class IndividualChat(_Action):
    type: Literal["individual_chat"] = "individual_chat"
    target: str
    history: Tuple[Tuple[str, str], ...] = ()


class Impression(_Action):
    type: Literal["impression"] = "impression"
    target: str
    history: Tuple[Tuple[str, str], ...] = ()


class GenericQuery(_Action):
    type: Literal["generic_query"] = "generic_query"
    query: str
    # forced-choice answers, listed after the question
    choices: Tuple[str, ...] = ()
    # names offered for a multi-pick selection
    options: Tuple[str, ...] = ()
    pick: int = 0


Action = Union[GroupChat, IndividualChat, Impression, GenericQuery]

_KINDS: Dict[str, RequestKind] = {
    "group_chat": "group_turn",
    "individual_chat": "private_turn",
    "impression": "impression",
    "generic_query": "query",
}


def render_profile(profile: AgentProfile, notes: Sequence[str] = ()) -> str:
    lines = [
        f"Name: {profile.display_name}",
        "Personality: " + "; ".join(describe_traits(profile.traits)) + ".",
        f"Life story: {profile.life_story}",
    ]
    lines.extend(n for n in notes if n)
    return "\n".join(lines)


def render_history(history: Sequence[Tuple[str, str]]) -> str:
    if not history:
        return "(nothing has been said yet)"
    return "\n".join(f"{speaker}: {text}" for speaker, text in history)


def render_query(action: GenericQuery) -> str:
    text = action.query
    if action.options:
        text += "\nPeople you have met: " + ", ".join(action.options)
    if action.choices:
        text += "\nAnswer with one of: " + ", ".join(action.choices)
    return text


def assemble_prompt(
    profile: AgentProfile,
    memory_render: str,
    topic: str,
    action: Action,
    *,
    notes: Sequence[str] = (),
    steering: Optional[str] = None,
    temperature: float = 0.7,
    probe_temperature: float = 0.0,
    max_tokens: int = 512,
    slots: Optional[Dict[str, str]] = None,
) -> ChatRequest:
    """Build the chat request for one agent action.

    ``notes`` are private facts shown only to this agent (e.g. its own
    relations); ``steering`` is the ablation line appended to the action.
    """

    system = PROFILE_BLOCK.format(profile=render_profile(profile, notes), topic=topic, memory=memory_render)
    values: Dict[str, str] = {
        "sender": profile.agent_id,
        "name": profile.display_name,
        "topic": topic,
    }

    if isinstance(action, GroupChat):
        instruction = GROUP_CHAT
    elif isinstance(action, IndividualChat):
        system += INDIVIDUAL_BLOCK.format(target=action.target, history=render_history(action.history))
        instruction = INDIVIDUAL_CHAT.format(target=action.target)
        values["target"] = action.target
    elif isinstance(action, Impression):
        system += INDIVIDUAL_BLOCK.format(target=action.target, history=render_history(action.history))
        instruction = IMPRESSION.format(target=action.target)
        values["target"] = action.target
    else:
        instruction = GENERIC_QUERY.format(query=render_query(action))
        values["query"] = action.query
        listed: List[str] = list(action.choices or action.options)
        values["choices"] = ", ".join(listed)
        for i, item in enumerate(listed):
            values[f"choice_{i}"] = item
        if action.pick:
            values["first_picks"] = ", ".join(action.options[: action.pick])

    if steering and not isinstance(action, GenericQuery):
        instruction = f"{instruction}\n{steering}"

    values.update(slots or {})
    return ChatRequest(
        system_prompt=system,
        turns=[ChatTurn(role="system", content=instruction)],
        temperature=probe_temperature if isinstance(action, GenericQuery) else temperature,
        max_tokens=max_tokens,
        kind=_KINDS[action.type],
        slots=values,
    )
