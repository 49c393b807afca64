"""Round-robin simulation loop: prompting, delivery, and out-of-band queries."""
from __future__ import annotations

import logging
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..infra.tracing import traced_span
from ..llm.base import ChatBackend, ChatRequest
from ..llm.parsing import choice_instruction, extract_final_answer
from ..memory.base import MemoryEvent
from ..memory.store import MemoryStore
from .config import SimConfig
from .errors import BackendError, RoundAborted, UnparseableAnswer
from .profiles import agent_id as make_agent_id, build_profile
from .prompts import Action, GenericQuery, GroupChat, Impression, IndividualChat, assemble_prompt
from .state import EngineState, PromptGuard
from .topology import build_topology
from .types import AgentProfile, Audience, Message, Transcript

logger = logging.getLogger(__name__)

ENGINE_STREAM = 3

History = List[Tuple[str, str]]


def new_state(
    config: SimConfig,
    backend: ChatBackend,
    *,
    seed: Optional[int] = None,
    episode: int = 0,
    topic: str = "",
    transcript: Optional[Transcript] = None,
    guard: Optional[PromptGuard] = None,
) -> EngineState:
    """Profiles, empty memories, and the topology for one episode."""

    seed = config.seed if seed is None else seed
    profiles = [_profile(config, backend, seed, i, round=0) for i in range(config.n_agents)]
    ids = [p.agent_id for p in profiles]
    return EngineState(
        config=config,
        profiles=profiles,
        memories={aid: MemoryStore(variant=config.memory_variant) for aid in ids},
        topology=build_topology(config.topology, ids),
        transcript=transcript if transcript is not None else Transcript(config_hash=config.config_hash),
        rng=np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(ENGINE_STREAM,))),
        episode=episode,
        topic=topic,
        guard=guard,
    )


def _profile(config: SimConfig, backend: ChatBackend, seed: int, index: int, round: int) -> AgentProfile:
    # template life stories keep scripted runs free of extra backend calls
    story_backend = None if config.backend.kind == "scripted" else backend
    try:
        return build_profile(seed, index, story_backend, config.temperature, config.max_tokens)
    except BackendError as exc:
        raise RoundAborted(round, make_agent_id(index), exc) from exc


def recruit(state: EngineState, backend: ChatBackend, seed: Optional[int] = None) -> AgentProfile:
    """Create the next agent by index and give it an empty memory."""

    seed = state.config.seed if seed is None else seed
    state.acting = make_agent_id(len(state.profiles))
    profile = _profile(state.config, backend, seed, len(state.profiles), round=state.round)
    state.add_agent(profile)
    return profile


def _slots(state: EngineState, agent_id: str) -> Dict[str, str]:
    slots = dict(state.hints.get(agent_id, {}))
    heard = state.memories[agent_id].last_heard()
    slots.setdefault("last_heard", (heard.content or heard.description) if heard else "")
    slots["round"] = str(state.round)
    return slots


def build_request(state: EngineState, agent_id: str, action: Action) -> ChatRequest:
    cfg = state.config
    notes = state.notes.get(agent_id, [])
    request = assemble_prompt(
        state.profile(agent_id),
        state.memories[agent_id].render_context(cfg.char_budget),
        state.topic,
        action,
        notes=notes,
        steering=state.steering,
        temperature=cfg.temperature,
        probe_temperature=cfg.probe_temperature,
        max_tokens=cfg.max_tokens,
        slots=_slots(state, agent_id),
    )
    if state.guard is not None:
        # only the text the harness writes; agent utterances are not scanned
        state.guard.check([state.topic, *notes, request.last_turn], where=f"{request.kind}:{agent_id}")
    return request


def _call(state: EngineState, backend: ChatBackend, request: ChatRequest, agent_id: str) -> str:
    state.acting = agent_id
    with traced_span("engine.turn", kind=request.kind, agent=agent_id, round=state.round, episode=state.episode):
        return backend.chat(request).strip()


def deliver(state: EngineState, message: Message) -> None:
    """Append to the transcript and record memory events per visibility."""

    state.transcript.append(message)
    if message.kind == "impression":
        return
    speaker = state.name(message.sender)
    if message.audience.is_broadcast:
        listeners = state.topology.neighbors(message.sender)
        said = f"You said to everyone: {message.content}"
        heard = f"{speaker} said to everyone: {message.content}"
    else:
        listeners = [message.audience.recipient] if message.audience.recipient else []
        said = f"You said to {state.name(message.audience.recipient)}: {message.content}"
        heard = f"{speaker} said to you: {message.content}"
    state.memories[message.sender].record(
        MemoryEvent(round=message.round, kind="said", description=said, content=message.content)
    )
    for listener in listeners:
        state.memories[listener].record(
            MemoryEvent(round=message.round, kind="heard", description=heard, content=message.content)
        )


def seed_memory(state: EngineState, agent_id: str, description: str, content: str) -> None:
    """Plant something the agent heard before the simulation starts."""

    state.memories[agent_id].record(
        MemoryEvent(round=state.round, kind="heard", description=description, content=content)
    )


@contextmanager
def atomic_round(state: EngineState) -> Iterator[EngineState]:
    """Roll the state back when a backend call fails inside the block."""

    checkpoint = state.checkpoint()
    try:
        yield state
    except BackendError as exc:
        agent = state.acting or "-"
        state.restore(checkpoint)
        logger.warning("round %d of episode %d aborted at %s: %s", checkpoint.round, state.episode, agent, exc)
        raise RoundAborted(checkpoint.round, agent, exc) from exc
    except BaseException:
        state.restore(checkpoint)
        raise
    state.acting = None


def turn_order(state: EngineState) -> List[str]:
    ids = state.agent_ids
    if not state.config.shuffle_turns:
        return ids
    return [ids[i] for i in state.rng.permutation(len(ids))]


def speak(state: EngineState, backend: ChatBackend, agent_id: str) -> Message:
    text = _call(state, backend, build_request(state, agent_id, GroupChat()), agent_id)
    message = Message(
        episode=state.episode,
        round=state.round,
        sender=agent_id,
        audience=Audience.broadcast(),
        kind="group_turn",
        content=text,
    )
    deliver(state, message)
    return message


def finish_round(state: EngineState, backend: ChatBackend) -> None:
    """Advance the round counter and reflect when the schedule says so."""

    state.round += 1
    variant = state.config.memory_variant
    if variant.kind != "reflection" or state.round % variant.interval != 0:
        return
    for aid in state.agent_ids:
        state.acting = aid
        with traced_span("engine.reflect", agent=aid, round=state.round, episode=state.episode):
            state.memories[aid].reflect(backend, state.round, owner=state.name(aid), temperature=state.config.temperature)


def run_round(state: EngineState, backend: ChatBackend, limit: Optional[int] = None) -> EngineState:
    """Every agent broadcasts once; the whole round commits or none of it does."""

    limit = state.config.n_rounds if limit is None else limit
    if state.round >= limit:
        raise ValueError(f"round {state.round} is past the configured {limit} rounds")
    with atomic_round(state):
        for aid in turn_order(state):
            speak(state, backend, aid)
        finish_round(state, backend)
    return state


def converse(state: EngineState, backend: ChatBackend, a: str, b: str, turns: int = 2) -> History:
    """Alternating private turns starting with ``a``; returns (speaker name, text) pairs."""

    history: History = []
    speaker, listener = a, b
    for _ in range(turns):
        action = IndividualChat(target=state.name(listener), history=tuple(history))
        text = _call(state, backend, build_request(state, speaker, action), speaker)
        deliver(
            state,
            Message(
                episode=state.episode,
                round=state.round,
                sender=speaker,
                audience=Audience.private(listener),
                kind="private_turn",
                content=text,
            ),
        )
        history.append((state.name(speaker), text))
        speaker, listener = listener, speaker
    return history


def form_impression(state: EngineState, backend: ChatBackend, a: str, b: str, history: Sequence[Tuple[str, str]]) -> str:
    """Ask ``a`` for a one-sentence remark about ``b`` and store it."""

    action = Impression(target=state.name(b), history=tuple(history))
    text = _call(state, backend, build_request(state, a, action), a)
    deliver(
        state,
        Message(
            episode=state.episode,
            round=state.round,
            sender=a,
            audience=Audience.private(a),
            kind="impression",
            content=text,
            subject=b,
        ),
    )
    if text:
        state.memories[a].set_impression(b, text, name=state.name(b), round=state.round)
    return text


def query_agent(
    state: EngineState,
    backend: ChatBackend,
    agent_id: str,
    query: str,
    choices: Optional[Sequence[str]] = None,
    options: Sequence[str] = (),
    pick: int = 0,
) -> str:
    """Out-of-band question; the agent's memory is never touched.

    With ``choices`` the answer is parsed, re-prompting once before giving up
    with ``UnparseableAnswer``.
    """

    action = GenericQuery(query=query, choices=tuple(choices or ()), options=tuple(options), pick=pick)
    request = build_request(state, agent_id, action)
    response = _call(state, backend, request, agent_id)
    if not choices:
        return response
    try:
        return extract_final_answer(response, choices)
    except UnparseableAnswer:
        retry = request.followup(response, choice_instruction(choices))
        return extract_final_answer(_call(state, backend, retry, agent_id), choices)


def probe(
    state: EngineState, backend: ChatBackend, agent_id: str, query: str, choices: Sequence[str]
) -> Optional[str]:
    """``query_agent`` that degrades to None on a twice-unparseable answer.

    Backend failures surface as ``RoundAborted`` naming the round and agent.
    """

    try:
        return query_agent(state, backend, agent_id, query, choices)
    except UnparseableAnswer as exc:
        logger.warning("invalid answer from %s in episode %d round %d: %s", agent_id, state.episode, state.round, exc)
        return None
    except BackendError as exc:
        logger.warning("query to %s failed in episode %d round %d: %s", agent_id, state.episode, state.round, exc)
        raise RoundAborted(state.round, agent_id, exc) from exc


def record_snapshot(state: EngineState, **payload: object) -> Dict[str, object]:
    snapshot: Dict[str, object] = {"episode": state.episode, "round": state.round, **payload}
    state.transcript.snapshots.append(snapshot)
    return snapshot
