"""Engine state for one simulation episode."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Protocol, Sequence

import numpy as np

from ..memory.base import MemoryEvent
from ..memory.store import MemoryStore
from .config import SimConfig
from .topology import Topology
from .types import AgentProfile, Transcript


class PromptGuard(Protocol):
    def check(self, texts: Sequence[str], where: str) -> None:
        ...


@dataclass
class Checkpoint:
    round: int
    profiles: List[AgentProfile]
    memories: Dict[str, tuple[List[MemoryEvent], Dict[str, str], Dict[str, str]]]
    topology_nodes: List[str]
    topology_edges: List[tuple[str, str]]
    n_messages: int
    n_snapshots: int
    rng_state: Dict[str, Any]


@dataclass
class EngineState:
    config: SimConfig
    profiles: List[AgentProfile]
    memories: Dict[str, MemoryStore]
    topology: Topology
    transcript: Transcript
    rng: np.random.Generator
    round: int = 0
    episode: int = 0
    topic: str = ""
    # private context lines shown only to one agent
    notes: Dict[str, List[str]] = field(default_factory=dict)
    # extra template values for scripted backends, per agent
    hints: Dict[str, Dict[str, str]] = field(default_factory=dict)
    # ablation line appended to conversational actions
    steering: Optional[str] = None
    guard: Optional[PromptGuard] = None
    acting: Optional[str] = None

    def __post_init__(self) -> None:
        ids = [p.agent_id for p in self.profiles]
        if len(set(ids)) != len(ids):
            raise ValueError("agent ids must be unique")
        if set(ids) != set(self.memories):
            raise ValueError("memories must be keyed by exactly the profile ids")

    def profile(self, agent_id: str) -> AgentProfile:
        for p in self.profiles:
            if p.agent_id == agent_id:
                return p
        raise KeyError(f"no agent {agent_id!r}")

    def name(self, agent_id: str) -> str:
        return self.profile(agent_id).display_name

    @property
    def agent_ids(self) -> List[str]:
        return [p.agent_id for p in self.profiles]

    def add_agent(self, profile: AgentProfile) -> None:
        if profile.agent_id in self.memories:
            raise ValueError(f"{profile.agent_id} already exists")
        self.profiles.append(profile)
        self.memories[profile.agent_id] = MemoryStore(variant=self.config.memory_variant)

    def checkpoint(self) -> Checkpoint:
        return Checkpoint(
            round=self.round,
            profiles=list(self.profiles),
            memories={
                aid: (list(m.events), dict(m.impressions), dict(m.impression_names)) for aid, m in self.memories.items()
            },
            topology_nodes=list(self.topology.nodes),
            topology_edges=list(self.topology.edges),
            n_messages=len(self.transcript.messages),
            n_snapshots=len(self.transcript.snapshots),
            rng_state=self.rng.bit_generator.state,
        )

    def restore(self, cp: Checkpoint) -> None:
        self.round = cp.round
        self.profiles = list(cp.profiles)
        self.memories = {
            aid: MemoryStore(variant=self.config.memory_variant, events=list(ev), impressions=dict(imp), impression_names=dict(names))
            for aid, (ev, imp, names) in cp.memories.items()
        }
        self.topology.nodes = list(cp.topology_nodes)
        self.topology.edges = list(cp.topology_edges)
        del self.transcript.messages[cp.n_messages:]
        del self.transcript.snapshots[cp.n_snapshots:]
        self.rng.bit_generator.state = cp.rng_state
        self.acting = None
