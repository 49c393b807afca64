"""Shared harness plumbing: run context, result models, and the registry."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Annotated, Callable, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field

from ..core.config import SimConfig
from ..core.errors import UnknownExperiment
from ..core.loop import new_state
from ..core.state import EngineState
from ..core.types import Transcript
from ..eval.metrics import CcdfPoint, FitResult, FlipBucket, SirCounts
from ..llm.base import ChatBackend, Embedder
from .steering import SteeringGuard, guard_for


@dataclass
class RunContext:
    """Everything a harness needs; one transcript is shared by all episodes."""

    config: SimConfig
    backend: ChatBackend
    embedder: Embedder
    transcript: Transcript
    guard: SteeringGuard
    states: List[EngineState] = field(default_factory=list)

    @classmethod
    def create(cls, config: SimConfig, backend: ChatBackend, embedder: Embedder, keep_prompts: bool = False) -> "RunContext":
        return cls(
            config=config,
            backend=backend,
            embedder=embedder,
            transcript=Transcript(config_hash=config.config_hash),
            guard=guard_for(config.instruction_variant, keep=keep_prompts),
        )

    def new_state(self, *, seed: Optional[int] = None, episode: int = 0, topic: str = "") -> EngineState:
        """Start an episode on the shared transcript and keep it for the memory dump."""

        state = new_state(
            self.config,
            self.backend,
            seed=seed,
            episode=episode,
            topic=topic,
            transcript=self.transcript,
            guard=self.guard,
        )
        self.states.append(state)
        return state


class _Result(BaseModel):
    seed: int
    n_agents: int
    instruction_variant: str = "none"
    prompts_scanned: int = 0


class FakeNewsResult(_Result):
    experiment: Literal["fake_news"] = "fake_news"
    claim_id: str
    claim_type: str
    series: List[SirCounts]
    terminal_infected_share: float
    invalid_probes: int = 0


class TriadRecord(BaseModel):
    triad_id: int
    initial: List[int]
    final: List[int]
    balanced: bool
    invalid_answers: int = 0


class SocialBalanceResult(_Result):
    experiment: Literal["social_balance"] = "social_balance"
    strict_balance: bool
    triads: List[TriadRecord]
    balanced_fraction: float
    # number of friend edges (0..3) -> triad count
    initial_patterns: Dict[int, int]
    final_patterns: Dict[int, int]


class TelephoneResult(_Result):
    experiment: Literal["telephone"] = "telephone"
    message_id: str
    similarities: List[float]
    mean_similarity: Optional[float]
    terminal_similarity: Optional[float]


class HerdTrialRecord(BaseModel):
    trial: int
    question_id: str
    majority_choice: str
    confidence: Optional[int] = None
    initial_answer: Optional[str] = None
    final_answer: Optional[str] = None
    excluded: Optional[str] = None

    @property
    def flipped(self) -> Optional[bool]:
        if self.excluded or self.initial_answer is None or self.final_answer is None:
            return None
        return self.final_answer != self.initial_answer


class HerdResult(_Result):
    experiment: Literal["herd"] = "herd"
    trials: List[HerdTrialRecord]
    flip_table: Dict[int, FlipBucket]
    counted: int
    excluded: Dict[str, int]


class GrowthRecordModel(BaseModel):
    step: int
    newcomer: str
    conversed: List[str]
    chosen_friends: List[str]
    fallback: bool = False
    degrees_after: Dict[str, int]


class NetworkGrowthResult(_Result):
    experiment: Literal["network_growth"] = "network_growth"
    m: int
    steps: int
    records: List[GrowthRecordModel]
    n_nodes: int
    n_edges: int
    degrees: Dict[str, int]
    mean_degree: float
    ccdf: List[CcdfPoint]
    fit: Optional[FitResult] = None
    fallbacks: int = 0


ExperimentResult = Annotated[
    Union[FakeNewsResult, SocialBalanceResult, TelephoneResult, HerdResult, NetworkGrowthResult],
    Field(discriminator="experiment"),
]

Harness = Callable[[RunContext], ExperimentResult]


@dataclass
class HarnessRegistry:
    harnesses: Dict[str, Harness] = field(default_factory=dict)

    def register(self, name: str) -> Callable[[Harness], Harness]:
        def wrap(fn: Harness) -> Harness:
            self.harnesses[name] = fn
            return fn

        return wrap

    def get(self, name: str) -> Harness:
        if name not in self.harnesses:
            raise UnknownExperiment(f"no harness registered for {name!r}")
        return self.harnesses[name]


registry = HarnessRegistry()
