"""Rumour spread among randomly paired agents, tracked as SIR belief states."""
from __future__ import annotations

import logging
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from ..core.loop import atomic_round, converse, finish_round, probe, record_snapshot, seed_memory
from ..core.state import EngineState
from ..eval.metrics import SirCounts, sir_counts
from ..llm.base import ChatBackend
from .base import FakeNewsResult, RunContext, registry
from .corpora import get_claim
from .steering import steering_line

logger = logging.getLogger(__name__)

SirState = Literal["skeptical", "infected", "recovered"]

TOPIC = "What has been happening in your town lately."
BELIEF_QUERY = "Do you currently believe the following claim: {claim}?"
BELIEF_CHOICES = ("Yes", "No")

_TRANSITIONS: Dict[Tuple[str, bool], SirState] = {
    ("skeptical", False): "skeptical",
    ("skeptical", True): "infected",
    ("infected", True): "infected",
    ("infected", False): "recovered",
    ("recovered", False): "recovered",
    # re-believing after recovery counts as infected again
    ("recovered", True): "infected",
}


def update_sir_state(prev: SirState, believes: bool) -> SirState:
    return _TRANSITIONS[(prev, bool(believes))]


def random_pairs(rng: np.random.Generator, agent_ids: Sequence[str]) -> List[Tuple[str, str]]:
    """Uniform random perfect matching; with an odd count the leftover agent idles."""

    order = [agent_ids[i] for i in rng.permutation(len(agent_ids))]
    return [(order[i], order[i + 1]) for i in range(0, len(order) - 1, 2)]


def classify_belief(
    state: EngineState, backend: ChatBackend, agent_id: str, claim: str, invalid: Optional[List[str]] = None
) -> bool:
    """Yes means the agent believes; an unusable answer counts as disbelief and is noted in ``invalid``."""

    answer = probe(state, backend, agent_id, BELIEF_QUERY.format(claim=claim), BELIEF_CHOICES)
    if answer is None and invalid is not None:
        invalid.append(agent_id)
    return answer == "Yes"


@registry.register("fake_news")
def run_fake_news(ctx: RunContext) -> FakeNewsResult:
    cfg = ctx.config
    claim = get_claim(cfg.fake_news.claim_id)
    state = ctx.new_state(topic=cfg.topic or TOPIC)
    state.steering = steering_line("fake_news", cfg.instruction_variant)

    patient_zero = state.agent_ids[0]
    seed_memory(state, patient_zero, f"You heard from a neighbour: {claim.text}", claim.text)
    sir: Dict[str, SirState] = {aid: "skeptical" for aid in state.agent_ids}
    sir[patient_zero] = "infected"

    series: List[SirCounts] = []
    invalid = 0
    for _ in range(cfg.n_rounds):
        with atomic_round(state):
            for a, b in random_pairs(state.rng, state.agent_ids):
                converse(state, ctx.backend, a, b, turns=2)
            finish_round(state, ctx.backend)
            updated: Dict[str, SirState] = {}
            unusable: List[str] = []
            for aid in state.agent_ids:
                believes = classify_belief(state, ctx.backend, aid, claim.text, unusable)
                updated[aid] = update_sir_state(sir[aid], believes)
            counts = sir_counts(state.round, updated)
            record_snapshot(
                state,
                kind="sir",
                states=updated,
                skeptical=counts.skeptical,
                infected=counts.infected,
                recovered=counts.recovered,
                invalid=unusable,
            )
        sir = updated
        invalid += len(unusable)
        series.append(counts)
        logger.info("fake news round %d: %s", counts.round, counts.model_dump(exclude={"round"}))

    return FakeNewsResult(
        seed=cfg.seed,
        n_agents=cfg.n_agents,
        instruction_variant=cfg.instruction_variant,
        prompts_scanned=ctx.guard.scanned,
        claim_id=claim.id,
        claim_type=claim.type,
        series=series,
        terminal_infected_share=series[-1].infected / cfg.n_agents,
        invalid_probes=invalid,
    )
