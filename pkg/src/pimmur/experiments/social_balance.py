"""Three-person group discussions over a hidden friend/enemy graph."""
from __future__ import annotations

import logging
from typing import Dict, List, Literal, Tuple

from pydantic import BaseModel, ConfigDict

from ..core.loop import probe, record_snapshot, run_round
from ..core.state import EngineState
from .base import RunContext, SocialBalanceResult, TriadRecord, registry

logger = logging.getLogger(__name__)

RelationSign = Literal[1, -1]
TriadClass = Literal["balanced", "unbalanced"]

TOPIC = "Planning the neighbourhood summer festival together."
RELATION_QUERY = "Is {name} a Friend or an Enemy to you?"
RELATION_CHOICES = ("Friend", "Enemy")
_RELATION_NOTES = {1: "You consider {name} a good friend.", -1: "You regard {name} as an enemy."}


class TriadSigns(BaseModel):
    model_config = ConfigDict(frozen=True)

    ab: RelationSign
    bc: RelationSign
    ca: RelationSign

    def as_list(self) -> List[int]:
        return [self.ab, self.bc, self.ca]

    @property
    def friend_edges(self) -> int:
        return sum(1 for s in self.as_list() if s == 1)


def classify_triad(signs: TriadSigns, strict_balance: bool = False) -> TriadClass:
    """Balanced: all friends, one friendly pair among enemies, or (unless strict) all enemies."""

    friends = signs.friend_edges
    if friends in (1, 3):
        return "balanced"
    if friends == 0 and not strict_balance:
        return "balanced"
    return "unbalanced"


def _edges(ids: List[str]) -> List[Tuple[str, str]]:
    a, b, c = ids
    return [(a, b), (b, c), (c, a)]


def assign_relations(state: EngineState, signs: TriadSigns) -> None:
    """Each agent learns only its own two relations."""

    for (x, y), sign in zip(_edges(state.agent_ids), signs.as_list()):
        state.notes.setdefault(x, []).append(_RELATION_NOTES[sign].format(name=state.name(y)))
        state.notes.setdefault(y, []).append(_RELATION_NOTES[sign].format(name=state.name(x)))


def adjudicate(state: EngineState, ctx: RunContext) -> Tuple[TriadSigns, int]:
    """An edge is friendly only when both ends answer Friend about each other."""

    answers: Dict[Tuple[str, str], str | None] = {}
    for asker in state.agent_ids:
        for other in state.agent_ids:
            if other != asker:
                query = RELATION_QUERY.format(name=state.name(other))
                answers[(asker, other)] = probe(state, ctx.backend, asker, query, RELATION_CHOICES)
    invalid = sum(1 for v in answers.values() if v is None)
    signs = [
        1 if answers[(x, y)] == "Friend" and answers[(y, x)] == "Friend" else -1 for x, y in _edges(state.agent_ids)
    ]
    return TriadSigns(ab=signs[0], bc=signs[1], ca=signs[2]), invalid


def run_triad(ctx: RunContext, triad_id: int) -> TriadRecord:
    cfg = ctx.config
    state = ctx.new_state(seed=cfg.seed + triad_id, episode=triad_id, topic=cfg.topic or TOPIC)
    drawn = [int(s) for s in state.rng.choice([1, -1], size=3)]
    initial = TriadSigns(ab=drawn[0], bc=drawn[1], ca=drawn[2])
    assign_relations(state, initial)
    for _ in range(cfg.n_rounds):
        run_round(state, ctx.backend)
    final, invalid = adjudicate(state, ctx)
    balanced = classify_triad(final, cfg.social_balance.strict_balance) == "balanced"
    record_snapshot(
        state,
        kind="triad",
        triad_id=triad_id,
        initial=initial.as_list(),
        final=final.as_list(),
        balanced=balanced,
        invalid=invalid,
    )
    return TriadRecord(triad_id=triad_id, initial=initial.as_list(), final=final.as_list(), balanced=balanced, invalid_answers=invalid)


def pattern_counts(triads: List[List[int]]) -> Dict[int, int]:
    counts = {k: 0 for k in range(4)}
    for signs in triads:
        counts[sum(1 for s in signs if s == 1)] += 1
    return counts


@registry.register("social_balance")
def run_social_balance(ctx: RunContext) -> SocialBalanceResult:
    params = ctx.config.social_balance
    triads = [run_triad(ctx, i) for i in range(params.n_triads)]
    fraction = sum(t.balanced for t in triads) / len(triads)
    logger.info("social balance: %d/%d triads balanced", sum(t.balanced for t in triads), len(triads))
    return SocialBalanceResult(
        seed=ctx.config.seed,
        n_agents=ctx.config.n_agents,
        prompts_scanned=ctx.guard.scanned,
        strict_balance=params.strict_balance,
        triads=triads,
        balanced_fraction=fraction,
        initial_patterns=pattern_counts([t.initial for t in triads]),
        final_patterns=pattern_counts([t.final for t in triads]),
    )
