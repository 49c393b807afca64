"""Network growth: newcomers meet people one-to-one, then pick friends."""
from __future__ import annotations

import logging
import re
from typing import Dict, List, Sequence

from ..core.errors import TooFewPoints
from ..core.loop import atomic_round, converse, finish_round, form_impression, query_agent, record_snapshot, recruit
from ..core.state import EngineState
from ..eval.metrics import ccdf, fit_loglog
from .base import GrowthRecordModel, NetworkGrowthResult, RunContext, registry

logger = logging.getLogger(__name__)

TOPIC = "You are at a dinner reception and you have just been introduced to some new people."
SELECT_QUERY = "Now, from the people you have met above, please select exactly {m} people from the list to make friend with."
SELECT_RETRY = SELECT_QUERY + " Reply with exactly {m} different names from the list, separated by commas."


def parse_selection(text: str, names: Dict[str, str]) -> List[str]:
    """Agent ids whose display names appear in ``text``, in order of appearance.

    Longer names are matched first so "Ava 2" is never read as "Ava".
    """

    found: List[tuple[int, str]] = []
    remaining = text
    for name in sorted(names, key=len, reverse=True):
        pattern = re.compile(rf"(?<!\w){re.escape(name)}(?!\w)", re.IGNORECASE)
        for match in pattern.finditer(remaining):
            found.append((match.start(), names[name]))
        remaining = pattern.sub(lambda m: " " * len(m.group(0)), remaining)
    ordered: List[str] = []
    for _, aid in sorted(found):
        if aid not in ordered:
            ordered.append(aid)
    return ordered


def _valid(chosen: Sequence[str], conversed: Sequence[str], m: int) -> bool:
    return len(chosen) == m and set(chosen) <= set(conversed)


def choose_friends(state: EngineState, ctx: RunContext, newcomer: str, conversed: List[str], m: int) -> tuple[List[str], bool]:
    """Ask the newcomer to pick ``m`` friends; re-prompt once, then pick at random."""

    options = [state.name(aid) for aid in conversed]
    names = {state.name(aid): aid for aid in state.agent_ids if aid != newcomer}
    for template in (SELECT_QUERY, SELECT_RETRY):
        answer = query_agent(state, ctx.backend, newcomer, template.format(m=m), options=options, pick=m)
        chosen = parse_selection(answer, names)
        if _valid(chosen, conversed, m):
            return chosen, False
        logger.debug("selection %r from %s is not %d conversed names", answer, newcomer, m)
    picks = state.rng.choice(len(conversed), size=m, replace=False)
    chosen = [conversed[int(i)] for i in picks]
    logger.warning("%s gave no usable selection; falling back to %s", newcomer, chosen)
    return chosen, True


def grow_step(state: EngineState, ctx: RunContext, step: int) -> GrowthRecordModel:
    params = ctx.config.network_growth
    existing = list(state.topology.nodes)
    newcomer = recruit(state, ctx.backend).agent_id
    size = min(params.sample_size, len(existing))
    conversed = [existing[int(i)] for i in state.rng.choice(len(existing), size=size, replace=False)]
    for partner in conversed:
        history = converse(state, ctx.backend, newcomer, partner, turns=2)
        form_impression(state, ctx.backend, newcomer, partner, history)
    chosen, fallback = choose_friends(state, ctx, newcomer, conversed, params.m)
    state.topology.grow(newcomer, chosen)
    degrees = state.topology.degrees()
    return GrowthRecordModel(
        step=step, newcomer=newcomer, conversed=conversed, chosen_friends=chosen, fallback=fallback, degrees_after=degrees
    )


@registry.register("network_growth")
def run_network_growth(ctx: RunContext) -> NetworkGrowthResult:
    cfg = ctx.config
    params = cfg.network_growth
    state = ctx.new_state(topic=cfg.topic or TOPIC)
    records: List[GrowthRecordModel] = []
    for step in range(1, params.steps + 1):
        with atomic_round(state):
            record = grow_step(state, ctx, step)
            finish_round(state, ctx.backend)
            record_snapshot(state, kind="growth", **record.model_dump(mode="json"))
        records.append(record)

    degrees = state.topology.degrees()
    points = ccdf(list(degrees.values()))
    fit = None
    try:
        fit = fit_loglog(points, k_min=params.fit_k_min)
    except TooFewPoints as exc:
        logger.warning("no degree fit: %s", exc)
    n_edges = len(state.topology.edges)
    return NetworkGrowthResult(
        seed=cfg.seed,
        n_agents=cfg.n_agents,
        prompts_scanned=ctx.guard.scanned,
        m=params.m,
        steps=params.steps,
        records=records,
        n_nodes=len(state.topology.nodes),
        n_edges=n_edges,
        degrees=degrees,
        mean_degree=2 * n_edges / len(state.topology.nodes),
        ccdf=points,
        fit=fit,
        fallbacks=sum(r.fallback for r in records),
    )
