"""Serial retelling along a chain, scored by similarity to the original."""
from __future__ import annotations

import logging
from typing import List

from ..core.loop import atomic_round, converse, finish_round, record_snapshot, seed_memory
from ..eval.metrics import cosine_similarity, mean
from .base import RunContext, TelephoneResult, registry
from .corpora import get_message
from .steering import steering_line

logger = logging.getLogger(__name__)

TOPIC = "Catching up on the news from around the neighbourhood."


@registry.register("telephone")
def run_telephone(ctx: RunContext) -> TelephoneResult:
    """One hop per round: agent i tells agent i+1 what it heard."""

    cfg = ctx.config
    message = get_message(cfg.telephone.message_id)
    state = ctx.new_state(topic=cfg.topic or TOPIC)
    state.steering = steering_line("telephone", cfg.instruction_variant)
    original = ctx.embedder.embed(message.text)

    chain = state.agent_ids
    seed_memory(state, chain[0], f"You were told: {message.text}", message.text)
    similarities: List[float] = []
    for hop in range(1, len(chain)):
        speaker, listener = chain[hop - 1], chain[hop]
        with atomic_round(state):
            (_, utterance), = converse(state, ctx.backend, speaker, listener, turns=1)
            state.acting = speaker
            similarity = cosine_similarity(original, ctx.embedder.embed(utterance))
            finish_round(state, ctx.backend)
            record_snapshot(state, kind="hop", hop=hop, sender=speaker, recipient=listener, similarity=similarity)
        similarities.append(similarity)
        logger.debug("telephone hop %d similarity %.4f", hop, similarity)

    return TelephoneResult(
        seed=cfg.seed,
        n_agents=cfg.n_agents,
        instruction_variant=cfg.instruction_variant,
        prompts_scanned=ctx.guard.scanned,
        message_id=message.id,
        similarities=similarities,
        mean_similarity=mean(similarities),
        terminal_similarity=similarities[-1] if similarities else None,
    )
