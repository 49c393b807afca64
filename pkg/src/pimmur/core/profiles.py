"""Agent profiles: Big Five trait sampling, names, and life stories."""
from __future__ import annotations

import logging
from functools import lru_cache
from importlib import resources
from typing import List

import numpy as np

from ..llm.base import ChatBackend, ChatRequest, ChatTurn
from .types import TRAIT_NAMES, AgentProfile, BigFiveTraits

logger = logging.getLogger(__name__)

# spawn-key streams; each (seed, stream, index) gets an independent generator
TRAIT_STREAM = 1
NAME_STREAM = 2

_PHRASES = {
    "openness": (
        "very conventional and wary of new experiences",
        "fairly traditional in tastes",
        "somewhat curious about new things",
        "curious and imaginative",
        "very open to new experiences",
    ),
    "conscientiousness": (
        "very spontaneous and careless with plans",
        "rather easygoing about duties",
        "reasonably organized",
        "dependable and well organized",
        "extremely disciplined and meticulous",
    ),
    "extraversion": (
        "very reserved and quiet",
        "somewhat reserved",
        "comfortable both alone and in company",
        "outgoing and talkative",
        "extremely sociable and energetic",
    ),
    "agreeableness": (
        "very blunt and competitive",
        "somewhat critical of others",
        "generally cooperative",
        "warm and trusting",
        "extremely kind and accommodating",
    ),
    "neuroticism": (
        "exceptionally calm and emotionally steady",
        "mostly relaxed",
        "occasionally anxious",
        "easily stressed",
        "very prone to worry and mood swings",
    ),
}


def _generator(seed: int, stream: int, index: int | None = None) -> np.random.Generator:
    key = (stream,) if index is None else (stream, index)
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def sample_traits(seed: int, index: int) -> BigFiveTraits:
    """Independent uniform draws keyed by (seed, index).

    Keying by agent index means growing the population never changes the
    traits of agents that already exist.
    """

    values = np.clip(_generator(seed, TRAIT_STREAM, index).random(len(TRAIT_NAMES)), 0.0, 1.0)
    return BigFiveTraits(**{name: float(v) for name, v in zip(TRAIT_NAMES, values)})


def describe_traits(traits: BigFiveTraits) -> List[str]:
    phrases = []
    for name in TRAIT_NAMES:
        band = min(int(getattr(traits, name) * 5), 4)
        phrases.append(_PHRASES[name][band])
    return phrases


@lru_cache(maxsize=1)
def _name_pool() -> tuple[str, ...]:
    text = resources.files("pimmur.core").joinpath("data/names.txt").read_text(encoding="utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip())


def display_name(seed: int, index: int) -> str:
    """Seeded permutation of the name pool; distinct for every index."""

    pool = _name_pool()
    order = _generator(seed, NAME_STREAM).permutation(len(pool))
    base = pool[int(order[index % len(pool)])]
    cycle = index // len(pool)
    return base if cycle == 0 else f"{base} {cycle + 1}"


def agent_id(index: int) -> str:
    return f"agent-{index:03d}"


def template_life_story(name: str, traits: BigFiveTraits) -> str:
    scores = ", ".join(f"{k} {v:.2f}" for k, v in traits.as_dict().items())
    return (
        f"I am {name}. People who know me would say I am {', '.join(describe_traits(traits))}. "
        f"My personality scores are {scores}."
    )


def life_story_request(
    name: str, traits: BigFiveTraits, temperature: float = 0.7, max_tokens: int = 512
) -> ChatRequest:
    traits_text = "; ".join(describe_traits(traits))
    return ChatRequest(
        system_prompt="You write short, realistic biographies of ordinary people.",
        turns=[
            ChatTurn(
                role="system",
                content=(
                    f"Write a short life story, in the first person and at most four sentences, for {name}, "
                    f"a person who is {traits_text}. Only output the story."
                ),
            )
        ],
        temperature=temperature,
        max_tokens=max_tokens,
        kind="life_story",
        slots={"name": name},
    )


def build_profile(
    seed: int,
    index: int,
    backend: ChatBackend | None = None,
    temperature: float = 0.7,
    max_tokens: int = 512,
) -> AgentProfile:
    """Create agent ``index``; without a backend the life story is a template."""

    traits = sample_traits(seed, index)
    name = display_name(seed, index)
    if backend is None:
        story = template_life_story(name, traits)
    else:
        story = backend.chat(life_story_request(name, traits, temperature, max_tokens)).strip()
        if not story:
            logger.warning("empty life story for %s; using the template", name)
            story = template_life_story(name, traits)
    return AgentProfile(agent_id=agent_id(index), display_name=name, traits=traits, life_story=story)
