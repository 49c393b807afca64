import itertools

import pytest

from pimmur.core.loop import new_state
from pimmur.experiments import registry
from pimmur.experiments.social_balance import TriadSigns, assign_relations, classify_triad, pattern_counts
from pimmur.llm import ScriptedBackend
from pimmur.llm.scripts import load_script


@pytest.mark.parametrize("signs", list(itertools.product([1, -1], repeat=3)))
def test_classify_triad_by_friend_edges(signs) -> None:
    triad = TriadSigns(ab=signs[0], bc=signs[1], ca=signs[2])
    friends = signs.count(1)
    expected = "balanced" if friends in (1, 3) else "unbalanced"
    assert classify_triad(triad, strict_balance=True) == expected
    relaxed = "balanced" if friends in (0, 1, 3) else "unbalanced"
    assert classify_triad(triad, strict_balance=False) == relaxed


def test_agents_only_learn_their_own_relations(make_config) -> None:
    backend = ScriptedBackend(load_script("default"))
    state = new_state(make_config("social_balance"), backend)
    assign_relations(state, TriadSigns(ab=1, bc=-1, ca=-1))
    a, b, c = state.agent_ids
    assert state.notes[a] == [f"You consider {state.name(b)} a good friend.", f"You regard {state.name(c)} as an enemy."]
    assert state.notes[b] == [f"You consider {state.name(a)} a good friend.", f"You regard {state.name(c)} as an enemy."]
    assert all(state.name(agent) not in " ".join(state.notes[agent]) for agent in state.agent_ids)


def test_friendly_triads_end_all_friends(make_config, make_context) -> None:
    ctx = make_context(make_config("social_balance", "friendly"), keep_prompts=True)
    result = registry.get("social_balance")(ctx)
    assert result.balanced_fraction == 1.0
    assert result.final_patterns == {0: 0, 1: 0, 2: 0, 3: 4}
    assert sum(result.initial_patterns.values()) == 4
    assert [s["episode"] for s in ctx.transcript.snapshots] == [0, 1, 2, 3]
    assert not any("balance" in text.lower() for text in ctx.guard.texts)


@pytest.mark.parametrize("strict,expected", [(False, 1.0), (True, 0.0)])
def test_hostile_triads_depend_on_strictness(make_config, make_context, strict, expected) -> None:
    config = make_config("social_balance", "hostile", social_balance={"n_triads": 3, "strict_balance": strict})
    result = registry.get("social_balance")(make_context(config))
    assert result.balanced_fraction == expected
    assert result.final_patterns[0] == 3
    assert all(t.final == [-1, -1, -1] for t in result.triads)


def test_triads_use_derived_seeds(make_config, make_context) -> None:
    result = registry.get("social_balance")(make_context(make_config("social_balance", "friendly", social_balance={"n_triads": 12})))
    assert len({tuple(t.initial) for t in result.triads}) > 1


def test_pattern_counts() -> None:
    assert pattern_counts([[1, 1, 1], [1, -1, -1], [-1, -1, -1]]) == {0: 1, 1: 1, 2: 0, 3: 1}
