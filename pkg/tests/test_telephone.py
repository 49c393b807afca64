import pytest

from pimmur.experiments import registry
from pimmur.experiments.steering import RELAY_ACCURATE


def test_faithful_copies_keep_full_similarity(make_config, make_context) -> None:
    ctx = make_context(make_config("telephone", "copy", n_agents=15))
    result = registry.get("telephone")(ctx)
    assert len(result.similarities) == 14
    assert result.similarities == pytest.approx([1.0] * 14)
    assert result.terminal_similarity == pytest.approx(1.0)
    assert [m.audience.recipient for m in ctx.transcript.messages] == [f"agent-{i:03d}" for i in range(1, 15)]


def test_one_bad_relay_carries_down_the_chain(make_config, make_context) -> None:
    ctx = make_context(make_config("telephone", "telephone-drift", n_agents=6))
    result = registry.get("telephone")(ctx)
    first, *rest = result.similarities
    assert first == pytest.approx(1.0)
    assert rest == pytest.approx([rest[0]] * 4)
    assert rest[0] < 0.7
    assert result.mean_similarity == pytest.approx((first + 4 * rest[0]) / 5)


def test_hops_are_rounds(make_config, make_context) -> None:
    ctx = make_context(make_config("telephone", "copy"))
    registry.get("telephone")(ctx)
    hops = ctx.transcript.snapshots
    assert [(s["hop"], s["round"]) for s in hops] == [(1, 1), (2, 2), (3, 3), (4, 4)]
    assert [m.round for m in ctx.transcript.messages] == [0, 1, 2, 3]


def test_accuracy_instruction_only_under_steering(make_config, make_context) -> None:
    ctx = make_context(make_config("telephone", "copy", instruction_variant="original_steering"), keep_prompts=True)
    result = registry.get("telephone")(ctx)
    assert any(RELAY_ACCURATE in text for text in ctx.guard.texts)
    assert ctx.guard.hits == {"relay accuracy": 4}
    assert result.instruction_variant == "original_steering"
