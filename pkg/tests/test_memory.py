import pytest

from pimmur.core.config import MemoryVariant
from pimmur.core.errors import EmptySentence, ReflectionScheduleError, RoundRegression, TransportError
from pimmur.llm import ScriptedBackend, ScriptedRule
from pimmur.memory.base import MemoryEvent
from pimmur.memory.store import MemoryStore


def _heard(round: int, text: str) -> MemoryEvent:
    return MemoryEvent(round=round, kind="heard", description=f"Ava said to everyone: {text}", content=text)


def test_rounds_never_go_backwards() -> None:
    store = MemoryStore().record(_heard(2, "hi"))
    with pytest.raises(RoundRegression):
        store.record(_heard(1, "late"))


def test_window_keeps_latest_events() -> None:
    store = MemoryStore(variant=MemoryVariant(kind="window", size=2))
    for i in range(4):
        store.record(_heard(i, f"message {i}"))
    history = store.render_history(10_000)
    assert "message 0" not in history and "message 1" not in history
    assert history.splitlines() == ["[Round 2] Ava said to everyone: message 2", "[Round 3] Ava said to everyone: message 3"]


def test_render_respects_char_budget() -> None:
    store = MemoryStore(variant=MemoryVariant(kind="window", size=None))
    for i in range(50):
        store.record(_heard(i, "a fairly long sentence that repeats " * 3))
    for budget in (10, 200, 1000):
        assert len(store.render_context(budget)) <= budget


def test_impressions_replace_previous_sentence() -> None:
    store = MemoryStore()
    store.set_impression("agent-001", "Ben seems kind.", name="Ben", round=1)
    store.set_impression("agent-001", "Ben seems rude.", name="Ben", round=2)
    assert store.impressions == {"agent-001": "Ben seems rude."}
    assert "Ben: Ben seems rude." in store.render_context()
    assert "seems kind" not in store.render_context()
    with pytest.raises(EmptySentence):
        store.set_impression("agent-001", "  ")


def test_reflection_supersedes_raw_events() -> None:
    backend = ScriptedBackend([ScriptedRule(response="I mostly listened.")])
    store = MemoryStore(variant=MemoryVariant(kind="reflection", interval=2))
    store.record(_heard(0, "first")).record(_heard(1, "second"))
    store.reflect(backend, round=2, owner="Ava")
    history = store.render_history(10_000)
    assert history == "[Round 2] I mostly listened."
    assert sum(e.superseded for e in store.events) == 2
    assert len(store.events) == 3


def test_reflection_schedule_is_enforced() -> None:
    backend = ScriptedBackend([ScriptedRule(response="summary")])
    with pytest.raises(ReflectionScheduleError):
        MemoryStore().reflect(backend, round=3)
    with pytest.raises(ReflectionScheduleError):
        MemoryStore(variant=MemoryVariant(kind="reflection", interval=2)).reflect(backend, round=3)


def test_failed_reflection_leaves_store_untouched() -> None:
    backend = ScriptedBackend([ScriptedRule(kinds=["reflection"], fail=True), ScriptedRule(response="x")])
    store = MemoryStore(variant=MemoryVariant(kind="reflection", interval=1)).record(_heard(0, "first"))
    before = store.dump_lines()
    with pytest.raises(TransportError):
        store.reflect(backend, round=1)
    assert store.dump_lines() == before


def test_replay_rebuilds_identical_context() -> None:
    backend = ScriptedBackend([ScriptedRule(response="I mostly listened.")])
    variant = MemoryVariant(kind="reflection", interval=1)
    store = MemoryStore(variant=variant).record(_heard(0, "first"))
    store.reflect(backend, round=1)
    store.set_impression("agent-002", "Cy is funny.", name="Cy", round=1)
    store.record(_heard(1, "after"))
    replayed = MemoryStore.replay(variant, [e.model_copy(update={"superseded": False}) for e in store.events])
    assert replayed.render_context() == store.render_context()
    assert replayed.impressions == store.impressions


def test_last_heard_ignores_own_speech() -> None:
    store = MemoryStore().record(_heard(0, "from Ava"))
    store.record(MemoryEvent(round=0, kind="said", description="You said to everyone: mine", content="mine"))
    assert store.last_heard().content == "from Ava"
