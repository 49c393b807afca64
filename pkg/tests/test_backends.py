import asyncio
import json
from pathlib import Path
from typing import List

import httpx
import pytest

from pimmur.core.config import BackendDescriptor, EmbedderDescriptor
from pimmur.core.errors import (
    AuthRejected,
    EmptyText,
    MalformedResponse,
    MissingBackend,
    RateLimited,
    ScriptError,
    TransportError,
)
from pimmur.infra.config import Settings
from pimmur.llm import DeterministicOracle, HttpChatBackend, HttpEmbedder, ScriptedBackend, ScriptedRule
from pimmur.llm.base import ChatRequest, ChatTurn
from pimmur.llm.embeddings import tokenize
from pimmur.llm.router import backend_from_model, build_backend, build_embedder
from pimmur.llm.scripts import BUILTIN_SCRIPTS, load_script
from pimmur.eval.metrics import cosine_similarity


def _request(text: str = "hello", kind: str = "group_turn", **slots: str) -> ChatRequest:
    return ChatRequest(system_prompt="sys", turns=[ChatTurn(role="system", content=text)], kind=kind, slots=slots)


def _ok(content: str = "hi there") -> httpx.Response:
    return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})


def _backend(handler, **kwargs) -> HttpChatBackend:
    transport = httpx.MockTransport(handler)
    return HttpChatBackend(
        model="test-model",
        api_key="secret",
        base_url="http://llm.test/v1/",
        backoff=0,
        transport=transport,
        async_transport=transport,
        **kwargs,
    )


def test_http_backend_posts_chat_completions() -> None:
    seen: List[httpx.Request] = []

    def handler(request: httpx.Request) -> httpx.Response:
        seen.append(request)
        return _ok()

    assert _backend(handler).chat(_request()) == "hi there"
    body = json.loads(seen[0].content)
    assert str(seen[0].url) == "http://llm.test/v1/chat/completions"
    assert seen[0].headers["Authorization"] == "Bearer secret"
    assert body["model"] == "test-model"
    assert body["messages"] == [{"role": "system", "content": "sys"}, {"role": "user", "content": "hello"}]


def test_http_backend_retries_server_errors() -> None:
    calls = {"n": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        calls["n"] += 1
        return httpx.Response(503, text="busy") if calls["n"] < 3 else _ok("finally")

    assert _backend(handler).chat(_request()) == "finally"
    assert calls["n"] == 3


def test_http_backend_gives_up_after_retry_budget() -> None:
    calls = {"n": 0}

    def handler(request: httpx.Request) -> httpx.Response:
        calls["n"] += 1
        return httpx.Response(429, text="slow down")

    with pytest.raises(RateLimited):
        _backend(handler, max_retries=3).chat(_request())
    assert calls["n"] == 4


def test_http_backend_fails_fast_on_auth_and_bad_bodies() -> None:
    with pytest.raises(AuthRejected):
        _backend(lambda r: httpx.Response(401, text="no")).chat(_request())
    with pytest.raises(MalformedResponse):
        _backend(lambda r: httpx.Response(200, json={"choices": []})).chat(_request())
    with pytest.raises(MalformedResponse):
        _backend(lambda r: httpx.Response(200, text="not json")).chat(_request())


def test_http_backend_transport_errors() -> None:
    def handler(request: httpx.Request) -> httpx.Response:
        raise httpx.ConnectError("refused", request=request)

    with pytest.raises(TransportError):
        _backend(handler, max_retries=1).chat(_request())


def test_http_backend_async_path() -> None:
    assert asyncio.run(_backend(lambda r: _ok("async hi")).achat(_request())) == "async hi"


def test_scripted_first_match_and_slots() -> None:
    backend = ScriptedBackend(
        [
            ScriptedRule(pattern="(?i)weather", response="Sunny, {name}."),
            ScriptedRule(kinds=["query"], response="Yes"),
            ScriptedRule(response="{last_turn}"),
        ]
    )
    assert backend.chat(_request("How is the weather?", name="Ava")) == "Sunny, Ava."
    assert backend.chat(_request("Anything?", kind="query")) == "Yes"
    assert backend.chat(_request("echo me")) == "echo me"


def test_scripted_when_and_sender_filters() -> None:
    backend = ScriptedBackend(
        [
            ScriptedRule(when={"role": "fixed"}, response="{stance}"),
            ScriptedRule(senders=["agent-001"], response="I am one."),
            ScriptedRule(response="other"),
        ]
    )
    assert backend.chat(_request(role="fixed", stance="B")) == "B"
    assert backend.chat(_request(sender="agent-001")) == "I am one."
    assert backend.chat(_request(role="subject", sender="agent-002")) == "other"


def test_scripted_choices_are_seeded() -> None:
    rules = [ScriptedRule(choices=["a", "b", "c", "d"])]
    answers = [ScriptedBackend(rules, seed=5).chat(_request(f"turn {i}")) for i in range(12)]
    assert answers == [ScriptedBackend(rules, seed=5).chat(_request(f"turn {i}")) for i in range(12)]
    assert len(set(answers)) > 1


def test_scripted_failures() -> None:
    with pytest.raises(ScriptError):
        ScriptedBackend([ScriptedRule(kinds=["query"], response="x")])
    backend = ScriptedBackend([ScriptedRule(kinds=["group_turn"], fail=True), ScriptedRule(response="x")])
    with pytest.raises(TransportError):
        backend.chat(_request())
    with pytest.raises(ValueError):
        ScriptedRule(pattern="x")


def test_every_builtin_script_has_a_catch_all() -> None:
    for name in BUILTIN_SCRIPTS:
        ScriptedBackend(load_script(name), name=name)


def test_yaml_scripts(tmp_path: Path) -> None:
    path = tmp_path / "script.yaml"
    path.write_text("rules:\n  - pattern: hello\n    response: hi\n  - response: '{last_turn}'\n")
    backend = ScriptedBackend(load_script(str(path)))
    assert backend.chat(_request("hello")) == "hi"
    with pytest.raises(MissingBackend):
        load_script("no-such-script")


def test_router_builds_backends_and_embedders() -> None:
    settings = Settings()
    scripted = build_backend(BackendDescriptor(kind="scripted", script_id="echo"), settings)
    assert scripted.name == "scripted:echo"
    assert backend_from_model("scripted:copy", settings).name == "scripted:copy"
    assert isinstance(backend_from_model("some/remote-model", settings), HttpChatBackend)
    assert isinstance(build_embedder(EmbedderDescriptor(), settings), DeterministicOracle)
    assert isinstance(build_embedder(EmbedderDescriptor(kind="http", model="emb"), settings), HttpEmbedder)


def test_oracle_embeddings() -> None:
    oracle = DeterministicOracle(dimension=64)
    a = oracle.embed("The lighthouse reopens on Saturday")
    assert a.dimension == 64
    assert cosine_similarity(a, oracle.embed("the LIGHTHOUSE reopens on saturday!")) == pytest.approx(1.0)
    assert cosine_similarity(a, oracle.embed("bananas are yellow")) < 0.5
    with pytest.raises(EmptyText):
        oracle.embed("  ...  ")


def test_oracle_keeps_non_ascii_words() -> None:
    assert tokenize("Café olé!") == ["café", "olé"]
    assert tokenize("Zoë_and_Ünal") == ["zoë", "and", "ünal"]
    assert tokenize("日本語のメッセージ") == ["日本語のメッセージ"]
    oracle = DeterministicOracle(dimension=64)
    message = oracle.embed("日本語のメッセージ")
    assert cosine_similarity(message, oracle.embed("日本語のメッセージ。")) == pytest.approx(1.0)


def test_http_embedder_tracks_dimension() -> None:
    sizes = iter([3, 3, 4])

    def handler(request: httpx.Request) -> httpx.Response:
        return httpx.Response(200, json={"data": [{"embedding": [0.1] * next(sizes)}]})

    embedder = HttpEmbedder(model="emb", api_key=None, base_url="http://emb.test", backoff=0, transport=httpx.MockTransport(handler))
    assert embedder.embed("one").dimension == 3
    assert embedder.embed("two").dimension == 3
    with pytest.raises(MalformedResponse):
        embedder.embed("three")
