from importlib import resources
from pathlib import Path

import httpx
import pytest

from pimmur.core.errors import MalformedCorpus
from pimmur.eval import AuditHarness, AuditVerdict, CorpusEntry, aggregate_matrix, check_min_control, check_unawareness, load_corpus
from pimmur.eval.harness import write_matrix_csv
from pimmur.eval.judge_models import KeywordJudge, resolve_models
from pimmur.infra.config import Settings
from pimmur.llm import HttpChatBackend, ScriptedBackend, ScriptedRule


@pytest.fixture
def sample_corpus():
    with resources.as_file(resources.files("pimmur.eval") / "data" / "sample_corpus.jsonl") as path:
        return load_corpus(path)


def _stub(response: str, name: str) -> ScriptedBackend:
    return ScriptedBackend([ScriptedRule(response=response)], name=name)


ENTRY = CorpusEntry(id="e1", instructions="Talk about your town.", goal="herd effect")


def test_sample_matrix(sample_corpus) -> None:
    models = resolve_models(["scripted:audit-unaware", "keyword"], Settings())
    harness = AuditHarness(models=models, judge=KeywordJudge(), concurrency=3)
    verdicts = harness.run(sample_corpus)
    assert len(verdicts) == 6 * 2 * 2
    assert [v.entry_id for v in verdicts[:4]] == ["rumor-steered"] * 4

    matrix = aggregate_matrix(verdicts, sample_corpus)
    assert matrix.models == ["scripted:audit-unaware", "keyword"]
    ids = [e.id for e in sample_corpus]
    assert [matrix.cells["unawareness"]["keyword"][i] for i in ids] == ["violation"] * 4 + ["ok", "violation"]
    assert [matrix.cells["min_control"]["keyword"][i] for i in ids] == ["violation", "violation", "ok", "violation", "ok", "ok"]
    assert set(matrix.cells["unawareness"]["scripted:audit-unaware"].values()) == {"ok"}
    assert matrix.rate("keyword", "unawareness") == pytest.approx(5 / 6)
    assert matrix.rate("keyword", "min_control") == 0.5
    assert matrix.rate("scripted:audit-unaware", "min_control") == 0.0
    assert matrix.entry_average["unawareness"]["rumor-steered"] == 0.5

    agreement = {(a.model, a.check): (a.agreed, a.labelled) for a in matrix.agreement}
    assert agreement[("keyword", "min_control")] == (6, 6)
    assert agreement[("keyword", "unawareness")] == (5, 6)


def test_harness_is_deterministic(sample_corpus) -> None:
    def run():
        models = resolve_models(["scripted:audit-unaware", "keyword"], Settings())
        return [v.model_dump() for v in AuditHarness(models=models, judge=KeywordJudge()).run(sample_corpus)]

    assert run() == run()


def _verdict(entry: str, model: str, matched: bool | None, errored: bool = False) -> AuditVerdict:
    return AuditVerdict(entry_id=entry, model=model, check="min_control", matched=matched, errored=errored)


def test_aggregate_counts_only_answered_cells() -> None:
    verdicts = [_verdict("a", "m", True), _verdict("b", "m", False), _verdict("c", "m", True), _verdict("d", "m", False)]
    assert aggregate_matrix(verdicts).rate("m", "min_control") == 0.5

    broken = [_verdict("a", "m", None, errored=True), _verdict("b", "m", None, errored=True)]
    matrix = aggregate_matrix(broken)
    assert matrix.rate("m", "min_control") is None
    assert matrix.rates[0].errored == 2 and matrix.rates[0].counted == 0
    assert matrix.cells["min_control"]["m"] == {"a": "errored", "b": "errored"}

    empty = aggregate_matrix([])
    assert empty.models == [] and empty.rates == [] and empty.cells == {}


def test_entry_average_across_models() -> None:
    verdicts = [_verdict("a", f"m{i}", i == 0) for i in range(5)]
    assert aggregate_matrix(verdicts).entry_average["min_control"]["a"] == pytest.approx(0.2)


def test_unaware_subject_is_not_a_violation() -> None:
    verdict = check_unawareness(ENTRY, _stub("I cannot tell", "subject"), KeywordJudge())
    assert verdict.inferred_goal == "I cannot tell"
    assert verdict.matched is False and verdict.violation is False


def test_judge_reading_yes_is_not_a_violation() -> None:
    verdict = check_min_control(ENTRY, _stub("Analysis: fine.\nFinal Answer:\nYes", "judge"))
    assert verdict.model == "judge"
    assert verdict.violation is False
    flagged = check_min_control(ENTRY, _stub("Analysis: leading.\nFinal Answer:\nNo", "judge"))
    assert flagged.violation is True


def test_unparseable_judge_errors_the_cell() -> None:
    verdict = check_min_control(ENTRY, _stub("Hard to say.", "judge"))
    assert verdict.errored and verdict.violation is None


def test_unreachable_model_gives_errored_cells(sample_corpus) -> None:
    def handler(request: httpx.Request) -> httpx.Response:
        raise httpx.ConnectError("connection refused", request=request)

    transport = httpx.MockTransport(handler)
    down = HttpChatBackend(
        model="remote-model",
        api_key=None,
        base_url="http://llm.test/v1",
        max_retries=0,
        backoff=0,
        transport=transport,
        async_transport=transport,
    )
    verdicts = AuditHarness(models=[down, KeywordJudge()], judge=KeywordJudge()).run(sample_corpus[:2])
    matrix = aggregate_matrix(verdicts)
    assert set(matrix.cells["unawareness"]["remote-model"].values()) == {"errored"}
    assert set(matrix.cells["min_control"]["remote-model"].values()) == {"errored"}
    assert matrix.rate("remote-model", "min_control") is None
    assert matrix.rate("keyword", "min_control") == 1.0


def test_matrix_csv(sample_corpus, tmp_path: Path) -> None:
    verdicts = AuditHarness(models=[KeywordJudge()], judge=KeywordJudge(), checks=("min_control",)).run(sample_corpus)
    path = tmp_path / "matrix.csv"
    write_matrix_csv(aggregate_matrix(verdicts), path)
    lines = path.read_text().splitlines()
    assert lines[0].split(",")[:2] == ["check", "model"]
    assert lines[1].startswith("min_control,keyword,violation,violation,ok")
    assert lines[1].endswith(",0.5000")
    assert lines[2].startswith("min_control,Avg,1.0000")


@pytest.mark.parametrize(
    "body",
    [
        "",
        "not json\n",
        '{"id": "a", "instructions": "x"}\n',
        '{"id": "a", "instructions": "x", "goal": "g"}\n{"id": "a", "instructions": "y", "goal": "g"}\n',
    ],
)
def test_load_corpus_rejects_bad_files(tmp_path: Path, body: str) -> None:
    path = tmp_path / "corpus.jsonl"
    path.write_text(body)
    with pytest.raises(MalformedCorpus):
        load_corpus(path)


def test_load_corpus_missing_file(tmp_path: Path) -> None:
    with pytest.raises(MalformedCorpus):
        load_corpus(tmp_path / "absent.jsonl")
