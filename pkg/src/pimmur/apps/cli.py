"""Typer CLI: run simulations, audit instruction corpora, export reports."""
from __future__ import annotations

import logging
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import List, Literal, Optional

import typer
from pydantic import BaseModel

from ..core.config import apply_overrides, load_config_file, validate_config
from ..core.errors import (
    BackendError,
    ConfigError,
    MalformedCorpus,
    MissingArtifact,
    PimmurError,
    RoundAborted,
    RunDirectoryExists,
)
from ..core.orchestration import run_simulation
from ..core.types import sha256_hex
from ..eval.checks import CHECKS, load_corpus
from ..eval.harness import AuditHarness, aggregate_matrix, write_matrix_csv
from ..eval.judge_models import resolve_model, resolve_models
from ..eval.report import build_report
from ..infra.config import load_settings
from ..infra.logging import configure_logging
from ..infra.store import MANIFEST_FILE, TRACE_FILE, TRACE_SUMMARY_FILE, RunDirectory
from ..infra.tracing import get_tracer

logger = logging.getLogger(__name__)

app = typer.Typer(help="PIMMUR-style social simulations and instruction audits")

EXIT_USAGE = 2
EXIT_BACKEND = 3

SAMPLE_CORPUS = "sample_corpus.jsonl"


class RunManifest(BaseModel):
    run_id: str
    command: Literal["run", "audit", "report"]
    config_path: Optional[str] = None
    output_dir: str


def _run_id(digest_source: str) -> str:
    return f"{datetime.now(timezone.utc):%Y%m%dT%H%M%SZ}-{sha256_hex(digest_source)[:8]}"


def _fail(code: int, exc: BaseException) -> typer.Exit:
    typer.echo(f"error: {exc}", err=True)
    return typer.Exit(code)


def _exit_code(exc: PimmurError) -> int:
    if isinstance(exc, (ConfigError, MalformedCorpus, MissingArtifact, RunDirectoryExists)):
        return EXIT_USAGE
    if isinstance(exc, (BackendError, RoundAborted)):
        return EXIT_BACKEND
    return 1


def _finish(store: RunDirectory, manifest: RunManifest) -> None:
    store.write_json(MANIFEST_FILE, manifest.model_dump(mode="json"))
    store.write_jsonl(TRACE_FILE, (e.model_dump(mode="json") for e in get_tracer().export()))
    store.write_json(TRACE_SUMMARY_FILE, [s.model_dump(mode="json") for s in get_tracer().summary()])


def _split(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


@app.callback()
def main(log_level: Optional[str] = typer.Option(None, "--log-level", help="Overrides PIMMUR_LOG_LEVEL")) -> None:
    configure_logging(log_level or load_settings().log_level)


@app.command()
def run(
    config: Path = typer.Option(..., "--config", "-c", help="YAML or JSON run configuration"),
    overrides: List[str] = typer.Option([], "--set", help="key.path=value, repeatable"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    out: Optional[Path] = typer.Option(None, "--out", help="Run directory; defaults under PIMMUR_RUNS_DIR"),
    force: bool = typer.Option(False, "--force", help="Reuse a non-empty run directory"),
) -> None:
    """Run one experiment and write its run directory."""

    settings = load_settings()
    try:
        raw = apply_overrides(load_config_file(config), [*overrides, *([f"seed={seed}"] if seed is not None else [])])
        cfg = validate_config(raw)
    except ConfigError as exc:
        raise _fail(EXIT_USAGE, exc) from exc

    run_id = _run_id(cfg.config_hash)
    out = out or Path(settings.runs_dir) / f"{cfg.experiment}-{run_id}"
    get_tracer().reset()
    try:
        transcript, _ = run_simulation(cfg, out, settings=settings, force=force)
    except PimmurError as exc:
        if out.exists() and not isinstance(exc, RunDirectoryExists):
            _finish(RunDirectory(out), RunManifest(run_id=run_id, command="run", config_path=str(config), output_dir=str(out)))
        raise _fail(_exit_code(exc), exc) from exc
    _finish(RunDirectory(out), RunManifest(run_id=run_id, command="run", config_path=str(config), output_dir=str(out)))
    typer.echo(f"{out} digest={transcript.digest()}")


@app.command()
def audit(
    corpus: Optional[Path] = typer.Option(None, "--corpus", help="JSONL corpus; defaults to the bundled sample"),
    models: str = typer.Option("scripted:audit-unaware,keyword", "--models", help="Comma-separated model descriptors"),
    checks: str = typer.Option(",".join(CHECKS), "--checks", help="unawareness and/or min_control"),
    judge: str = typer.Option("keyword", "--judge", help="Judge for scoring Unawareness inferences"),
    out: Optional[Path] = typer.Option(None, "--out"),
    force: bool = typer.Option(False, "--force"),
) -> None:
    """Score a corpus of experiment instructions against both checks."""

    settings = load_settings()
    requested = _split(checks)
    names = _split(models)
    try:
        unknown = sorted(set(requested) - set(CHECKS))
        if unknown or not requested:
            raise MalformedCorpus(f"unknown checks {unknown}; choose from {', '.join(CHECKS)}")
        if not names:
            raise MalformedCorpus("at least one model is required")
        if corpus is None:
            with resources.as_file(resources.files("pimmur.eval") / "data" / SAMPLE_CORPUS) as bundled:
                entries = load_corpus(bundled)
        else:
            entries = load_corpus(corpus)
        backends = resolve_models(names, settings)
        judge_backend = resolve_model(judge, settings)
    except PimmurError as exc:
        raise _fail(_exit_code(exc), exc) from exc

    run_id = _run_id("|".join([str(corpus), *names, *requested]))
    out = out or Path(settings.runs_dir) / f"audit-{run_id}"
    try:
        store = RunDirectory(out).prepare(force)
    except RunDirectoryExists as exc:
        raise _fail(EXIT_USAGE, exc) from exc

    get_tracer().reset()
    harness = AuditHarness(
        models=backends,
        judge=judge_backend,
        checks=[c for c in CHECKS if c in requested],
        concurrency=settings.audit_concurrency,
    )
    verdicts = harness.run(entries)
    matrix = aggregate_matrix(verdicts, entries)
    store.write_jsonl("verdicts.jsonl", (v.model_dump(mode="json") for v in verdicts))
    write_matrix_csv(matrix, store.path("matrix.csv"))
    store.write_json("summary.json", matrix.model_dump(mode="json", exclude={"cells"}))
    _finish(store, RunManifest(run_id=run_id, command="audit", config_path=str(corpus) if corpus else None, output_dir=str(out)))
    for rate in matrix.rates:
        shown = "n/a" if rate.rate is None else f"{100 * rate.rate:.1f}%"
        typer.echo(f"{rate.check:<12} {rate.model:<32} {shown} ({rate.violations}/{rate.counted}, errored {rate.errored})")


@app.command()
def report(run_dir: Path = typer.Argument(..., help="A directory written by `pimmur run`")) -> None:
    """Rebuild plot-ready CSVs and a text summary from a run directory."""

    try:
        folder = build_report(run_dir)
    except PimmurError as exc:
        raise _fail(_exit_code(exc), exc) from exc
    typer.echo(str(folder))


if __name__ == "__main__":
    app()
