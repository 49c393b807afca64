"""Run one experiment end to end and persist its artifacts."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple

from pydantic import TypeAdapter

from ..experiments import ExperimentResult, RunContext, registry
from ..infra.config import Settings, load_settings
from ..infra.store import RESULT_FILE, RunDirectory
from ..infra.tracing import traced_span
from ..llm.base import ChatBackend, Embedder
from ..llm.router import build_backend, build_embedder
from .config import SimConfig, validate_config
from .types import Transcript

logger = logging.getLogger(__name__)


def run_simulation(
    config: SimConfig | Mapping[str, Any],
    run_dir: Optional[Path | str] = None,
    *,
    backend: Optional[ChatBackend] = None,
    embedder: Optional[Embedder] = None,
    settings: Optional[Settings] = None,
    force: bool = False,
) -> Tuple[Transcript, ExperimentResult]:
    """Validate, dispatch to the experiment harness, and write the run directory.

    The transcript and memories are written even when the harness fails, so a
    half-finished run can still be inspected.
    """

    cfg = config if isinstance(config, SimConfig) else validate_config(config)
    settings = settings or load_settings()
    backend = backend or build_backend(cfg.backend, settings, seed=cfg.seed)
    embedder = embedder or build_embedder(cfg.embedder, settings)
    harness = registry.get(cfg.experiment)

    store = RunDirectory(run_dir).prepare(force) if run_dir is not None else None
    if store:
        store.write_config(cfg)

    ctx = RunContext.create(cfg, backend, embedder)
    try:
        with traced_span("simulation.run", experiment=cfg.experiment, seed=cfg.seed):
            result = harness(ctx)
    finally:
        if store:
            store.write_transcript(ctx.transcript.message_lines(), ctx.transcript.snapshot_lines())
            store.write_memories([{aid: m.dump_lines() for aid, m in s.memories.items()} for s in ctx.states])
    if store:
        store.write_result(result)
    logger.info("%s finished: %d messages, %d snapshots", cfg.experiment, len(ctx.transcript.messages), len(ctx.transcript.snapshots))
    return ctx.transcript, result


_RESULTS: TypeAdapter[ExperimentResult] = TypeAdapter(ExperimentResult)


def load_result(run_dir: Path | str) -> ExperimentResult:
    """Parse ``result.json`` back into the model of the experiment that wrote it."""

    return _RESULTS.validate_python(RunDirectory(run_dir).read_json(RESULT_FILE))
