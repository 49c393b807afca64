"""Run-directory layout: resolved config, transcript, snapshots, result, memories."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

from pydantic import BaseModel

from ..core.errors import RunDirectoryExists
from ..core.types import canonical_json

logger = logging.getLogger(__name__)

CONFIG_FILE = "config.resolved"
TRANSCRIPT_FILE = "transcript.jsonl"
SNAPSHOTS_FILE = "snapshots.jsonl"
RESULT_FILE = "result.json"
MANIFEST_FILE = "manifest.json"
TRACE_FILE = "trace.jsonl"
TRACE_SUMMARY_FILE = "trace_summary.json"
MEMORIES_DIR = "memories"


def _write_lines(path: Path, lines: Iterable[str]) -> None:
    body = "".join(f"{line}\n" for line in lines)
    path.write_text(body, encoding="utf-8")


def dump_json(payload: Any) -> str:
    """Stable pretty JSON for files people read."""

    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


class RunDirectory:
    """One directory per run; files are written whole and never appended to."""

    def __init__(self, root: Path | str) -> None:
        self.root = Path(root)

    def path(self, name: str) -> Path:
        return self.root / name

    def prepare(self, force: bool = False) -> "RunDirectory":
        if self.root.exists() and any(self.root.iterdir()) and not force:
            raise RunDirectoryExists(f"{self.root} is not empty; pass --force to reuse it")
        self.root.mkdir(parents=True, exist_ok=True)
        return self

    def write_config(self, config: BaseModel) -> None:
        self.path(CONFIG_FILE).write_text(dump_json(config.model_dump(mode="json")), encoding="utf-8")

    def write_transcript(self, message_lines: Sequence[str], snapshot_lines: Sequence[str]) -> None:
        _write_lines(self.path(TRANSCRIPT_FILE), message_lines)
        _write_lines(self.path(SNAPSHOTS_FILE), snapshot_lines)

    def write_memories(self, episodes: Sequence[Dict[str, List[str]]]) -> None:
        """One JSONL per agent; runs with several episodes get a folder per episode."""

        base = self.path(MEMORIES_DIR)
        for index, memories in enumerate(episodes):
            folder = base if len(episodes) == 1 else base / f"episode-{index:03d}"
            folder.mkdir(parents=True, exist_ok=True)
            for agent_id, lines in memories.items():
                _write_lines(folder / f"{agent_id}.jsonl", lines)

    def write_result(self, result: BaseModel) -> None:
        self.path(RESULT_FILE).write_text(dump_json(result.model_dump(mode="json")), encoding="utf-8")
        logger.info("run written to %s", self.root)

    def write_json(self, name: str, payload: Any) -> None:
        self.path(name).write_text(dump_json(payload), encoding="utf-8")

    def write_jsonl(self, name: str, rows: Iterable[Any]) -> None:
        _write_lines(self.path(name), (canonical_json(row) for row in rows))

    def read_json(self, name: str) -> Any:
        return json.loads(self.path(name).read_text(encoding="utf-8"))

    def read_jsonl(self, name: str) -> List[Any]:
        text = self.path(name).read_text(encoding="utf-8")
        return [json.loads(line) for line in text.splitlines() if line.strip()]

    def has(self, name: str) -> bool:
        return self.path(name).is_file()
