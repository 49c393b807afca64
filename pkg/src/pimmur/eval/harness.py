"""Corpus x model audit fan-out and violation-rate aggregation."""
from __future__ import annotations

import asyncio
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Awaitable, Dict, List, Optional, Sequence

from pydantic import BaseModel

from ..llm.base import ChatBackend
from .checks import CHECKS, AuditVerdict, CheckKind, CorpusEntry, acheck_min_control, acheck_unawareness

logger = logging.getLogger(__name__)

VIOLATION, OK, ERRORED = "violation", "ok", "errored"


class ModelRate(BaseModel):
    model: str
    check: CheckKind
    violations: int
    counted: int
    errored: int
    rate: Optional[float]


class Agreement(BaseModel):
    model: str
    check: CheckKind
    agreed: int
    labelled: int
    rate: Optional[float]


class AuditMatrix(BaseModel):
    models: List[str] = []
    entries: List[str] = []
    rates: List[ModelRate] = []
    # check -> entry -> share of non-errored models flagging a violation
    entry_average: Dict[str, Dict[str, Optional[float]]] = {}
    # check -> model -> entry -> violation | ok | errored
    cells: Dict[str, Dict[str, Dict[str, str]]] = {}
    agreement: List[Agreement] = []

    def rate(self, model: str, check: CheckKind) -> Optional[float]:
        for item in self.rates:
            if item.model == model and item.check == check:
                return item.rate
        return None


def _cell(verdict: AuditVerdict) -> str:
    if verdict.errored:
        return ERRORED
    return VIOLATION if verdict.matched else OK


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def aggregate_matrix(verdicts: Sequence[AuditVerdict], corpus: Sequence[CorpusEntry] = ()) -> AuditMatrix:
    """Violation rates over non-errored verdicts; errored cells stay visible."""

    models = list(dict.fromkeys(v.model for v in verdicts))
    entries = list(dict.fromkeys(v.entry_id for v in verdicts))
    checks = [c for c in CHECKS if any(v.check == c for v in verdicts)]
    references = {e.id: e.reference for e in corpus}

    matrix = AuditMatrix(models=models, entries=entries)
    for check in checks:
        scoped = [v for v in verdicts if v.check == check]
        matrix.cells[check] = {m: {} for m in models}
        for v in scoped:
            matrix.cells[check][v.model][v.entry_id] = _cell(v)
        for model in models:
            mine = [v for v in scoped if v.model == model]
            if not mine:
                continue
            counted = [v for v in mine if not v.errored]
            flagged = sum(1 for v in counted if v.matched)
            matrix.rates.append(
                ModelRate(
                    model=model,
                    check=check,
                    violations=flagged,
                    counted=len(counted),
                    errored=len(mine) - len(counted),
                    rate=_ratio(flagged, len(counted)),
                )
            )
            labelled = [v for v in counted if check in references.get(v.entry_id, {})]
            if labelled:
                agreed = sum(1 for v in labelled if v.matched == references[v.entry_id][check])
                matrix.agreement.append(
                    Agreement(model=model, check=check, agreed=agreed, labelled=len(labelled), rate=agreed / len(labelled))
                )
        averages: Dict[str, Optional[float]] = {}
        for entry in entries:
            counted = [v for v in scoped if v.entry_id == entry and not v.errored]
            averages[entry] = _ratio(sum(1 for v in counted if v.matched), len(counted))
        matrix.entry_average[check] = averages
    return matrix


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.4f}"


def write_matrix_csv(matrix: AuditMatrix, path: Path | str) -> None:
    """Rows are models, columns entries; one block per check plus an Avg row."""

    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["check", "model", *matrix.entries, "rate"])
        for check, rows in matrix.cells.items():
            for model in matrix.models:
                if not rows.get(model):
                    continue
                cells = [rows[model].get(entry, "") for entry in matrix.entries]
                writer.writerow([check, model, *cells, _fmt(matrix.rate(model, check))])  # type: ignore[arg-type]
            averages = matrix.entry_average.get(check, {})
            writer.writerow([check, "Avg", *(_fmt(averages.get(e)) for e in matrix.entries), ""])


@dataclass
class AuditHarness:
    """Runs every requested check for every (entry, model) pair.

    For Unawareness each model is the subject and ``judge`` scores its
    inference; for Minimal-Control each model is the judge.
    """

    models: Sequence[ChatBackend]
    judge: ChatBackend
    checks: Sequence[CheckKind] = CHECKS
    concurrency: int = 8
    verdicts: List[AuditVerdict] = field(default_factory=list)

    async def _bounded(self, gate: asyncio.Semaphore, job: Awaitable[AuditVerdict]) -> AuditVerdict:
        async with gate:
            return await job

    async def arun(self, corpus: Sequence[CorpusEntry]) -> List[AuditVerdict]:
        gate = asyncio.Semaphore(max(1, self.concurrency))
        jobs: List[Awaitable[AuditVerdict]] = []
        for entry in corpus:
            for model in self.models:
                for check in self.checks:
                    if check == "unawareness":
                        job = acheck_unawareness(entry, model, self.judge)
                    else:
                        job = acheck_min_control(entry, model)
                    jobs.append(self._bounded(gate, job))
        # gather keeps submission order, so output order is stable
        self.verdicts = list(await asyncio.gather(*jobs))
        errored = sum(1 for v in self.verdicts if v.errored)
        logger.info("audit finished: %d verdicts, %d errored", len(self.verdicts), errored)
        return self.verdicts

    def run(self, corpus: Sequence[CorpusEntry]) -> List[AuditVerdict]:
        return asyncio.run(self.arun(corpus))
