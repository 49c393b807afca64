"""Numerical post-processing: similarity, SIR counts, flip tables, CCDF fits."""
from __future__ import annotations

from collections import Counter
from typing import Dict, Iterable, List, Mapping, Optional, Protocol, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import AllZero, DimensionMismatch, TooFewPoints, ZeroVector
from ..llm.base import EmbeddingVector

CONFIDENCE_LEVELS = (1, 2, 3, 4, 5)
SIR_STATES = ("skeptical", "infected", "recovered")


class CcdfPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    p: float = Field(gt=0.0, le=1.0)


class FitResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    slope: float
    intercept: float
    r2: float = Field(ge=0.0, le=1.0)
    n_points: int = 0


class FlipBucket(BaseModel):
    flips: int = 0
    total: int = 0
    rate: Optional[float] = None


class SirCounts(BaseModel):
    round: int
    skeptical: int
    infected: int
    recovered: int

    @property
    def total(self) -> int:
        return self.skeptical + self.infected + self.recovered


class FlipObservation(Protocol):
    confidence: int
    initial_answer: str
    final_answer: str


def _values(vector: EmbeddingVector | Sequence[float]) -> np.ndarray:
    values = vector.values if isinstance(vector, EmbeddingVector) else vector
    return np.asarray(values, dtype=np.float64)


def cosine_similarity(u: EmbeddingVector | Sequence[float], v: EmbeddingVector | Sequence[float]) -> float:
    a, b = _values(u), _values(v)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimensions differ: {a.shape[0]} vs {b.shape[0]}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def ccdf(degrees: Sequence[int]) -> List[CcdfPoint]:
    """P(degree >= k) for each distinct positive degree.

    Zero degrees get no point but still count toward the denominator.
    """

    if not degrees:
        raise AllZero("no degrees given")
    data = np.asarray(degrees, dtype=np.int64)
    if np.any(data < 0):
        raise ValueError("degrees must be nonnegative")
    ks = np.unique(data[data >= 1])
    if ks.size == 0:
        raise AllZero("every degree is zero")
    n = data.size
    return [CcdfPoint(k=int(k), p=float(np.count_nonzero(data >= k) / n)) for k in ks]


def fit_loglog(points: Sequence[CcdfPoint], k_min: int = 1) -> FitResult:
    """Least-squares line through (log10 k, log10 p); r2 is 1.0 when p is constant."""

    kept = [pt for pt in points if pt.k >= k_min]
    if len({pt.k for pt in kept}) < 2:
        raise TooFewPoints(f"need at least 2 distinct k >= {k_min}, got {len(kept)} points")
    x = np.log10([pt.k for pt in kept])
    y = np.log10([pt.p for pt in kept])
    slope, intercept = np.polyfit(x, y, deg=1)
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return FitResult(slope=float(slope), intercept=float(intercept), r2=float(np.clip(r2, 0.0, 1.0)), n_points=len(kept))


def fitted_p(fit: FitResult, k: int) -> float:
    return float(10 ** (fit.intercept + fit.slope * np.log10(k)))


def flip_table(trials: Iterable[FlipObservation]) -> Dict[int, FlipBucket]:
    table = {level: FlipBucket() for level in CONFIDENCE_LEVELS}
    for trial in trials:
        bucket = table[trial.confidence]
        bucket.total += 1
        bucket.flips += int(trial.final_answer != trial.initial_answer)
    for bucket in table.values():
        bucket.rate = bucket.flips / bucket.total if bucket.total else None
    return table


def sir_counts(round: int, states: Mapping[str, str]) -> SirCounts:
    tally = Counter(states.values())
    unknown = set(tally) - set(SIR_STATES)
    if unknown:
        raise ValueError(f"unknown SIR states {sorted(unknown)}")
    return SirCounts(round=round, **{s: tally.get(s, 0) for s in SIR_STATES})


def mean(values: Sequence[float]) -> Optional[float]:
    return float(np.mean(values)) if len(values) else None
