"""Plot-ready CSV bundles rebuilt from a run directory's recorded snapshots.

Everything here reads only ``config.resolved`` and ``snapshots.jsonl``, so a
report can be regenerated at any time and comes out byte-identical.
"""
from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from ..core.errors import MissingArtifact, TooFewPoints
from ..infra.store import CONFIG_FILE, SNAPSHOTS_FILE, TRANSCRIPT_FILE, RunDirectory
from .metrics import ccdf, fit_loglog, fitted_p, flip_table, mean

logger = logging.getLogger(__name__)

REPORT_DIR = "report"

Row = Sequence[Any]


def _num(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def _write_csv(path: Path, header: Row, rows: Sequence[Row]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _of_kind(snapshots: List[Dict[str, Any]], kind: str) -> List[Dict[str, Any]]:
    return [s for s in snapshots if s.get("kind") == kind]


def _fake_news(out: Path, config: Dict[str, Any], snapshots: List[Dict[str, Any]]) -> List[str]:
    rows = []
    for snap in _of_kind(snapshots, "sir"):
        total = snap["skeptical"] + snap["infected"] + snap["recovered"]
        rows.append([snap["round"], snap["skeptical"], snap["infected"], snap["recovered"], _num(snap["infected"] / total)])
    _write_csv(out / "sir_series.csv", ["round", "skeptical", "infected", "recovered", "infected_share"], rows)
    terminal = rows[-1][4] if rows else ""
    return [f"claim: {config.get('fake_news', {}).get('claim_id')}", f"rounds: {len(rows)}", f"terminal infected share: {terminal}"]


def _social_balance(out: Path, config: Dict[str, Any], snapshots: List[Dict[str, Any]]) -> List[str]:
    triads = _of_kind(snapshots, "triad")
    rows = [[t["triad_id"], int(t["balanced"]), t["initial"].count(1), t["final"].count(1)] for t in triads]
    _write_csv(out / "balance.csv", ["triad_id", "balanced", "initial_friends", "final_friends"], rows)
    fraction = mean([float(t["balanced"]) for t in triads])
    return [f"triads: {len(triads)}", f"balanced fraction: {_num(fraction)}"]


def _telephone(out: Path, config: Dict[str, Any], snapshots: List[Dict[str, Any]]) -> List[str]:
    hops = _of_kind(snapshots, "hop")
    _write_csv(out / "telephone.csv", ["hop", "similarity"], [[h["hop"], _num(h["similarity"])] for h in hops])
    values = [h["similarity"] for h in hops]
    return [
        f"hops: {len(hops)}",
        f"mean similarity: {_num(mean(values))}",
        f"terminal similarity: {_num(values[-1] if values else None)}",
    ]


class _Trial:
    def __init__(self, snap: Dict[str, Any]) -> None:
        self.confidence = snap["confidence"]
        self.initial_answer = snap["initial_answer"]
        self.final_answer = snap["final_answer"]


def _herd(out: Path, config: Dict[str, Any], snapshots: List[Dict[str, Any]]) -> List[str]:
    trials = _of_kind(snapshots, "herd")
    counted = [_Trial(t) for t in trials if not t.get("excluded")]
    table = flip_table(counted)  # type: ignore[arg-type]
    rows = [[level, b.flips, b.total, _num(b.rate)] for level, b in table.items()]
    _write_csv(out / "herd.csv", ["confidence", "flips", "total", "rate"], rows)
    flips = sum(b.flips for b in table.values())
    overall = flips / len(counted) if counted else None
    return [f"trials: {len(trials)}", f"counted: {len(counted)}", f"overall flip rate: {_num(overall)}"]


def _network_growth(out: Path, config: Dict[str, Any], snapshots: List[Dict[str, Any]]) -> List[str]:
    steps = _of_kind(snapshots, "growth")
    if not steps:
        _write_csv(out / "ccdf.csv", ["k", "p", "fitted_p"], [])
        return ["steps: 0"]
    degrees = steps[-1]["degrees_after"]
    points = ccdf(list(degrees.values()))
    k_min = config.get("network_growth", {}).get("fit_k_min", 1)
    fit = None
    try:
        fit = fit_loglog(points, k_min=k_min)
    except TooFewPoints as exc:
        logger.warning("no degree fit: %s", exc)
    rows = [[p.k, _num(p.p), _num(fitted_p(fit, p.k) if fit else None)] for p in points]
    _write_csv(out / "ccdf.csv", ["k", "p", "fitted_p"], rows)
    fit_lines = ["slope: n/a", "intercept: n/a", "r2: n/a", "n_points: 0"]
    if fit:
        fit_lines = [f"slope: {_num(fit.slope)}", f"intercept: {_num(fit.intercept)}", f"r2: {_num(fit.r2)}", f"n_points: {fit.n_points}"]
    (out / "fit.txt").write_text("\n".join(fit_lines) + "\n", encoding="utf-8")
    n_edges = sum(degrees.values()) // 2
    return [f"steps: {len(steps)}", f"nodes: {len(degrees)}", f"edges: {n_edges}", *fit_lines]


BUILDERS: Dict[str, Callable[[Path, Dict[str, Any], List[Dict[str, Any]]], List[str]]] = {
    "fake_news": _fake_news,
    "social_balance": _social_balance,
    "telephone": _telephone,
    "herd": _herd,
    "network_growth": _network_growth,
}


def build_report(run_dir: Path | str) -> Path:
    """Write ``report/`` inside ``run_dir`` and return its path."""

    store = RunDirectory(run_dir)
    for name in (TRANSCRIPT_FILE, SNAPSHOTS_FILE, CONFIG_FILE):
        if not store.has(name):
            raise MissingArtifact(f"{store.root} has no {name}")
    config = store.read_json(CONFIG_FILE)
    snapshots = store.read_jsonl(SNAPSHOTS_FILE)
    experiment = config.get("experiment")
    if experiment not in BUILDERS:
        raise MissingArtifact(f"{CONFIG_FILE} names unknown experiment {experiment!r}")

    out = store.path(REPORT_DIR)
    out.mkdir(exist_ok=True)
    lines = [f"experiment: {experiment}", f"seed: {config.get('seed')}", f"n_agents: {config.get('n_agents')}"]
    lines += BUILDERS[experiment](out, config, snapshots)
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("report written to %s", out)
    return out
