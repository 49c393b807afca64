"""Metrics, report bundles, and the instruction audit toolkit."""
from .checks import AuditVerdict, CorpusEntry, check_min_control, check_unawareness, load_corpus
from .harness import AuditHarness, AuditMatrix, aggregate_matrix

__all__ = [
    "AuditHarness",
    "AuditMatrix",
    "AuditVerdict",
    "CorpusEntry",
    "aggregate_matrix",
    "check_min_control",
    "check_unawareness",
    "load_corpus",
]
