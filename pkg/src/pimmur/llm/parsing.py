"""Final-answer extraction for forced-choice probes and judges."""
from __future__ import annotations

from typing import Sequence

from ..core.errors import UnparseableAnswer

FINAL_PREFIX = "final answer:"
_DECORATION = " \t*_`\"'"


def _normalize(line: str) -> str:
    text = line.strip().strip(_DECORATION).strip()
    text = text.rstrip(".").strip(_DECORATION).strip()
    return text.casefold()


def extract_final_answer(response: str, choices: Sequence[str]) -> str:
    """Scan lines from the end and return the first admissible answer.

    A line qualifies when, after trimming and case-folding, it equals a choice
    or reads ``final answer: <choice>``. The canonical spelling from ``choices``
    is returned.
    """

    if not choices:
        raise ValueError("choices must be nonempty")
    lookup = {_normalize(c): c for c in choices}
    for line in reversed(response.splitlines()):
        text = _normalize(line)
        if not text:
            continue
        if text in lookup:
            return lookup[text]
        if text.startswith(FINAL_PREFIX):
            rest = _normalize(text[len(FINAL_PREFIX):])
            if rest in lookup:
                return lookup[rest]
    raise UnparseableAnswer(response, list(choices))


def choice_instruction(choices: Sequence[str]) -> str:
    return "Please answer with exactly one of: " + ", ".join(choices) + ". Put only the answer on the last line."
