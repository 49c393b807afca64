"""Built-in scripts for the scripted backend, plus YAML script loading."""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List

import yaml
from pydantic import ValidationError

from ..core.errors import MissingBackend
from .scripted import ScriptedRule

_BELIEF = r"(?i)believe the following claim"
_RELATION = r"(?i)friend or an enemy"
_CONFIDENCE = r"(?i)how confident are you"
_FINAL = r"(?i)after the discussion"
_SELECT = r"(?i)select exactly"


def _rules(*items: Dict) -> List[ScriptedRule]:
    return [ScriptedRule.model_validate(item) for item in items]


# shared tail: answers every kind of request with something plausible
_CHATTER = (
    {"kinds": ["reflection"], "response": "I talked with the others about {topic} and kept my own view."},
    {"kinds": ["impression"], "response": "{target} seems thoughtful."},
    {"kinds": ["life_story"], "response": "I am {name}. I grew up in a small town and now work in the city."},
    {"pattern": _SELECT, "kinds": ["query"], "response": "{first_picks}"},
    {"kinds": ["query"], "choices": ["{choice_0}", "{choice_1}"]},
    {
        "kinds": ["group_turn", "private_turn"],
        "choices": [
            "I am not sure what to make of this yet.",
            "I see it a little differently, but I am listening.",
            "That sounds reasonable to me.",
        ],
    },
    {"response": "{last_turn}"},
)

BUILTIN_SCRIPTS: Dict[str, List[ScriptedRule]] = {
    "echo": _rules({"response": "{last_turn}"}),
    # retells whatever the agent heard most recently, word for word
    "copy": _rules(
        {"kinds": ["private_turn", "group_turn"], "response": "{last_heard}"},
        *_CHATTER,
    ),
    # first relay paraphrases badly, everyone after copies faithfully
    "telephone-drift": _rules(
        {
            "kinds": ["private_turn"],
            "senders": ["agent-001"],
            "response": "Someone said the weather was pleasant and the market sold apples.",
        },
        {"kinds": ["private_turn", "group_turn"], "response": "{last_heard}"},
        *_CHATTER,
    ),
    "default": _rules(*_CHATTER),
    "skeptic": _rules(
        {"pattern": _BELIEF, "kinds": ["query"], "response": "Thinking it over.\nNo"},
        {"kinds": ["private_turn"], "response": "I do not think that is true."},
        *_CHATTER,
    ),
    "believer": _rules(
        {"pattern": _BELIEF, "kinds": ["query"], "response": "Final Answer: Yes"},
        {"kinds": ["private_turn"], "response": "Did you hear? {last_heard}"},
        *_CHATTER,
    ),
    "undecided": _rules(
        {"pattern": _BELIEF, "kinds": ["query"], "response": "perhaps"},
        *_CHATTER,
    ),
    "friendly": _rules(
        {"pattern": _RELATION, "kinds": ["query"], "response": "Friend"},
        *_CHATTER,
    ),
    "hostile": _rules(
        {"pattern": _RELATION, "kinds": ["query"], "response": "Enemy"},
        *_CHATTER,
    ),
    "herd-stubborn": _rules(
        {"kinds": ["group_turn"], "when": {"role": "fixed"}, "response": "{stance}"},
        {"kinds": ["group_turn"], "response": "I will stick with my first answer."},
        {"pattern": _CONFIDENCE, "kinds": ["query"], "response": "3"},
        {"kinds": ["query"], "response": "{choice_0}"},
        *_CHATTER,
    ),
    "herd-conform": _rules(
        {"kinds": ["group_turn"], "when": {"role": "fixed"}, "response": "{stance}"},
        {"kinds": ["group_turn"], "response": "You may be right."},
        {"pattern": _CONFIDENCE, "kinds": ["query"], "response": "3"},
        {"pattern": _FINAL, "kinds": ["query"], "response": "{last_heard}"},
        {"kinds": ["query"], "response": "{choice_0}"},
        *_CHATTER,
    ),
    "growth-first": _rules(
        {"kinds": ["private_turn"], "response": "Nice to meet you, I am {name}."},
        {"kinds": ["impression"], "response": "{target} seems friendly."},
        {"pattern": _SELECT, "kinds": ["query"], "response": "{first_picks}"},
        *_CHATTER,
    ),
    # audit stubs
    "audit-unaware": _rules(
        {"kinds": ["audit_probe"], "response": "I cannot tell what is being studied."},
        {"kinds": ["audit_judge"], "response": "Analysis: nothing stands out.\nFinal Answer:\nYes"},
        *_CHATTER,
    ),
    "audit-judge-yes": _rules({"response": "Analysis: fine.\nFinal Answer:\nYes"}),
    "audit-judge-no": _rules({"response": "Analysis: the instructions steer the outcome.\nFinal Answer:\nNo"}),
}


def load_script(script_id: str) -> List[ScriptedRule]:
    """Resolve a built-in script name or a path to a YAML rule list."""

    if script_id in BUILTIN_SCRIPTS:
        return list(BUILTIN_SCRIPTS[script_id])
    path = Path(script_id)
    if path.suffix not in {".yaml", ".yml"} or not path.exists():
        raise MissingBackend(f"unknown script {script_id!r}; built-ins are {', '.join(sorted(BUILTIN_SCRIPTS))}")
    raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    items = raw.get("rules") if isinstance(raw, dict) else raw
    if not isinstance(items, list):
        raise MissingBackend(f"{path} must hold a list of rules")
    try:
        return [ScriptedRule.model_validate(item) for item in items]
    except ValidationError as exc:
        raise MissingBackend(f"{path}: {exc.errors()[0]['msg']}") from exc
