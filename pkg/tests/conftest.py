from typing import Any, Callable, Dict

import pytest

from pimmur.core.config import SimConfig, validate_config
from pimmur.experiments import RunContext
from pimmur.llm import DeterministicOracle, ScriptedBackend
from pimmur.llm.scripts import load_script

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "fake_news": {"n_agents": 4, "n_rounds": 3},
    "social_balance": {"n_agents": 3, "n_rounds": 1, "social_balance": {"n_triads": 4}},
    "telephone": {"n_agents": 5, "n_rounds": 1},
    "herd": {"n_agents": 4, "n_rounds": 1, "herd": {"n_trials": 4}},
    "network_growth": {"n_agents": 3, "n_rounds": 1, "network_growth": {"m": 2, "steps": 4, "sample_size": 3}},
}


def _raw(experiment: str, script: str = "default", **overrides: Any) -> Dict[str, Any]:
    raw: Dict[str, Any] = {
        "experiment": experiment,
        "seed": 7,
        "backend": {"kind": "scripted", "script_id": script},
        **DEFAULTS[experiment],
    }
    raw.update(overrides)
    return raw


@pytest.fixture
def raw_config() -> Callable[..., Dict[str, Any]]:
    return _raw


@pytest.fixture
def make_config() -> Callable[..., SimConfig]:
    def build(experiment: str, script: str = "default", **overrides: Any) -> SimConfig:
        return validate_config(_raw(experiment, script, **overrides))

    return build


@pytest.fixture
def make_context() -> Callable[..., RunContext]:
    def build(config: SimConfig, script: str | None = None, keep_prompts: bool = False) -> RunContext:
        backend = ScriptedBackend(load_script(script or config.backend.script_id or "default"), seed=config.seed)
        return RunContext.create(config, backend, DeterministicOracle(), keep_prompts=keep_prompts)

    return build
