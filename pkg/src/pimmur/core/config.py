"""Run configuration: the SimConfig model, its validation, and config-file loading."""
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Iterable, Literal, Mapping, Optional, get_args

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import (
    InvalidConfig,
    MissingBackend,
    NonPositiveCount,
    TopologyMismatch,
    UnknownExperiment,
)
from .types import ExperimentKind, InstructionVariant, TopologyKind, canonical_json, sha256_hex

EXPERIMENTS: tuple[str, ...] = get_args(ExperimentKind)

REQUIRED_TOPOLOGY: Dict[str, str] = {
    "fake_news": "complete",
    "social_balance": "complete",
    "telephone": "chain",
    "herd": "complete",
    "network_growth": "dynamic_growth",
}

# experiments whose prompts carry an ablation line
STEERABLE = {"fake_news", "telephone"}


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class MemoryVariant(_Frozen):
    kind: Literal["window", "reflection"] = "window"
    # None means an unbounded window
    size: Optional[int] = Field(default=20, ge=1)
    interval: int = Field(default=3, ge=1)


class BackendDescriptor(_Frozen):
    kind: Literal["http", "scripted"]
    model: Optional[str] = None
    base_url: Optional[str] = None
    api_key_env: Optional[str] = None
    script_id: Optional[str] = None


class EmbedderDescriptor(_Frozen):
    kind: Literal["oracle", "http"] = "oracle"
    dimension: int = Field(default=256, ge=1)
    model: Optional[str] = None
    base_url: Optional[str] = None
    api_key_env: Optional[str] = None


class FakeNewsParams(_Frozen):
    claim_id: str = "council-musicians"


class SocialBalanceParams(_Frozen):
    n_triads: int = Field(default=64, ge=1)
    strict_balance: bool = False


class TelephoneParams(_Frozen):
    message_id: str = "lighthouse"


class HerdParams(_Frozen):
    n_trials: int = Field(default=100, ge=1)


class NetworkGrowthParams(_Frozen):
    m: int = Field(default=2, ge=1)
    steps: int = Field(default=100, ge=1)
    sample_size: int = Field(default=8, ge=1)
    fit_k_min: int = Field(default=1, ge=1)


class SimConfig(_Frozen):
    experiment: ExperimentKind
    n_agents: int = Field(ge=1)
    n_rounds: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    topology: TopologyKind
    memory_variant: MemoryVariant = MemoryVariant()
    instruction_variant: InstructionVariant = "none"
    backend: BackendDescriptor
    embedder: EmbedderDescriptor = EmbedderDescriptor()

    topic: Optional[str] = None
    shuffle_turns: bool = False
    char_budget: int = Field(default=6000, ge=1)
    temperature: float = Field(default=0.7, ge=0.0)
    probe_temperature: float = Field(default=0.0, ge=0.0)
    max_tokens: int = Field(default=512, ge=1)

    fake_news: FakeNewsParams = FakeNewsParams()
    social_balance: SocialBalanceParams = SocialBalanceParams()
    telephone: TelephoneParams = TelephoneParams()
    herd: HerdParams = HerdParams()
    network_growth: NetworkGrowthParams = NetworkGrowthParams()

    def canonical(self) -> str:
        return canonical_json(self.model_dump(mode="json"))

    @property
    def config_hash(self) -> str:
        return sha256_hex(self.canonical())


def _positive(raw: Mapping[str, Any], key: str) -> None:
    value = raw.get(key)
    if value is None:
        raise NonPositiveCount(f"{key} is required")
    if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
        raise NonPositiveCount(f"{key} must be a positive integer, got {value!r}")


def validate_config(raw: Mapping[str, Any]) -> SimConfig:
    """Check a parsed config document and build a SimConfig.

    Rules are checked in a fixed order so the error names the first one violated.
    """

    if not isinstance(raw, Mapping):
        raise InvalidConfig(f"config document must be a mapping, got {type(raw).__name__}")
    data = dict(raw)

    experiment = data.get("experiment")
    if experiment not in EXPERIMENTS:
        raise UnknownExperiment(f"unknown experiment {experiment!r}; expected one of {', '.join(EXPERIMENTS)}")

    backend = data.get("backend")
    if not isinstance(backend, Mapping) or not backend.get("kind"):
        raise MissingBackend("a backend descriptor with a kind is required")
    if backend.get("kind") == "scripted" and not backend.get("script_id"):
        raise MissingBackend("scripted backend needs a script_id")
    if backend.get("kind") == "http" and not backend.get("model"):
        raise MissingBackend("http backend needs a model")

    _positive(data, "n_agents")
    _positive(data, "n_rounds")

    required = REQUIRED_TOPOLOGY[experiment]
    topology = data.setdefault("topology", required)
    if topology != required:
        raise TopologyMismatch(f"{experiment} runs on a {required} topology, got {topology!r}")

    variant = data.get("instruction_variant", "none")
    if variant != "none" and experiment not in STEERABLE:
        raise InvalidConfig(f"instruction_variant {variant!r} is only defined for {sorted(STEERABLE)}")

    if "seed" not in data:
        data["seed"] = 0

    try:
        config = SimConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(p) for p in first["loc"])
        raise InvalidConfig(f"{location}: {first['msg']}") from exc

    _check_population(config)
    return config


def _check_population(config: SimConfig) -> None:
    n = config.n_agents
    if config.experiment == "social_balance" and n != 3:
        raise InvalidConfig(f"social_balance runs triads; n_agents must be 3, got {n}")
    if config.experiment == "herd" and n < 3:
        raise InvalidConfig(f"herd needs at least 3 agents for a round-table, got {n}")
    if config.experiment in {"fake_news", "telephone"} and n < 2:
        raise InvalidConfig(f"{config.experiment} needs at least 2 agents, got {n}")
    if config.experiment == "network_growth" and n != config.network_growth.m + 1:
        raise InvalidConfig(
            f"network_growth starts from a clique of m+1={config.network_growth.m + 1} agents, got n_agents={n}"
        )
    if config.experiment == "network_growth" and config.network_growth.sample_size < config.network_growth.m:
        raise InvalidConfig("network_growth.sample_size must be at least m so a newcomer can meet m people")


def apply_overrides(raw: Mapping[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """Apply ``a.b=value`` overrides; values are parsed as YAML scalars."""

    data: Dict[str, Any] = _deep_copy(raw)
    for item in overrides:
        if "=" not in item:
            raise InvalidConfig(f"override {item!r} is not key=value")
        key, _, text = item.partition("=")
        path = [p for p in key.strip().split(".") if p]
        if not path:
            raise InvalidConfig(f"override {item!r} has an empty key")
        try:
            value = yaml.safe_load(text) if text.strip() else None
        except yaml.YAMLError as exc:
            raise InvalidConfig(f"override {item!r}: {exc}") from exc
        cursor = data
        for part in path[:-1]:
            nxt = cursor.get(part)
            if not isinstance(nxt, dict):
                nxt = {}
                cursor[part] = nxt
            cursor = nxt
        cursor[path[-1]] = value
    return data


def _deep_copy(raw: Mapping[str, Any]) -> Dict[str, Any]:
    return {k: _deep_copy(v) if isinstance(v, Mapping) else v for k, v in raw.items()}


def load_config_file(path: str | Path) -> Dict[str, Any]:
    """Parse a YAML or JSON config document into a mapping."""

    path = Path(path)
    if not path.exists():
        raise InvalidConfig(f"config file {path} does not exist")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise InvalidConfig(f"config file {path} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidConfig(f"config file {path} must hold a mapping")
    return data
