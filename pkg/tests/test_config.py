from pathlib import Path

import pytest

from pimmur.core.config import apply_overrides, load_config_file, validate_config
from pimmur.core.errors import InvalidConfig, MissingBackend, NonPositiveCount, TopologyMismatch, UnknownExperiment


def test_defaults_fill_topology_and_seed(raw_config) -> None:
    raw = raw_config("telephone")
    raw.pop("seed")
    config = validate_config(raw)
    assert config.topology == "chain"
    assert config.seed == 0
    assert config.memory_variant.kind == "window"
    assert config.char_budget == 6000
    assert config.temperature == 0.7 and config.probe_temperature == 0.0


def test_rules_fail_in_order(raw_config) -> None:
    with pytest.raises(UnknownExperiment):
        validate_config({**raw_config("herd"), "experiment": "prisoners_dilemma", "n_rounds": 0})
    with pytest.raises(MissingBackend):
        validate_config({**raw_config("herd"), "backend": {"kind": "http"}, "n_rounds": 0})
    with pytest.raises(NonPositiveCount):
        validate_config({**raw_config("herd"), "n_rounds": 0, "topology": "chain"})
    with pytest.raises(TopologyMismatch):
        validate_config({**raw_config("herd"), "topology": "chain"})


@pytest.mark.parametrize("value", [0, -1, "3", True, None])
def test_counts_must_be_positive_integers(raw_config, value) -> None:
    with pytest.raises(NonPositiveCount):
        validate_config({**raw_config("fake_news"), "n_agents": value})


def test_population_rules(raw_config) -> None:
    with pytest.raises(InvalidConfig):
        validate_config({**raw_config("social_balance"), "n_agents": 4})
    with pytest.raises(InvalidConfig):
        validate_config({**raw_config("herd"), "n_agents": 2})
    with pytest.raises(InvalidConfig):
        validate_config({**raw_config("network_growth"), "n_agents": 5})
    with pytest.raises(InvalidConfig):
        validate_config({**raw_config("network_growth"), "network_growth": {"m": 2, "sample_size": 1}})


def test_steering_only_for_steerable_experiments(raw_config) -> None:
    assert validate_config({**raw_config("fake_news"), "instruction_variant": "original_steering"})
    with pytest.raises(InvalidConfig):
        validate_config({**raw_config("herd"), "instruction_variant": "original_steering"})


def test_unknown_keys_are_rejected(raw_config) -> None:
    with pytest.raises(InvalidConfig) as info:
        validate_config({**raw_config("fake_news"), "n_roudns": 3})
    assert "n_roudns" in str(info.value)


def test_config_hash_is_stable_and_sensitive(make_config) -> None:
    a = make_config("fake_news")
    b = make_config("fake_news")
    c = make_config("fake_news", seed=8)
    assert a.config_hash == b.config_hash
    assert a.config_hash != c.config_hash
    assert len(a.config_hash) == 64


def test_overrides_parse_yaml_scalars(raw_config) -> None:
    raw = apply_overrides(raw_config("fake_news"), ["n_rounds=5", "memory_variant.kind=reflection", "shuffle_turns=true"])
    config = validate_config(raw)
    assert config.n_rounds == 5
    assert config.memory_variant.kind == "reflection"
    assert config.shuffle_turns is True


def test_overrides_leave_input_untouched(raw_config) -> None:
    raw = raw_config("fake_news")
    apply_overrides(raw, ["backend.script_id=skeptic"])
    assert raw["backend"]["script_id"] == "default"
    with pytest.raises(InvalidConfig):
        apply_overrides(raw, ["no-equals-sign"])


def test_load_config_file(tmp_path: Path) -> None:
    path = tmp_path / "run.yaml"
    path.write_text("experiment: telephone\nn_agents: 3\nn_rounds: 1\nbackend: {kind: scripted, script_id: copy}\n")
    assert validate_config(load_config_file(path)).n_agents == 3
    (tmp_path / "bad.yaml").write_text("- just\n- a list\n")
    with pytest.raises(InvalidConfig):
        load_config_file(tmp_path / "bad.yaml")
    with pytest.raises(InvalidConfig):
        load_config_file(tmp_path / "missing.yaml")
