import pytest

from pimmur.core.errors import TooFewAgents
from pimmur.core.topology import build_topology


def test_chain_links_neighbours_in_index_order() -> None:
    chain = build_topology("chain", 4)
    assert chain.edges == [("agent-000", "agent-001"), ("agent-001", "agent-002"), ("agent-002", "agent-003")]
    assert chain.neighbors("agent-001") == ["agent-000", "agent-002"]
    assert chain.neighbors("agent-003") == ["agent-002"]


def test_complete_graph_degrees() -> None:
    complete = build_topology("complete", 5)
    assert len(complete.edges) == 10
    assert set(complete.degrees().values()) == {4}


def test_growth_adds_node_and_edges() -> None:
    net = build_topology("dynamic_growth", 3)
    net.grow("agent-003", ["agent-000", "agent-002"])
    assert net.degrees() == {"agent-000": 3, "agent-001": 2, "agent-002": 3, "agent-003": 2}
    assert net.has_edge("agent-002", "agent-003")
    with pytest.raises(ValueError):
        net.grow("agent-003", ["agent-001"])
    with pytest.raises(ValueError):
        net.grow("agent-004", ["agent-009"])


def test_fixed_topologies_do_not_grow() -> None:
    with pytest.raises(ValueError):
        build_topology("chain", 3).grow("agent-003", ["agent-000"])


def test_needs_two_agents() -> None:
    with pytest.raises(TooFewAgents):
        build_topology("complete", 1)
