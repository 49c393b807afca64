"""Communication topologies over agent ids."""
from __future__ import annotations

from typing import Dict, Iterable, List, Sequence, Set, Tuple

import networkx as nx
from pydantic import BaseModel

from .errors import TooFewAgents
from .profiles import agent_id
from .types import TopologyKind

Edge = Tuple[str, str]


def _edge(a: str, b: str) -> Edge:
    return (a, b) if a <= b else (b, a)


class Topology(BaseModel):
    kind: TopologyKind
    nodes: List[str]
    edges: List[Edge] = []

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from(self.edges)
        return g

    def neighbors(self, agent_id: str) -> List[str]:
        out: Set[str] = set()
        for a, b in self.edges:
            if a == agent_id:
                out.add(b)
            elif b == agent_id:
                out.add(a)
        return [n for n in self.nodes if n in out]

    def has_edge(self, a: str, b: str) -> bool:
        return _edge(a, b) in set(self.edges)

    def degrees(self) -> Dict[str, int]:
        return {node: deg for node, deg in self.graph().degree()}

    def grow(self, newcomer: str, friends: Iterable[str]) -> None:
        """Add a node and its edges; only valid for dynamic growth."""

        if self.kind != "dynamic_growth":
            raise ValueError(f"{self.kind} topologies are fixed")
        if newcomer in self.nodes:
            raise ValueError(f"{newcomer} is already in the network")
        friends = list(friends)
        missing = [f for f in friends if f not in self.nodes]
        if missing:
            raise ValueError(f"unknown agents {missing}")
        self.nodes.append(newcomer)
        self.edges = sorted(set(self.edges) | {_edge(newcomer, f) for f in friends})


def build_topology(kind: TopologyKind, agents: int | Sequence[str]) -> Topology:
    """Chain follows index order; dynamic growth starts from a clique."""

    agent_ids = [agent_id(i) for i in range(agents)] if isinstance(agents, int) else list(agents)
    n = len(agent_ids)
    if n < 2:
        raise TooFewAgents(f"{kind} topology needs at least 2 agents, got {n}")
    if kind == "chain":
        base = nx.path_graph(n)
    elif kind in {"complete", "dynamic_growth"}:
        base = nx.complete_graph(n)
    else:
        raise ValueError(f"unknown topology {kind!r}")
    edges = sorted(_edge(agent_ids[u], agent_ids[v]) for u, v in base.edges())
    return Topology(kind=kind, nodes=list(agent_ids), edges=edges)
