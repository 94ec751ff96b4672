from enum import Enum
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from backend.shared.errors import UnknownNodeError

from ..model.model_models import IfOverride, NodeKind


class GraphKind(str, Enum):
    CFG = "cfg"
    SDG = "sdg"


class GraphEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: str
    target: str
    label: str = ""
    guard: Optional[str] = None


class ForkRegion(BaseModel):
    """The concurrent block opened by a fork and closed by its join."""

    model_config = ConfigDict(frozen=True)

    fork: str
    join: str
    concurrent: List[str] = Field(description="Branch nodes in ascending id order")
    block_order: List[str] = Field(
        description="Branch nodes in the order they are stacked (topological, ties by id)"
    )


class FlowGraph:
    """
    Immutable control-flow (activity) or state-dependency (state chart) graph.

    Node order is natural id order; edge order is declaration order, which
    fixes the branch numbering of every decision node.
    """

    def __init__(
        self,
        name: str,
        kind: GraphKind,
        nodes: Iterable["GraphNode"],
        edges: Iterable[GraphEdge],
        initial: str,
        finals: Iterable[str],
        decision_nodes: Iterable[str],
        forks: Optional[Dict[str, ForkRegion]] = None,
        overrides: Optional[Dict[str, IfOverride]] = None,
    ):
        self._name = name
        self._kind = kind
        self._nodes: Tuple[GraphNode, ...] = tuple(nodes)
        self._edges: Tuple[GraphEdge, ...] = tuple(edges)
        self._initial = initial
        self._finals = frozenset(finals)
        self._decision_nodes = tuple(decision_nodes)
        self._forks = MappingProxyType(dict(forks or {}))
        self._overrides = MappingProxyType(dict(overrides or {}))
        self._index = {node.id: node for node in self._nodes}

        self._out: Dict[str, List[GraphEdge]] = {node.id: [] for node in self._nodes}
        self._in: Dict[str, List[GraphEdge]] = {node.id: [] for node in self._nodes}
        for edge in self._edges:
            self._out[edge.source].append(edge)
            self._in[edge.target].append(edge)

        graph = nx.MultiDiGraph(name=name)
        for node in self._nodes:
            graph.add_node(node.id, kind=node.kind.value, label=node.label)
        for edge in self._edges:
            graph.add_edge(edge.source, edge.target, label=edge.label)
        self._graph = nx.freeze(graph)

    @property
    def name(self) -> str:
        return self._name

    @property
    def kind(self) -> GraphKind:
        return self._kind

    @property
    def nodes(self) -> Tuple["GraphNode", ...]:
        return self._nodes

    @property
    def node_ids(self) -> List[str]:
        return [node.id for node in self._nodes]

    @property
    def edges(self) -> Tuple[GraphEdge, ...]:
        return self._edges

    @property
    def initial(self) -> str:
        return self._initial

    @property
    def finals(self) -> frozenset:
        return self._finals

    @property
    def decision_nodes(self) -> Tuple[str, ...]:
        return self._decision_nodes

    @property
    def forks(self) -> Mapping[str, ForkRegion]:
        return self._forks

    @property
    def overrides(self) -> Mapping[str, IfOverride]:
        return self._overrides

    @property
    def digraph(self) -> nx.MultiDiGraph:
        """Frozen networkx view of the graph."""
        return self._graph

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._index

    def __len__(self) -> int:
        return len(self._nodes)

    def node(self, node_id: str) -> "GraphNode":
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownNodeError(node_id, self._name)

    def out_edges(self, node_id: str) -> Tuple[GraphEdge, ...]:
        self.node(node_id)
        return tuple(self._out[node_id])

    def in_edges(self, node_id: str) -> Tuple[GraphEdge, ...]:
        self.node(node_id)
        return tuple(self._in[node_id])

    def successors(self, node_id: str) -> List[str]:
        """Distinct successors in declaration order."""
        seen: List[str] = []
        for edge in self.out_edges(node_id):
            if edge.target not in seen:
                seen.append(edge.target)
        return seen

    def hop_distances(self, source: str) -> Dict[str, int]:
        self.node(source)
        return nx.single_source_shortest_path_length(self._graph, source)

    def __repr__(self) -> str:
        return (
            f"FlowGraph(name={self._name!r}, kind={self._kind.value}, "
            f"nodes={len(self._nodes)}, edges={len(self._edges)})"
        )


class GraphNode(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str
    kind: NodeKind
    label: str = ""
    concurrent: bool = Field(
        default=False, description="Set for nodes between a fork and its join"
    )
    nested: Optional[FlowGraph] = Field(
        default=None, description="Lowered sub-activity bound to this node"
    )
