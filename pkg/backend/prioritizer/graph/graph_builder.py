"""
Lowering of resolved diagram models into flow graphs.

Activity diagrams become control-flow graphs (CFG); state charts become
state-dependency graphs (SDG). Both share one FlowGraph type.
"""

import logging
from typing import Dict, List, Tuple

import networkx as nx

from backend.shared.errors import GraphBuildError, UnknownNodeError
from backend.shared.run_utils import LOGGER_NAME, PerformanceMonitor

from ..model.model_models import DiagramKind, DiagramModel, NodeKind, natural_key
from .graph_models import FlowGraph, ForkRegion, GraphEdge, GraphKind, GraphNode

logger = logging.getLogger(LOGGER_NAME)


def build_cfg(model: DiagramModel) -> FlowGraph:
    """
    Lower an activity diagram to a control-flow graph.

    Nested sub-activities must already be resolved; each one is lowered
    recursively and attached to its host node.

    Raises:
        GraphBuildError: wrong model kind, fork without a join on every
            branch, decision node with fewer than two branches, or an
            unreachable node
    """
    if model.kind != DiagramKind.ACTIVITY:
        raise GraphBuildError(f"'{model.name}' is not an activity diagram")

    for node in model.nodes:
        if node.kind == NodeKind.DECISION and len(_distinct_targets(model, node.id)) < 2:
            raise GraphBuildError(
                f"decision node '{node.id}' in '{model.name}' needs at least two branches"
            )

    return _lower(model, GraphKind.CFG)


def build_sdg(model: DiagramModel) -> FlowGraph:
    """
    Lower a state chart to a state-dependency graph.

    Every event transition becomes one labelled edge (self-loops included);
    states with two or more outgoing events are decision nodes.

    Raises:
        GraphBuildError: wrong model kind or a non-final state without
            outgoing events
    """
    if model.kind != DiagramKind.STATE_CHART:
        raise GraphBuildError(f"'{model.name}' is not a state chart")

    for node in model.nodes:
        if node.kind != NodeKind.FINAL and not model.outgoing(node.id):
            raise GraphBuildError(
                f"state '{node.id}' in '{model.name}' has no outgoing events and is not final"
            )

    return _lower(model, GraphKind.SDG)


@PerformanceMonitor.monitor_operation("build_graph", log_parameters=False)
def build_graph(model: DiagramModel) -> FlowGraph:
    """Lower a model with the builder matching its kind."""
    if model.kind == DiagramKind.ACTIVITY:
        return build_cfg(model)
    return build_sdg(model)


def _distinct_targets(model: DiagramModel, node_id: str) -> List[str]:
    targets: List[str] = []
    for transition in model.outgoing(node_id):
        if transition.target not in targets:
            targets.append(transition.target)
    return targets


def _lower(model: DiagramModel, kind: GraphKind) -> FlowGraph:
    known = set(model.node_ids)
    for transition in model.transitions:
        for end in (transition.source, transition.target):
            if end not in known:
                raise GraphBuildError(f"edge in '{model.name}' references unknown node '{end}'")

    initials = [n.id for n in model.nodes if n.kind == NodeKind.INITIAL]
    if len(initials) != 1:
        raise GraphBuildError(f"'{model.name}' must have exactly one initial node")
    initial = initials[0]
    finals = [n.id for n in model.nodes if n.kind == NodeKind.FINAL]

    skeleton = nx.DiGraph()
    skeleton.add_nodes_from(model.node_ids)
    skeleton.add_edges_from((t.source, t.target) for t in model.transitions)

    unreachable = known - nx.descendants(skeleton, initial) - {initial}
    if unreachable:
        raise GraphBuildError(
            f"nodes not reachable from the initial node of '{model.name}': "
            f"{sorted(unreachable, key=natural_key)}"
        )

    forks: Dict[str, ForkRegion] = {}
    if kind == GraphKind.CFG:
        for node in model.nodes:
            if node.kind == NodeKind.FORK:
                forks[node.id] = fork_region(model, skeleton, node.id)
    concurrent = {n for region in forks.values() for n in region.concurrent}

    nodes: List[GraphNode] = []
    for node in sorted(model.nodes, key=lambda n: natural_key(n.id)):
        nested = None
        if node.id in model.sub_activities:
            sub = model.resolved.get(node.id)
            if sub is None:
                raise GraphBuildError(
                    f"sub-activity of node '{node.id}' in '{model.name}' is not resolved"
                )
            nested = build_cfg(sub) if sub.kind == DiagramKind.ACTIVITY else build_sdg(sub)
        nodes.append(
            GraphNode(
                id=node.id,
                kind=node.kind,
                label=node.label,
                concurrent=node.id in concurrent,
                nested=nested,
            )
        )

    if kind == GraphKind.CFG:
        decisions = [n.id for n in nodes if n.kind == NodeKind.DECISION]
    else:
        decisions = [n.id for n in nodes if len(model.outgoing(n.id)) >= 2]

    edges = [
        GraphEdge(source=t.source, target=t.target, label=t.label, guard=t.guard)
        for t in model.transitions
    ]

    graph = FlowGraph(
        name=model.name,
        kind=kind,
        nodes=nodes,
        edges=edges,
        initial=initial,
        finals=finals,
        decision_nodes=decisions,
        forks=forks,
        overrides={o.node: o for o in model.overrides},
    )
    logger.debug(
        f"Lowered '{model.name}' to {kind.value}: {len(nodes)} nodes, "
        f"{len(edges)} edges, decisions={decisions}, forks={sorted(forks)}"
    )
    return graph


def fork_region(model: DiagramModel, skeleton: nx.DiGraph, fork: str) -> ForkRegion:
    """
    Find the join closing ``fork`` and the concurrent nodes between them.

    The join is the join node reachable from every branch head that lies
    nearest to the fork (BFS hops, ties by id). Concurrent nodes are those
    reachable from a branch head without passing the join.
    """
    heads = _distinct_targets(model, fork)
    if not heads:
        raise GraphBuildError(f"fork '{fork}' in '{model.name}' has no branches")

    joins = {n.id for n in model.nodes if n.kind == NodeKind.JOIN}
    common = set(joins)
    for head in heads:
        common &= nx.descendants(skeleton, head) | {head}
    if not common:
        raise GraphBuildError(
            f"fork '{fork}' in '{model.name}' has no matching join on every branch"
        )

    hops = nx.single_source_shortest_path_length(skeleton, fork)
    join = min(common, key=lambda n: (hops[n], natural_key(n)))

    inside = skeleton.subgraph(n for n in skeleton.nodes if n not in (fork, join))
    members = set()
    for head in heads:
        if head != join:
            members |= nx.descendants(inside, head) | {head}

    block = skeleton.subgraph(members)
    try:
        order = list(nx.lexicographical_topological_sort(block, key=natural_key))
    except nx.NetworkXUnfeasible:
        order = sorted(members, key=natural_key)

    return ForkRegion(
        fork=fork,
        join=join,
        concurrent=sorted(members, key=natural_key),
        block_order=order,
    )


def fanin_fanout(graph: FlowGraph, node_id: str) -> Tuple[int, int]:
    """
    Count the other nodes that pass control into and out of ``node_id``.

    Self-loops are not counted on either side.

    Raises:
        UnknownNodeError: if the node is not in the graph
    """
    if node_id not in graph:
        raise UnknownNodeError(node_id, graph.name)
    fanin = {e.source for e in graph.in_edges(node_id) if e.source != node_id}
    fanout = {e.target for e in graph.out_edges(node_id) if e.target != node_id}
    return len(fanin), len(fanout)
