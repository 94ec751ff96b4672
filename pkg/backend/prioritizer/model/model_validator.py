"""
Structural checks on parsed models and binding of nested sub-activities.
"""

from collections import Counter
from typing import Dict, List, Optional

import networkx as nx

from backend.shared.errors import CyclicNestingError, UnknownModelError

from .model_models import (
    ACTIVITY_ONLY_KINDS,
    STATE_CHART_ONLY_KINDS,
    DiagramKind,
    DiagramModel,
    Finding,
    ModelBundle,
    NodeKind,
    Severity,
    ValidationReport,
)


def _error(model: DiagramModel, where: str, message: str) -> Finding:
    return Finding(severity=Severity.ERROR, location=f"{model.name}:{where}", message=message)


def _warning(model: DiagramModel, where: str, message: str) -> Finding:
    return Finding(
        severity=Severity.WARNING, location=f"{model.name}:{where}", message=message
    )


def validate_model(model: DiagramModel, bundle: Optional[ModelBundle] = None) -> ValidationReport:
    """
    Check every model invariant and return the findings.

    Findings are data: nothing is raised. An empty report means the model is
    ready for resolve_nested and graph lowering.
    """
    findings: List[Finding] = []
    ids = model.node_ids
    known = set(ids)

    for node_id, count in sorted(Counter(ids).items()):
        if count > 1:
            findings.append(
                _error(model, f"node {node_id}", f"node id '{node_id}' declared {count} times")
            )

    initials = [n.id for n in model.nodes if n.kind == NodeKind.INITIAL]
    finals = [n.id for n in model.nodes if n.kind == NodeKind.FINAL]
    if len(initials) != 1:
        findings.append(
            _error(model, "model", f"expected exactly one initial node, found {len(initials)}")
        )
    if not finals:
        findings.append(_error(model, "model", "no final node"))

    for node in model.nodes:
        if model.kind == DiagramKind.ACTIVITY and node.kind in STATE_CHART_ONLY_KINDS:
            findings.append(
                _error(
                    model, f"node {node.id}", f"'{node.kind.value}' nodes belong in state charts"
                )
            )
        if model.kind == DiagramKind.STATE_CHART and node.kind in ACTIVITY_ONLY_KINDS:
            findings.append(
                _error(
                    model,
                    f"node {node.id}",
                    f"'{node.kind.value}' nodes belong in activity diagrams",
                )
            )

    for transition in model.transitions:
        where = f"edge {transition.source}->{transition.target}"
        for end in (transition.source, transition.target):
            if end not in known:
                findings.append(_error(model, where, f"unknown node id '{end}'"))

    branching = {NodeKind.DECISION, NodeKind.STATE}
    for node in model.nodes:
        outgoing = model.outgoing(node.id)
        if node.kind in branching:
            labels = [t.label for t in outgoing]
            repeated = sorted(label for label, count in Counter(labels).items() if count > 1)
            for label in repeated:
                findings.append(
                    _error(model, f"node {node.id}", f"outgoing label '{label}' is not unique")
                )
        if node.kind == NodeKind.INITIAL and any(t.target == node.id for t in model.transitions):
            findings.append(
                _error(model, f"node {node.id}", "initial node has incoming transitions")
            )
        if node.kind == NodeKind.FINAL and outgoing:
            findings.append(_error(model, f"node {node.id}", "final node has outgoing transitions"))
        single_branch = node.kind == NodeKind.DECISION and len(outgoing) < 2
        if model.kind == DiagramKind.ACTIVITY and single_branch:
            findings.append(
                _warning(model, f"node {node.id}", "decision node with fewer than two branches")
            )

    for host, sub_name in model.sub_activities.items():
        if host not in known:
            findings.append(_error(model, f"nested {host}", f"unknown node id '{host}'"))
        if bundle is None or bundle.find(sub_name) is None:
            findings.append(
                _error(model, f"nested {host}", f"sub-activity '{sub_name}' not found in bundle")
            )

    for override in model.overrides:
        if override.node not in known:
            findings.append(
                _error(model, f"override {override.node}", f"unknown node id '{override.node}'")
            )

    if len(initials) == 1:
        reached = _reachable(model, initials[0])
        for node_id in ids:
            if node_id not in reached:
                findings.append(
                    _error(model, f"node {node_id}", "not reachable from the initial node")
                )

    return ValidationReport(model_name=model.name, findings=findings)


def _reachable(model: DiagramModel, start: str) -> set:
    graph = nx.DiGraph()
    graph.add_nodes_from(model.node_ids)
    graph.add_edges_from((t.source, t.target) for t in model.transitions)
    return nx.descendants(graph, start) | {start}


def resolve_nested(
    model: DiagramModel, bundle: ModelBundle, _chain: Optional[List[str]] = None
) -> DiagramModel:
    """
    Bind every sub-activity reference to its model, recursively.

    Raises:
        CyclicNestingError: if a model nests itself directly or indirectly
        UnknownModelError: if a referenced model is missing from the bundle
    """
    chain = (_chain or []) + [model.name]
    if not model.sub_activities:
        return model

    resolved: Dict[str, DiagramModel] = {}
    for host, sub_name in model.sub_activities.items():
        if sub_name in chain:
            raise CyclicNestingError(chain + [sub_name])
        sub = bundle.find(sub_name)
        if sub is None:
            raise UnknownModelError(sub_name, bundle.names)
        resolved[host] = resolve_nested(sub, bundle, chain)

    return model.model_copy(update={"resolved": resolved})
