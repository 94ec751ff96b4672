"""
DOT text export of flow graphs for debugging with Graphviz.
"""

import logging
from pathlib import Path
from typing import List, Union

from backend.shared.run_utils import LOGGER_NAME

from ..model.model_models import NodeKind
from .graph_models import FlowGraph, GraphNode

logger = logging.getLogger(LOGGER_NAME)

_SHAPES = {
    NodeKind.INITIAL: 'shape=circle, style=filled, fillcolor=black, label=""',
    NodeKind.FINAL: 'shape=doublecircle, style=filled, fillcolor=black, label=""',
    NodeKind.DECISION: "shape=diamond",
    NodeKind.MERGE: "shape=diamond",
    NodeKind.FORK: "shape=box, height=0.1, style=filled, fillcolor=black",
    NodeKind.JOIN: "shape=box, height=0.1, style=filled, fillcolor=black",
    NodeKind.STATE: "shape=box, style=rounded",
    NodeKind.ACTION: "shape=box",
}


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _node_line(prefix: str, node: GraphNode) -> str:
    attributes = _SHAPES[node.kind]
    if "label=" not in attributes:
        caption = f"{node.id}: {node.label}" if node.label else node.id
        attributes += f', label="{_escape(caption)}"'
    if node.concurrent:
        attributes += ', style="rounded,dashed"'
    return f'  "{prefix}{node.id}" [{attributes}];'


def _body(graph: FlowGraph, prefix: str = "") -> List[str]:
    lines: List[str] = []
    for node in graph.nodes:
        lines.append(_node_line(prefix, node))
    for edge in graph.edges:
        label = f' [label="{_escape(edge.label)}"]' if edge.label else ""
        lines.append(f'  "{prefix}{edge.source}" -> "{prefix}{edge.target}"{label};')
    for node in graph.nodes:
        if node.nested is None:
            continue
        inner = f"{prefix}{node.id}/"
        lines.append(f'  subgraph "cluster_{inner}" {{')
        lines.append(f'    label="{_escape(node.nested.name)}";')
        lines.extend("  " + line for line in _body(node.nested, inner))
        lines.append("  }")
        lines.append(
            f'  "{prefix}{node.id}" -> "{inner}{node.nested.initial}" [style=dotted];'
        )
    return lines


def to_dot(graph: FlowGraph) -> str:
    """Render ``graph`` (and nested sub-graphs as clusters) as a DOT digraph."""
    lines = [f'digraph "{_escape(graph.name)}" {{', "  rankdir=TB;"]
    lines.extend(_body(graph))
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_dot_file(graph: FlowGraph, path: Union[str, Path]) -> str:
    """
    Write the DOT rendering of ``graph`` to ``path``.

    Returns:
        Path written
    """
    path = Path(path)
    path.write_text(to_dot(graph), encoding="utf-8")
    logger.info(f"DOT graph for '{graph.name}' saved to {path}")
    return str(path)
