"""
Node complexity: stack-based weight, information-flow complexity and totals.

Stack weights come from a level-ordered traversal over one simulated stack.
Every push of node n at depth k (k nodes below it) contributes s_max - k,
where s_max is the highest stack reached. A node's stack weight is the sum of
its contributions.

Traversal rules:

* a fork stacks its concurrent block one node per level in topological
  order, then its join;
* a decision does not re-push a branch target already sitting at the
  decision's own level (a sibling);
* decisions, forks and the initial node are pushed once only;
* any other node reached again gets one more push, and its successors get a
  single push each without further expansion;
* a (node, depth) slot is pushed at most once.
"""

import heapq
import itertools
import logging
from typing import Dict, List, Optional, Tuple

from backend.shared.run_utils import LOGGER_NAME, PerformanceMonitor

from ..graph.graph_builder import fanin_fanout
from ..graph.graph_models import FlowGraph
from .complexity_models import (
    NodeWeight,
    PushRecord,
    StackEvent,
    StackTraceRecord,
    WeightTable,
)

logger = logging.getLogger(LOGGER_NAME)

_FULL = "full"
_TERMINAL = "terminal"
_BLOCK = "block"


def _push_schedule(graph: FlowGraph) -> List[Tuple[str, int]]:
    """Ordered (node, depth) pushes of the traversal."""
    decisions = set(graph.decision_nodes)
    pushed_once = decisions | set(graph.forks) | {graph.initial}

    queue: list = []
    counter = itertools.count()

    def schedule(depth: int, node: str, mode: str, pred: Optional[str] = None, position: int = 0):
        heapq.heappush(queue, (depth, next(counter), node, mode, pred, position))

    first_depth: Dict[str, int] = {}
    slots = set()
    pushes: List[Tuple[str, int]] = []

    def push(node: str, depth: int) -> bool:
        if (node, depth) in slots:
            return False
        slots.add((node, depth))
        pushes.append((node, depth))
        return True

    schedule(0, graph.initial, _FULL)
    while queue:
        depth, _, node, mode, pred, position = heapq.heappop(queue)

        if mode == _BLOCK:
            region = graph.forks[pred]
            first_depth.setdefault(node, depth)
            push(node, depth)
            for succ in graph.successors(node):
                if succ not in region.concurrent and succ != region.join:
                    schedule(depth + 1, succ, _FULL, node)
            if position + 1 < len(region.block_order):
                schedule(depth + 1, region.block_order[position + 1], _BLOCK, pred, position + 1)
            else:
                schedule(depth + 1, region.join, _FULL, node)
            continue

        if node in first_depth:
            if node in pushed_once:
                continue
            if mode == _FULL and pred in decisions and first_depth[node] == first_depth[pred]:
                continue
            if push(node, depth) and mode == _FULL:
                for succ in graph.successors(node):
                    schedule(depth + 1, succ, _TERMINAL, node)
            continue

        first_depth[node] = depth
        push(node, depth)
        region = graph.forks.get(node)
        if region is not None:
            if region.block_order:
                schedule(depth + 1, region.block_order[0], _BLOCK, node, 0)
            else:
                schedule(depth + 1, region.join, _FULL, node)
        else:
            for succ in graph.successors(node):
                schedule(depth + 1, succ, _FULL, node)

    return pushes


def stack_weights(graph: FlowGraph) -> Tuple[WeightTable, StackTraceRecord]:
    """
    Assign stack-based weights (column A) to every node of ``graph``.

    Returns:
        Tuple of (weight table with A and push logs filled, stack trace)
    """
    pushes = _push_schedule(graph)

    stack: List[str] = []
    events: List[StackEvent] = []
    sizes: List[int] = []
    for node, depth in pushes:
        while len(stack) > depth:
            popped = stack.pop()
            events.append(StackEvent(op="pop", node=popped, size=len(stack)))
        stack.append(node)
        events.append(StackEvent(op="push", node=node, size=len(stack)))
        sizes.append(len(stack))
    while stack:
        popped = stack.pop()
        events.append(StackEvent(op="pop", node=popped, size=len(stack)))

    s_max = max(sizes) if sizes else 0

    logs: Dict[str, List[PushRecord]] = {node.id: [] for node in graph.nodes}
    for index, ((node, depth), size) in enumerate(zip(pushes, sizes)):
        logs[node].append(
            PushRecord(index=index, depth=depth, stack_size=size, contribution=s_max - depth)
        )

    rows = [
        NodeWeight(
            node=node.id,
            stack_weight=sum(p.contribution for p in logs[node.id]),
            if_computed=0,
            if_complexity=0,
            push_log=logs[node.id],
        )
        for node in graph.nodes
    ]
    table = WeightTable(graph_name=graph.name, s_max=s_max, rows=rows)
    return table, StackTraceRecord(s_max=s_max, events=events)


def if_complexity(graph: FlowGraph, node_id: str) -> int:
    """FANIN x FANOUT of ``node_id``, as computed from the graph."""
    fanin, fanout = fanin_fanout(graph, node_id)
    return fanin * fanout


def nested_complexity(sub: Optional[FlowGraph], table: Optional[WeightTable] = None) -> int:
    """
    Sum of the totals of every node of a nested sub-graph (0 for none).

    ``table`` is the sub-graph's own weight table when the caller already built it.
    """
    if sub is None:
        return 0
    if table is None:
        table = total_complexity(sub)
    return table.grand_total


def total_complexity(graph: FlowGraph) -> WeightTable:
    """
    Full weight table: A, B, and total = A + B (+ nested sub-graph totals).

    Pinned IF values from the model replace the computed product in column B;
    the computed product stays on the row as ``if_computed``.
    """
    stack_table, _ = stack_weights(graph)

    rows: List[NodeWeight] = []
    nested_tables: Dict[str, WeightTable] = {}
    for node, stack_row in zip(graph.nodes, stack_table.rows):
        computed = if_complexity(graph, node.id)
        pin = graph.overrides.get(node.id)
        sub_table = None
        if node.nested is not None:
            sub_table = nested_tables[node.id] = total_complexity(node.nested)
        rows.append(
            stack_row.model_copy(
                update={
                    "if_computed": computed,
                    "if_complexity": pin.value if pin else computed,
                    "pinned": pin is not None,
                    "pin_reason": pin.reason if pin else "",
                    "nested_complexity": nested_complexity(node.nested, sub_table),
                }
            )
        )

    return WeightTable(
        graph_name=graph.name, s_max=stack_table.s_max, rows=rows, nested=nested_tables
    )


@PerformanceMonitor.monitor_operation("weights", log_parameters=False)
def analyze_weights(graph: FlowGraph) -> WeightTable:
    """Pipeline entry point for total_complexity with logging."""
    table = total_complexity(graph)
    pinned = [row.node for row in table.rows if row.pinned]
    logger.info(
        f"Weights for '{graph.name}': s_max={table.s_max}, "
        f"grand_total={table.grand_total}, pinned_if={pinned}"
    )
    return table
