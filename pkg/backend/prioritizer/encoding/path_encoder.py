"""
Chromosome layout, path decoding and fitness.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Set, Tuple

from backend.shared.errors import DegenerateLayoutError
from backend.shared.run_utils import LOGGER_NAME

from ..complexity.complexity_models import WeightTable
from ..graph.graph_models import FlowGraph
from ..model.model_models import natural_key
from .encoding_models import (
    Chromosome,
    ChromosomeLayout,
    DecisionChoice,
    LayoutField,
    ScenarioPath,
)

logger = logging.getLogger(LOGGER_NAME)


def make_layout(graph: FlowGraph) -> ChromosomeLayout:
    """
    One field per decision node, all fields ceil(log2(max outdegree)) bits.

    Raises:
        DegenerateLayoutError: the graph has no decision node
    """
    if not graph.decision_nodes:
        raise DegenerateLayoutError(
            f"'{graph.name}' has no decision nodes; there is a single scenario"
        )

    fields = []
    for node_id in graph.decision_nodes:
        edges = graph.out_edges(node_id)
        fields.append(
            LayoutField(
                node=node_id,
                labels=[e.label for e in edges],
                targets=[e.target for e in edges],
            )
        )
    widest = max(f.outdegree for f in fields)
    return ChromosomeLayout(
        graph_name=graph.name,
        field_width=max(1, (widest - 1).bit_length()),
        fields=fields,
    )


def empty_layout(graph: FlowGraph) -> ChromosomeLayout:
    """Zero-bit layout used to decode the only scenario of a decision-free graph."""
    return ChromosomeLayout(graph_name=graph.name, field_width=1, fields=[])


def _nearest_unvisited(graph: FlowGraph, source: str, seen: Set[str]) -> Optional[str]:
    hops = graph.hop_distances(source)
    candidates = [(d, natural_key(n), n) for n, d in hops.items() if n not in seen]
    return min(candidates)[2] if candidates else None


def _enter(graph: FlowGraph, target: str, seen: Set[str]) -> Optional[str]:
    """Next node to visit after an edge into ``target``; None ends the walk."""
    if target in seen:
        return _nearest_unvisited(graph, target, seen)
    return target


def _walk_to_decision(
    graph: FlowGraph, current: str, decisions: Set[str], nodes: List[str], seen: Set[str]
) -> Tuple[Optional[str], bool]:
    """
    Append nodes from ``current`` on until a decision node has been appended.

    Returns the decision node, or None with the completion flag when the walk ended.
    """
    while True:
        nodes.append(current)
        seen.add(current)
        if current in graph.finals:
            return None, True

        region = graph.forks.get(current)
        if region is not None:
            for member in region.concurrent:
                if member not in seen:
                    nodes.append(member)
                    seen.add(member)
            following = region.join
        elif current in decisions:
            return current, False
        else:
            edges = graph.out_edges(current)
            if not edges:
                return None, False
            following = edges[0].target

        current = _enter(graph, following, seen)
        if current is None:
            return None, False


def decode_path(
    graph: FlowGraph, layout: ChromosomeLayout, chromosome: Chromosome
) -> ScenarioPath:
    """
    Walk the graph from its initial node under the branch choices of ``chromosome``.

    A fork appends its concurrent nodes in ascending id order and continues at
    its join. An edge into a visited node is skipped; the walk resumes at the
    unvisited node nearest (BFS hops, ties by id) to the node it hit, and ends
    incomplete when none is left.
    """
    codes: Dict[str, int] = dict(zip(layout.nodes, layout.field_values(chromosome)))

    nodes: List[str] = []
    seen: Set[str] = set()
    choices: List[DecisionChoice] = []
    complete = False
    current: Optional[str] = graph.initial

    while current is not None:
        decision, complete = _walk_to_decision(graph, current, set(codes), nodes, seen)
        if decision is None:
            break
        edges = graph.out_edges(decision)
        branch = codes[decision] % len(edges)
        edge = edges[branch]
        choices.append(
            DecisionChoice(
                node=decision,
                code=codes[decision],
                branch=branch,
                label=edge.label,
                target=edge.target,
            )
        )
        current = _enter(graph, edge.target, seen)

    return ScenarioPath(
        chromosome=chromosome.bits,
        nodes=nodes,
        choices=choices,
        complete=complete,
        aliased=layout.is_aliased(chromosome),
    )


class BranchWalk(NamedTuple):
    """One way through the graph: the branch taken at every decision it reached."""

    choices: Tuple[Tuple[str, int], ...]
    nodes: Tuple[str, ...]
    complete: bool


def walk_all_paths(graph: FlowGraph, layout: ChromosomeLayout) -> Iterator[BranchWalk]:
    """
    Every distinct branch sequence the decoder can follow, depth first.

    Each sequence stands for all chromosomes that agree on the decisions it
    reaches, so the cost follows the number of sequences rather than the
    number of chromosomes.
    """
    decisions = set(layout.nodes)
    nodes: List[str] = []
    seen: Set[str] = set()
    choices: List[Tuple[str, int]] = []

    def explore(current: Optional[str]) -> Iterator[BranchWalk]:
        mark = len(nodes)
        decision, complete = (None, False)
        if current is not None:
            decision, complete = _walk_to_decision(graph, current, decisions, nodes, seen)

        if decision is None:
            yield BranchWalk(tuple(choices), tuple(nodes), complete)
        else:
            for branch, edge in enumerate(graph.out_edges(decision)):
                choices.append((decision, branch))
                yield from explore(_enter(graph, edge.target, seen))
                choices.pop()

        for node in nodes[mark:]:
            seen.discard(node)
        del nodes[mark:]

    yield from explore(graph.initial)


def path_fitness(weights: WeightTable, nodes: Iterable[str]) -> int:
    return sum(weights.total(node) for node in set(nodes))


def fitness(
    graph: FlowGraph,
    weights: WeightTable,
    layout: ChromosomeLayout,
    chromosome: Chromosome,
) -> int:
    """Sum of node totals over the decoded path."""
    return path_fitness(weights, decode_path(graph, layout, chromosome).nodes)


class FitnessEvaluator:
    """
    Memoised decode + fitness for one (graph, weights, layout) triple.

    Evaluation is pure, so a generation may be scored by a thread pool; results
    always come back in input order.
    """

    def __init__(
        self,
        graph: FlowGraph,
        weights: WeightTable,
        layout: ChromosomeLayout,
        workers: int = 1,
    ):
        self.graph = graph
        self.weights = weights
        self.layout = layout
        self.workers = workers
        self._cache: Dict[str, ScenarioPath] = {}

    def evaluate(self, chromosome: Chromosome) -> ScenarioPath:
        cached = self._cache.get(chromosome.bits)
        if cached is not None:
            return cached
        path = decode_path(self.graph, self.layout, chromosome)
        scored = path.model_copy(update={"fitness": path_fitness(self.weights, path.nodes)})
        self._cache[chromosome.bits] = scored
        return scored

    def evaluate_many(self, chromosomes: List[Chromosome]) -> List[ScenarioPath]:
        if self.workers <= 1 or len(chromosomes) < 2:
            return [self.evaluate(c) for c in chromosomes]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(self.evaluate, chromosomes))
