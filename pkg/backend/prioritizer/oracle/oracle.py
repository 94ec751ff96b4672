"""
Exhaustive enumeration of the chromosome space and GA verification.
"""

import itertools
import logging
from typing import Dict, List, Tuple

from backend.shared.errors import IntegrityError, LayoutMismatchError, SearchSpaceTooLargeError
from backend.shared.run_utils import LOGGER_NAME, PerformanceMonitor

from ..complexity.complexity_models import WeightTable
from ..encoding.encoding_models import ChromosomeLayout
from ..encoding.path_encoder import path_fitness, walk_all_paths
from ..ga.ga_models import GaRunResult
from ..graph.graph_models import FlowGraph
from .oracle_models import BranchPattern, DistinctPath, OracleResult, VerificationReport

logger = logging.getLogger(LOGGER_NAME)

DEFAULT_MAX_BITS = 24


def check_bound(layout: ChromosomeLayout, max_bits: int = DEFAULT_MAX_BITS) -> None:
    if layout.total_bits > max_bits:
        raise SearchSpaceTooLargeError(layout.total_bits, max_bits)


@PerformanceMonitor.monitor_operation("enumerate_all", log_parameters=False)
def enumerate_all(
    graph: FlowGraph,
    weights: WeightTable,
    layout: ChromosomeLayout,
    max_bits: int = DEFAULT_MAX_BITS,
) -> OracleResult:
    """
    Score every chromosome of ``layout`` by walking each branch sequence once.

    Chromosomes that agree on every decision a walk reaches decode to the same
    path, so each sequence accounts for a whole block of the space at once.

    Raises:
        SearchSpaceTooLargeError: layout wider than ``max_bits``
    """
    check_bound(layout, max_bits)

    every_code = list(range(2**layout.field_width))
    grouped: Dict[str, dict] = {}
    sequences = 0
    for walk in walk_all_paths(graph, layout):
        sequences += 1
        taken = dict(walk.choices)
        pattern = BranchPattern(
            codes=[
                layout.codes_for(node, taken[node]) if node in taken else every_code
                for node in layout.nodes
            ]
        )
        key = "-".join(walk.nodes)
        group = grouped.setdefault(
            key,
            {
                "nodes": list(walk.nodes),
                "fitness": path_fitness(weights, walk.nodes),
                "complete": walk.complete,
                "patterns": [],
            },
        )
        group["patterns"].append(pattern)

    distinct = []
    for key, group in grouped.items():
        firsts = [
            "".join(format(allowed[0], f"0{layout.field_width}b") for allowed in p.codes)
            for p in group["patterns"]
        ]
        distinct.append(DistinctPath(key=key, first_chromosome=min(firsts), **group))
    distinct.sort(key=lambda p: (-p.fitness, p.first_chromosome))

    result = OracleResult(
        graph_name=graph.name,
        total_bits=layout.total_bits,
        field_width=layout.field_width,
        outdegrees=[f.outdegree for f in layout.fields],
        sequence_count=sequences,
        distinct_paths=distinct,
    )
    logger.info(
        f"Enumerated {result.total_chromosomes} chromosome(s) of '{graph.name}' through "
        f"{sequences} branch sequence(s): {len(distinct)} distinct path(s), "
        f"maximum {result.maximum}"
    )
    return result


def distinct_path_count(graph: FlowGraph, layout: ChromosomeLayout) -> int:
    """Number of distinct scenarios, found by walking the graph."""
    return len({walk.nodes for walk in walk_all_paths(graph, layout)})


def declared_combinations(layout: ChromosomeLayout) -> List[Tuple[str, ...]]:
    """
    Branch labels per decision node for every non-aliased chromosome,
    in bit-value order.
    """
    return list(itertools.product(*(field.labels for field in layout.fields)))


@PerformanceMonitor.monitor_operation("verify_run", log_parameters=False)
def verify_run(run: GaRunResult, oracle: OracleResult) -> VerificationReport:
    """
    Compare a GA run with the exhaustive optimum.

    Raises:
        LayoutMismatchError: chromosome widths differ
        IntegrityError: the GA reports a fitness above the true maximum
    """
    if len(run.best) != oracle.total_bits:
        raise LayoutMismatchError(
            f"GA chromosomes have {len(run.best)} bits, oracle enumerated {oracle.total_bits}"
        )
    if run.best_fitness > oracle.maximum:
        raise IntegrityError(
            f"GA best {run.best_fitness} exceeds the enumerated maximum {oracle.maximum}"
        )

    known = set(oracle.path_keys)
    seen = [key for key in run.covered_keys if key in known]
    if len(seen) != len(run.covered_keys):
        raise IntegrityError("GA covered a path the enumeration never produced")

    report = VerificationReport(
        optimum_found=run.best_fitness == oracle.maximum,
        ga_best=run.best_fitness,
        oracle_maximum=oracle.maximum,
        gap=oracle.maximum - run.best_fitness,
        coverage=len(seen) / len(known),
        covered_paths=len(seen),
        distinct_paths=len(known),
    )
    logger.info(
        f"Verification: optimum_found={report.optimum_found}, gap={report.gap}, "
        f"coverage={report.coverage:.3f}"
    )
    return report
