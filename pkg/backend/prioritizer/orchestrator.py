"""
End-to-end pipeline: model file -> graph -> weights -> layout -> GA -> oracle.

The CLI only talks to this module. Each entry point returns a pydantic report
that the reporter helper renders; nothing here writes to stdout.
"""

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from backend.shared.errors import DegenerateLayoutError, ModelValidationError, UnknownModelError
from backend.shared.run_utils import LOGGER_NAME

from .complexity.complexity_analyzer import analyze_weights
from .complexity.complexity_models import WeightTable
from .encoding.encoding_models import Chromosome, ScenarioPath
from .encoding.path_encoder import decode_path, empty_layout, make_layout, path_fitness
from .ga import ga_engine
from .ga.ga_models import GaConfig, GaRunResult
from .graph.dot_export import save_dot_file
from .graph.graph_builder import build_graph
from .graph.graph_models import FlowGraph
from .model.model_models import DiagramModel, ModelBundle
from .model.model_parser import load_bundle
from .model.model_validator import resolve_nested, validate_model
from .oracle.oracle import DEFAULT_MAX_BITS, check_bound, enumerate_all, verify_run
from .oracle.oracle_models import OracleResult, SweepRow, SweepSummary, VerificationReport

logger = logging.getLogger(LOGGER_NAME)

ModelSource = Union[str, Path, ModelBundle]


class RankedScenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    rank: int
    chromosome: str
    fitness: int
    nodes: List[str]
    labels: List[str]
    aliased: bool
    complete: bool


class AnalysisReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    model_name: str
    model_kind: str
    node_count: int
    decision_nodes: List[str]
    weights: WeightTable
    layout: List[str] = Field(default_factory=list, description="One line per layout field")
    total_bits: int = 0


class RunReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    model_name: str
    model_kind: str
    weights: WeightTable
    layout: List[str] = Field(default_factory=list)
    total_bits: int = 0
    scenarios: List[RankedScenario] = Field(default_factory=list)
    ga: Optional[GaRunResult] = None
    verification: Optional[VerificationReport] = None
    sweep: Optional[SweepSummary] = None
    oracle: Optional[OracleResult] = Field(default=None, description="Kept for CSV export")
    degenerate: bool = False
    notice: str = ""


def load_model(source: ModelSource, name: Optional[str] = None) -> DiagramModel:
    """
    Parse, validate and resolve one model of a bundle.

    ``name`` defaults to the first model in the bundle.

    Raises:
        ModelValidationError: validation produced Error findings
        UnknownModelError: ``name`` is not in the bundle
    """
    bundle = source if isinstance(source, ModelBundle) else load_bundle(source)
    if not bundle.models:
        raise UnknownModelError(name or "<first>", [])
    model = bundle.find(name) if name else bundle.models[0]
    if model is None:
        raise UnknownModelError(name, bundle.names)

    report = validate_model(model, bundle)
    for finding in report.findings:
        if finding not in report.errors:
            logger.warning(f"Validation warning: {finding}")
    if not report.ok:
        raise ModelValidationError(model.name, report.errors)

    return resolve_nested(model, bundle)


def _prepare(
    source: ModelSource, name: Optional[str]
) -> Tuple[DiagramModel, FlowGraph, WeightTable]:
    model = load_model(source, name)
    graph = build_graph(model)
    return model, graph, analyze_weights(graph)


def analyze(source: ModelSource, name: Optional[str] = None) -> AnalysisReport:
    model, graph, weights = _prepare(source, name)
    try:
        layout = make_layout(graph)
        layout_lines, bits = layout.describe(), layout.total_bits
    except DegenerateLayoutError:
        layout_lines, bits = [], 0

    return AnalysisReport(
        model_name=model.name,
        model_kind=model.kind.value,
        node_count=len(graph),
        decision_nodes=list(graph.decision_nodes),
        weights=weights,
        layout=layout_lines,
        total_bits=bits,
    )


def rank_scenarios(paths: List[ScenarioPath]) -> List[RankedScenario]:
    """Distinct scenarios by fitness, highest first; equal fitness by node sequence."""
    ordered = sorted(paths, key=lambda p: (-p.fitness, p.key))
    return [
        RankedScenario(
            rank=index + 1,
            chromosome=path.chromosome,
            fitness=path.fitness,
            nodes=path.nodes,
            labels=path.edge_labels,
            aliased=path.aliased,
            complete=path.complete,
        )
        for index, path in enumerate(ordered)
    ]


def _single_scenario(model: DiagramModel, graph: FlowGraph, weights: WeightTable) -> RunReport:
    path = decode_path(graph, empty_layout(graph), Chromosome(bits=""))
    scored = path.model_copy(update={"fitness": path_fitness(weights, path.nodes)})
    logger.warning(f"'{graph.name}' has no decision nodes; emitting its single scenario")
    return RunReport(
        model_name=model.name,
        model_kind=model.kind.value,
        weights=weights,
        scenarios=rank_scenarios([scored]),
        degenerate=True,
        notice=f"'{graph.name}' has no decision nodes; there is a single scenario",
    )


def prioritize(
    source: ModelSource,
    name: Optional[str] = None,
    cfg: Optional[GaConfig] = None,
) -> RunReport:
    """
    Run the GA and rank the distinct scenarios it covered.

    The run stops early once its own exploration shows every path covered, so
    no enumeration is needed. A decision-free model yields a degenerate report
    with its single scenario.
    """
    cfg = cfg or GaConfig()
    model, graph, weights = _prepare(source, name)
    try:
        layout = make_layout(graph)
    except DegenerateLayoutError:
        return _single_scenario(model, graph, weights)

    run = ga_engine.run(graph, weights, layout, cfg)

    return RunReport(
        model_name=model.name,
        model_kind=model.kind.value,
        weights=weights,
        layout=layout.describe(),
        total_bits=layout.total_bits,
        scenarios=rank_scenarios(run.covered_paths),
        ga=run,
    )


def verify(
    source: ModelSource,
    name: Optional[str] = None,
    cfg: Optional[GaConfig] = None,
    max_bits: int = DEFAULT_MAX_BITS,
) -> RunReport:
    """
    Run the GA and the exhaustive oracle and compare them.

    Raises:
        DegenerateLayoutError: the model has no decision nodes
        SearchSpaceTooLargeError: the layout exceeds ``max_bits``
    """
    cfg = cfg or GaConfig()
    model, graph, weights = _prepare(source, name)
    layout = make_layout(graph)
    check_bound(layout, max_bits)

    oracle = enumerate_all(graph, weights, layout, max_bits)
    run = ga_engine.run(graph, weights, layout, cfg, target_path_count=len(oracle.distinct_paths))

    return RunReport(
        model_name=model.name,
        model_kind=model.kind.value,
        weights=weights,
        layout=layout.describe(),
        total_bits=layout.total_bits,
        scenarios=rank_scenarios(run.covered_paths),
        ga=run,
        verification=verify_run(run, oracle),
        oracle=oracle,
    )


def sweep(
    source: ModelSource,
    name: Optional[str] = None,
    cfg: Optional[GaConfig] = None,
    runs: int = 100,
    min_rate: float = 0.95,
    max_bits: int = DEFAULT_MAX_BITS,
) -> RunReport:
    """
    Verify ``runs`` GA runs with seeds ``cfg.seed .. cfg.seed + runs - 1``.

    The oracle is enumerated once and shared by every run.
    """
    if runs < 1:
        raise ValueError(f"sweep needs at least one run, got {runs}")
    cfg = cfg or GaConfig()
    model, graph, weights = _prepare(source, name)
    layout = make_layout(graph)
    check_bound(layout, max_bits)

    oracle = enumerate_all(graph, weights, layout, max_bits)
    target = len(oracle.distinct_paths)

    rows: List[SweepRow] = []
    for seed in range(cfg.seed, cfg.seed + runs):
        run = ga_engine.run(
            graph, weights, layout, cfg.model_copy(update={"seed": seed}), target_path_count=target
        )
        check = verify_run(run, oracle)
        rows.append(
            SweepRow(
                seed=seed,
                best=run.best,
                best_fitness=run.best_fitness,
                gap=check.gap,
                coverage=check.coverage,
                iterations_run=run.iterations_run,
            )
        )

    summary = SweepSummary(
        seeds=(cfg.seed, cfg.seed + runs - 1),
        runs=runs,
        optimum_found=sum(1 for row in rows if row.gap == 0),
        mean_gap=float(np.mean([row.gap for row in rows])),
        mean_coverage=float(np.mean([row.coverage for row in rows])),
        min_rate=min_rate,
        rows=rows,
    )
    logger.info(
        f"Sweep over {runs} seed(s) of '{model.name}': optimum found in "
        f"{summary.optimum_found} ({summary.rate:.2%})"
    )
    return RunReport(
        model_name=model.name,
        model_kind=model.kind.value,
        weights=weights,
        layout=layout.describe(),
        total_bits=layout.total_bits,
        sweep=summary,
        oracle=oracle,
    )


def export_dot(source: ModelSource, name: Optional[str], path: Union[str, Path]) -> Path:
    """Write the flow graph of one model as DOT text."""
    graph = build_graph(load_model(source, name))
    return Path(save_dot_file(graph, path))
