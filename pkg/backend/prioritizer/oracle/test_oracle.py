"""
Tests for exhaustive enumeration, distinct paths and GA verification.
"""

import pytest

from backend.shared.errors import IntegrityError, LayoutMismatchError, SearchSpaceTooLargeError

from ..complexity.complexity_analyzer import total_complexity
from ..encoding.encoding_models import Chromosome
from ..encoding.path_encoder import decode_path, make_layout, path_fitness
from ..ga import ga_engine
from ..ga.ga_models import GaConfig
from ..graph.graph_builder import build_graph
from ..model.model_parser import parse_model
from ..model.synthetic import synthetic_model
from .oracle import (
    check_bound,
    declared_combinations,
    distinct_path_count,
    enumerate_all,
    verify_run,
)

# Event tuples at decision nodes 2, 3, 4 and 6 of the enrolment state chart.
ENROLMENT_TEST_DATA = [
    ("e1", "e2", "e4", "e7"),
    ("e1", "e2", "e4", "e10"),
    ("e1", "e2", "e5", "e7"),
    ("e1", "e2", "e5", "e10"),
    ("e1", "e2", "e11", "e7"),
    ("e1", "e2", "e11", "e10"),
    ("e1", "e9", "e4", "e7"),
    ("e1", "e9", "e4", "e10"),
    ("e1", "e9", "e5", "e7"),
    ("e1", "e9", "e5", "e10"),
    ("e1", "e9", "e11", "e7"),
    ("e1", "e9", "e11", "e10"),
    ("e12", "e2", "e4", "e7"),
    ("e12", "e2", "e4", "e10"),
    ("e12", "e2", "e5", "e7"),
    ("e12", "e2", "e5", "e10"),
    ("e12", "e2", "e11", "e7"),
    ("e12", "e2", "e11", "e10"),
    ("e12", "e9", "e4", "e7"),
    ("e12", "e9", "e4", "e10"),
    ("e12", "e9", "e5", "e7"),
    ("e12", "e9", "e5", "e10"),
    ("e12", "e9", "e11", "e7"),
    ("e12", "e9", "e11", "e10"),
    ("e1", "e2", "e3", "e7"),
    ("e1", "e2", "e3", "e10"),
    ("e1", "e9", "e3", "e7"),
    ("e1", "e9", "e3", "e10"),
    ("e12", "e2", "e3", "e7"),
    ("e12", "e2", "e3", "e10"),
    ("e12", "e9", "e3", "e7"),
    ("e12", "e9", "e3", "e10"),
]


def _ladder(rungs: int) -> str:
    """Decision d<i> either stops at the final node or goes on to d<i+1>."""
    lines = ["model activity Ladder", "node s initial", "node t action", "node e final"]
    lines += [f"node d{i} decision" for i in range(rungs)]
    lines.append("edge s -> d0")
    for i in range(rungs):
        onward = f"d{i + 1}" if i + 1 < rungs else "t"
        lines.append(f"edge d{i} -> e on stop")
        lines.append(f"edge d{i} -> {onward} on go")
    lines += ["edge t -> e", "end"]
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="module")
def shipping_oracle(shipping_graph, shipping_weights, shipping_layout):
    return enumerate_all(shipping_graph, shipping_weights, shipping_layout)


@pytest.fixture(scope="module")
def enrolment_oracle(enrolment_graph, enrolment_weights, enrolment_layout):
    return enumerate_all(enrolment_graph, enrolment_weights, enrolment_layout)


def test_shipping_enumeration(shipping_oracle):
    assert shipping_oracle.total_chromosomes == 16
    assert shipping_oracle.argmax == ["0111"]
    assert shipping_oracle.maximum == 317
    assert shipping_oracle.minimum == 154
    entries = list(shipping_oracle.iter_entries())
    assert entries[-1].chromosome == "1011"
    assert shipping_oracle.entry("1100").fitness == 240
    assert shipping_oracle.entry("110") is None
    print("✓ shipping enumeration test passed")


def test_entries_sorted_by_fitness_then_value(shipping_oracle):
    entries = list(shipping_oracle.iter_entries())
    keys = [(-e.fitness, e.chromosome) for e in entries]
    assert keys == sorted(keys)
    assert len({e.chromosome for e in entries}) == 16


def test_entries_match_the_decoder(
    enrolment_graph, enrolment_weights, enrolment_layout, enrolment_oracle
):
    entries = list(enrolment_oracle.iter_entries())
    assert len(entries) == 256
    for entry in entries:
        path = decode_path(enrolment_graph, enrolment_layout, Chromosome(bits=entry.chromosome))
        assert entry.path_key == path.key
        assert entry.fitness == path_fitness(enrolment_weights, path.nodes)
        assert entry.aliased == path.aliased
        assert enrolment_oracle.entry(entry.chromosome) == entry


def test_enrolment_enumeration(enrolment_oracle):
    assert enrolment_oracle.total_chromosomes == 256
    assert enrolment_oracle.maximum == 44
    assert "00000101" in enrolment_oracle.argmax
    assert len(enrolment_oracle.argmax) == 8
    assert enrolment_oracle.sequence_count == 7
    assert len(enrolment_oracle.distinct_paths) == 6

    best = enrolment_oracle.distinct_paths[0]
    assert best.nodes == ["1", "2", "3", "4", "6", "5", "7"]
    assert best.fitness == 44
    assert best.first_chromosome == "00000101"
    print("✓ enrolment enumeration test passed")


def test_chromosomes_with_the_same_path_are_grouped(shipping_oracle):
    """0000, 0001, 0100 and 0101 never reach nodes 7 or 16 and share one path."""
    group = next(p for p in shipping_oracle.distinct_paths if p.first_chromosome == "0000")
    assert list(group.chromosomes(1)) == ["0000", "0001", "0100", "0101"]
    assert group.chromosome_count == 4
    assert group.fitness == 173

    members = sum(p.chromosome_count for p in shipping_oracle.distinct_paths)
    assert members == 16
    assert len(set(shipping_oracle.path_keys)) == len(shipping_oracle.distinct_paths)


def test_self_loop_and_skipped_branch_share_a_path(enrolment_oracle):
    """Codes 10 (e4) and 11 (e3) at node 4 both end in 1-2-3-4-5-7."""
    group = next(p for p in enrolment_oracle.distinct_paths if p.key == "1-2-3-4-5-7")
    assert len(group.patterns) == 2
    assert group.chromosome_count == 32
    assert "00001100" in set(group.chromosomes(2))


def test_distinct_path_count(shipping_graph, shipping_layout, shipping_oracle):
    count = distinct_path_count(shipping_graph, shipping_layout)
    assert count == len(shipping_oracle.distinct_paths) == 7


def test_declared_combinations(enrolment_layout, shipping_layout):
    combos = declared_combinations(enrolment_layout)
    assert len(combos) == 32
    assert set(combos) == set(ENROLMENT_TEST_DATA)
    assert combos[0] == ("e1", "e2", "e11", "e7")

    assert len(declared_combinations(shipping_layout)) == 16


def test_wide_layout_enumerates_by_branch_sequence():
    bundle = parse_model(_ladder(20))
    graph = build_graph(bundle.models[0])
    weights = total_complexity(graph)
    layout = make_layout(graph)
    assert layout.total_bits == 20

    oracle = enumerate_all(graph, weights, layout)
    assert oracle.total_chromosomes == 2**20
    assert oracle.sequence_count == 21
    assert len(oracle.distinct_paths) == 21
    assert sum(p.chromosome_count for p in oracle.distinct_paths) == 2**20

    stop_first = oracle.entry("0" + "1" * 19)
    assert stop_first.path_key == "s-d0-e"
    assert next(p for p in oracle.distinct_paths if p.key == "s-d0-e").chromosome_count == 2**19
    assert oracle.entry("1" * 20).path_key.endswith("d19-t-e")
    assert oracle.argmax == ["1" * 20]


def test_verify_reports_gap(shipping_graph, shipping_weights, shipping_layout, shipping_oracle):
    cfg = GaConfig(max_iterations=0, initial_population=["1011", "1011", "0000", "0000"])
    run = ga_engine.run(shipping_graph, shipping_weights, shipping_layout, cfg)
    report = verify_run(run, shipping_oracle)
    assert not report.optimum_found
    assert report.ga_best == 173
    assert report.gap == 317 - 173
    assert report.covered_paths == 2
    assert report.coverage == 2 / report.distinct_paths


def test_verify_converged_run(shipping_graph, shipping_weights, shipping_layout, shipping_oracle):
    run = ga_engine.run(
        shipping_graph,
        shipping_weights,
        shipping_layout,
        GaConfig(seed=0),
        target_path_count=len(shipping_oracle.distinct_paths),
    )
    report = verify_run(run, shipping_oracle)
    assert report.optimum_found
    assert report.gap == 0
    assert report.coverage == 1.0


def test_verify_integrity_errors(
    shipping_graph, shipping_weights, shipping_layout, shipping_oracle, enrolment_oracle
):
    run = ga_engine.run(shipping_graph, shipping_weights, shipping_layout, GaConfig(seed=2))

    with pytest.raises(LayoutMismatchError):
        verify_run(run, enrolment_oracle)

    inflated = run.model_copy(update={"best_fitness": 400})
    with pytest.raises(IntegrityError):
        verify_run(inflated, shipping_oracle)


def test_search_space_bound():
    model = synthetic_model(25, seed=1)
    graph = build_graph(model)
    layout = make_layout(graph)
    assert layout.total_bits == 25

    with pytest.raises(SearchSpaceTooLargeError) as excinfo:
        check_bound(layout, 24)
    assert excinfo.value.total_bits == 25
    with pytest.raises(SearchSpaceTooLargeError):
        enumerate_all(graph, total_complexity(graph), layout, max_bits=24)


def test_oracle_bounds_ga_on_synthetic_graphs():
    for seed in range(50):
        model = synthetic_model(1 + seed % 8, seed=seed, back_edge_prob=0.4)
        graph = build_graph(model)
        weights = total_complexity(graph)
        layout = make_layout(graph)
        oracle = enumerate_all(graph, weights, layout)

        run = ga_engine.run(graph, weights, layout, GaConfig(seed=seed))
        report = verify_run(run, oracle)
        assert report.gap >= 0
        assert oracle.maximum == max(p.fitness for p in oracle.distinct_paths)
        assert sum(p.chromosome_count for p in oracle.distinct_paths) == oracle.total_chromosomes
    print("✓ synthetic oracle bound test passed")
