"""
Tests for chromosome layouts, path decoding and fitness.
"""

import itertools

import pytest

from backend.shared.errors import DegenerateLayoutError, LayoutMismatchError

from ..graph.graph_builder import build_graph
from ..model.model_parser import parse_model
from .encoding_models import Chromosome
from .path_encoder import (
    FitnessEvaluator,
    decode_path,
    empty_layout,
    fitness,
    make_layout,
    walk_all_paths,
)

THREE_WAY = """
model statechart Dial
node 1 initial
node 2 state
node 3 state
node 4 state
node 5 final
edge 1 -> 2 on start
edge 2 -> 3 on low
edge 2 -> 4 on high
edge 2 -> 5 on off
edge 3 -> 5 on stop
edge 4 -> 5 on stop
end
"""


def _all(layout):
    return [
        Chromosome(bits="".join(bits))
        for bits in itertools.product("01", repeat=layout.total_bits)
    ]


def test_shipping_layout(shipping_layout):
    assert shipping_layout.total_bits == 4
    assert shipping_layout.field_width == 1
    assert shipping_layout.nodes == ["4", "7", "8", "16"]
    assert [f.labels for f in shipping_layout.fields] == [["no", "yes"]] * 4


def test_enrolment_layout(enrolment_layout):
    assert enrolment_layout.total_bits == 8
    assert enrolment_layout.field_width == 2
    assert enrolment_layout.nodes == ["2", "3", "4", "6"]
    assert enrolment_layout.fields[2].labels == ["e11", "e5", "e4", "e3"]
    assert enrolment_layout.describe()[2] == "node 4: 00->e11, 01->e5, 10->e4, 11->e3"
    print("✓ layout test passed")


def test_degenerate_layout():
    graph = build_graph(
        parse_model(
            "model activity L\nnode 1 initial\nnode 2 action\nnode 3 final\n"
            "edge 1 -> 2\nedge 2 -> 3\nend\n"
        ).models[0]
    )
    with pytest.raises(DegenerateLayoutError):
        make_layout(graph)

    path = decode_path(graph, empty_layout(graph), Chromosome(bits=""))
    assert path.nodes == ["1", "2", "3"]
    assert path.complete


def test_wrong_width_rejected(shipping_graph, shipping_layout):
    with pytest.raises(LayoutMismatchError):
        decode_path(shipping_graph, shipping_layout, Chromosome(bits="011"))


@pytest.mark.parametrize(
    "bits, nodes",
    [
        ("0000", "1 2 3 4 5 8 13 21 22"),
        ("0111", "1 2 3 4 5 8 9 7 10 11 12 14 15 16 17 18 19 20 21 22"),
        ("1011", "1 2 3 4 6 7 21 22"),
    ],
)
def test_shipping_paths(shipping_graph, shipping_layout, bits, nodes):
    path = decode_path(shipping_graph, shipping_layout, Chromosome(bits=bits))
    assert path.nodes == nodes.split()
    assert path.complete


@pytest.mark.parametrize(
    "bits, expected",
    [("0000", 173), ("0011", 226), ("0111", 317), ("1100", 240), ("1111", 245), ("1011", 154)],
)
def test_shipping_fitness(shipping_graph, shipping_weights, shipping_layout, bits, expected):
    chromosome = Chromosome(bits=bits)
    assert fitness(shipping_graph, shipping_weights, shipping_layout, chromosome) == expected


@pytest.mark.parametrize(
    "bits, nodes, expected",
    [
        ("00011000", "1 2 3 7", 26),
        ("01001000", "1 2 7", 20),
        ("00000100", "1 2 3 4 6 7", 40),
        ("00000101", "1 2 3 4 6 5 7", 44),
        ("00001100", "1 2 3 4 5 7", 39),
    ],
)
def test_enrolment_scenarios(
    enrolment_graph, enrolment_weights, enrolment_layout, bits, nodes, expected
):
    evaluator = FitnessEvaluator(enrolment_graph, enrolment_weights, enrolment_layout)
    path = evaluator.evaluate(Chromosome(bits=bits))
    assert path.nodes == nodes.split()
    assert path.fitness == expected
    assert not path.aliased


def test_back_edge_resumes_at_nearest_unvisited(enrolment_graph, enrolment_layout):
    """6 -> 4 hits a visited node; the walk resumes at 5, the closest unvisited."""
    path = decode_path(enrolment_graph, enrolment_layout, Chromosome(bits="00000101"))
    assert path.edge_labels == ["e1", "e2", "e5", "e10"]
    assert path.nodes[-2:] == ["5", "7"]


def test_short_codes_alias_modulo_outdegree(enrolment_graph, enrolment_layout):
    aliased = decode_path(enrolment_graph, enrolment_layout, Chromosome(bits="10000000"))
    plain = decode_path(enrolment_graph, enrolment_layout, Chromosome(bits="00000000"))
    assert aliased.aliased
    assert aliased.nodes == plain.nodes


def test_three_way_aliasing():
    graph = build_graph(parse_model(THREE_WAY).models[0])
    layout = make_layout(graph)
    assert layout.total_bits == 2

    paths = {
        bits: decode_path(graph, layout, Chromosome(bits=bits))
        for bits in ("00", "01", "10", "11")
    }
    assert [paths[b].nodes[2] for b in ("00", "01", "10")] == ["3", "4", "5"]
    assert paths["11"].nodes == paths["00"].nodes
    assert paths["11"].aliased and not paths["00"].aliased
    assert layout.declared_labels(Chromosome(bits="11")) == ["low"]


def test_every_node_visited_at_most_once(
    shipping_graph, shipping_layout, enrolment_graph, enrolment_layout
):
    for graph, layout in ((shipping_graph, shipping_layout), (enrolment_graph, enrolment_layout)):
        for chromosome in _all(layout):
            path = decode_path(graph, layout, chromosome)
            assert len(path.nodes) == len(set(path.nodes)), chromosome.bits
            assert path.nodes[0] == graph.initial
    print("✓ loop-once test passed")


def test_evaluator_workers_keep_order(enrolment_graph, enrolment_weights, enrolment_layout):
    chromosomes = _all(enrolment_layout)
    serial = FitnessEvaluator(enrolment_graph, enrolment_weights, enrolment_layout)
    pooled = FitnessEvaluator(enrolment_graph, enrolment_weights, enrolment_layout, workers=4)
    assert pooled.evaluate_many(chromosomes) == serial.evaluate_many(chromosomes)


def test_chromosome_helpers():
    c = Chromosome.from_value(5, 4)
    assert c.bits == "0101"
    assert c.value == 5
    assert c.flip(0).bits == "1101"
    assert str(Chromosome.from_value(0, 0)) == ""


def test_self_loop_resumes_at_nearest_unvisited(enrolment_graph, enrolment_layout):
    path = decode_path(enrolment_graph, enrolment_layout, Chromosome(bits="00001100"))
    assert path.edge_labels == ["e1", "e2", "e3"]
    assert path.branches == (("2", 0), ("3", 0), ("4", 3))
    assert path.complete


def test_layout_field_helpers(enrolment_layout):
    assert enrolment_layout.index("4") == 2
    with pytest.raises(KeyError):
        enrolment_layout.index("5")

    assert enrolment_layout.codes_for("2", 1) == [1, 3]
    assert enrolment_layout.codes_for("4", 3) == [3]

    zeros = Chromosome(bits="00000000")
    assert enrolment_layout.with_code(zeros, "4", 3).bits == "00001100"
    assert enrolment_layout.with_code(zeros, "6", 1).bits == "00000001"
    with pytest.raises(LayoutMismatchError):
        enrolment_layout.with_code(Chromosome(bits="0000"), "4", 3)


@pytest.mark.parametrize("fixture", ["shipping", "enrolment"])
def test_walks_agree_with_the_decoder(request, fixture):
    graph = request.getfixturevalue(f"{fixture}_graph")
    layout = request.getfixturevalue(f"{fixture}_layout")

    walks = list(walk_all_paths(graph, layout))
    assert len(walks) == 7
    assert len({walk.choices for walk in walks}) == 7

    for walk in walks:
        chromosome = Chromosome.from_value(0, layout.total_bits)
        for node, branch in walk.choices:
            chromosome = layout.with_code(chromosome, node, branch)
        path = decode_path(graph, layout, chromosome)
        assert path.branches == walk.choices
        assert tuple(path.nodes) == walk.nodes
        assert path.complete == walk.complete


def test_every_chromosome_follows_some_walk(enrolment_graph, enrolment_layout):
    walked = {walk.choices for walk in walk_all_paths(enrolment_graph, enrolment_layout)}
    for chromosome in _all(enrolment_layout):
        assert decode_path(enrolment_graph, enrolment_layout, chromosome).branches in walked
