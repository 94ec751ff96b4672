"""
Tests for CFG/SDG lowering, fan-in/fan-out queries and DOT export.
"""

import pytest

from backend.shared.errors import GraphBuildError, UnknownNodeError

from ..model.model_parser import parse_model
from ..model.model_validator import resolve_nested
from .dot_export import save_dot_file, to_dot
from .graph_builder import build_cfg, build_graph, build_sdg, fanin_fanout
from .graph_models import GraphKind


def _model(text, name=None):
    bundle = parse_model(text)
    model = bundle.find(name) if name else bundle.models[0]
    return resolve_nested(model, bundle)


def test_shipping_cfg(shipping_graph):
    g = shipping_graph
    assert g.kind == GraphKind.CFG
    assert len(g) == 22
    assert g.initial == "1"
    assert g.finals == frozenset({"22"})
    assert list(g.decision_nodes) == ["4", "7", "8", "16"]
    assert sorted(g.forks) == ["10", "17"]
    assert g.forks["10"].join == "14"
    assert g.forks["17"].join == "20"

    concurrent = {n.id for n in g.nodes if n.concurrent}
    assert concurrent == {"11", "12", "18", "19"}
    print("✓ shipping CFG test passed")


def test_nested_sub_graph_attached(shipping_graph):
    sub = shipping_graph.node("9").nested
    assert sub is not None
    assert sub.node_ids == [f"9.{i}" for i in range(1, 9)]
    assert list(sub.forks) == ["9.3"]
    assert sub.forks["9.3"].join == "9.6"
    assert sub.decision_nodes == ()


def test_modify_order_standalone(modify_order_graph):
    assert len(modify_order_graph) == 8
    assert {n.id for n in modify_order_graph.nodes if n.concurrent} == {"9.4", "9.5"}


def test_straight_line_cfg():
    g = build_cfg(
        _model("model activity L\nnode 1 initial\nnode 2 action\nnode 3 final\n"
               "edge 1 -> 2\nedge 2 -> 3\nend\n")
    )
    assert len(g) == 3
    assert g.decision_nodes == ()


def test_enrolment_sdg(enrolment_graph):
    g = enrolment_graph
    assert g.kind == GraphKind.SDG
    assert g.node_ids == [str(i) for i in range(1, 8)]
    assert list(g.decision_nodes) == ["2", "3", "4", "6"]
    assert [e.label for e in g.out_edges("4")] == ["e11", "e5", "e4", "e3"]
    assert any(e.source == e.target == "4" for e in g.edges)
    print("✓ enrolment SDG test passed")


def test_two_state_machine():
    g = build_sdg(
        _model("model statechart T\nnode a initial\nnode b final\nedge a -> b on go\nend\n")
    )
    assert len(g) == 2
    assert g.decision_nodes == ()


def test_build_errors():
    with pytest.raises(GraphBuildError):
        build_sdg(
            _model("model statechart T\nnode a initial\nnode s state\nnode b final\n"
                   "edge a -> s on go\nedge a -> b on stop\nend\n")
        )
    with pytest.raises(GraphBuildError):
        build_cfg(
            _model("model activity F\nnode 1 initial\nnode 2 fork\nnode 3 action\n"
                   "node 4 action\nnode 5 final\nedge 1 -> 2\nedge 2 -> 3\nedge 2 -> 4\n"
                   "edge 3 -> 5\nedge 4 -> 5\nend\n")
        )
    with pytest.raises(GraphBuildError):
        build_cfg(_model("model statechart T\nnode a initial\nnode b final\nedge a -> b\nend\n"))


def test_fanin_fanout(shipping_graph, enrolment_graph):
    assert fanin_fanout(shipping_graph, "1") == (0, 1)
    assert fanin_fanout(shipping_graph, "4") == (1, 2)
    fanin, fanout = fanin_fanout(enrolment_graph, "4")
    assert fanin * fanout == 6
    assert fanin_fanout(enrolment_graph, "7")[1] == 0

    with pytest.raises(UnknownNodeError):
        fanin_fanout(shipping_graph, "99")


def test_fan_sums_match_distinct_pairs(shipping_graph, enrolment_graph):
    for g in (shipping_graph, enrolment_graph):
        pairs = {(e.source, e.target) for e in g.edges if e.source != e.target}
        fanins = sum(fanin_fanout(g, n)[0] for n in g.node_ids)
        fanouts = sum(fanin_fanout(g, n)[1] for n in g.node_ids)
        assert fanins == fanouts == len(pairs)


def test_build_is_stable(shipping_path):
    text = shipping_path.read_text(encoding="utf-8")
    first = build_graph(_model(text, "ShippingOrder"))
    second = build_graph(_model(text, "ShippingOrder"))
    assert first.decision_nodes == second.decision_nodes
    assert first.edges == second.edges


def test_dot_export(shipping_graph, tmp_path):
    dot = to_dot(shipping_graph)
    assert dot.startswith('digraph "ShippingOrder" {')
    assert '"4" [shape=diamond' in dot
    assert '"4" -> "6" [label="yes"];' in dot
    assert 'subgraph "cluster_9/"' in dot
    assert '"9/9.1"' in dot

    path = save_dot_file(shipping_graph, tmp_path / "shipping.dot")
    assert (tmp_path / "shipping.dot").read_text(encoding="utf-8") == dot
    assert path.endswith("shipping.dot")
