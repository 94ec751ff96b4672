"""
Tests for stack-based weights, IF complexity and nested totals.
"""

from unittest.mock import patch

import pytest

from ..graph.graph_builder import build_graph
from ..model.model_parser import parse_model
from ..model.model_validator import resolve_nested
from .complexity_analyzer import if_complexity, nested_complexity, stack_weights, total_complexity

SHIPPING_A = [18, 17, 16, 15, 14, 14, 13, 13, 12, 12, 10, 11, 18, 9, 8, 7, 6, 5, 4, 3, 30, 22]
SHIPPING_B = [0, 1, 1, 2, 1, 1, 2, 2, 1, 2, 2, 1, 1, 1, 2, 2, 2, 1, 1, 2, 2, 0]
SHIPPING_OWN = [18, 18, 17, 17, 15, 15, 15, 15, 13, 14, 12, 12, 19, 10, 10, 9, 8, 6, 5, 5, 32, 22]

NESTED_THREE_LEVELS = """
model activity Outer
node o1 initial
node o2 action
node o3 final
edge o1 -> o2
edge o2 -> o3
nested o2 Middle
end
model activity Middle
node m1 initial
node m2 action
node m3 final
edge m1 -> m2
edge m2 -> m3
nested m2 Inner
end
model activity Inner
node i1 initial
node i2 final
edge i1 -> i2
end
"""


def _graph(text, name):
    bundle = parse_model(text)
    return build_graph(resolve_nested(bundle.find(name), bundle))


def test_shipping_weight_table(shipping_weights):
    """Columns A, B and A + B for the 22 shipping nodes."""
    table = shipping_weights
    assert table.s_max == 18
    assert [row.stack_weight for row in table.rows] == SHIPPING_A
    assert [row.if_complexity for row in table.rows] == SHIPPING_B
    assert [row.own_total for row in table.rows] == SHIPPING_OWN
    print("✓ shipping weight table test passed")


def test_shipping_push_contributions(shipping_weights):
    assert shipping_weights.row("21").contributions == [12, 11, 5, 2]
    assert shipping_weights.row("13").contributions == [12, 6]
    assert shipping_weights.row("22").contributions == [11, 10, 1]
    assert shipping_weights.row("1").contributions == [18]


def test_nested_modify_order(shipping_weights, modify_order_graph):
    sub = shipping_weights.find_nested("9")
    assert sub is not None
    assert sub.s_max == 8
    assert [row.stack_weight for row in sub.rows] == [8, 7, 6, 5, 4, 3, 2, 1]
    assert [row.if_complexity for row in sub.rows] == [0, 1, 2, 1, 1, 2, 1, 0]
    assert [row.total for row in sub.rows] == [8, 8, 8, 6, 5, 5, 3, 1]
    assert sub.grand_total == 44

    row = shipping_weights.row("9")
    assert row.own_total == 13
    assert row.nested_complexity == 44
    assert row.total == 57
    assert nested_complexity(modify_order_graph) == 44
    assert nested_complexity(None) == 0


def test_enrolment_weight_table(enrolment_weights):
    table = enrolment_weights
    assert table.s_max == 6
    assert [row.stack_weight for row in table.rows] == [6, 5, 4, 3, 2, 2, 7]
    assert [row.if_complexity for row in table.rows] == [0, 2, 2, 6, 2, 3, 0]
    assert [row.total for row in table.rows] == [6, 7, 6, 9, 4, 5, 7]
    assert table.row("7").contributions == [4, 2, 1]
    print("✓ enrolment weight table test passed")


def test_pinned_values_keep_the_computed_product(enrolment_weights, enrolment_graph):
    pinned = [row.node for row in enrolment_weights.rows if row.pinned]
    assert pinned == ["5", "6"]

    row = enrolment_weights.row("6")
    assert row.if_computed == if_complexity(enrolment_graph, "6") == 2
    assert row.if_complexity == 3
    assert enrolment_weights.row("4").if_computed == 6
    assert not enrolment_weights.row("4").pinned


def test_shipping_pins(shipping_weights):
    assert [row.node for row in shipping_weights.rows if row.pinned] == ["7", "13", "15", "21"]


@pytest.mark.parametrize("length", [2, 3, 5, 9])
def test_chain_weights_count_down(length):
    """A straight chain of n nodes gets stack weights n, n-1, ..., 1."""
    lines = ["model activity Chain", "node 1 initial"]
    lines += [f"node {i} action" for i in range(2, length)]
    lines += [f"node {length} final"]
    lines += [f"edge {i} -> {i + 1}" for i in range(1, length)]
    lines.append("end")
    table, trace = stack_weights(_graph("\n".join(lines) + "\n", "Chain"))

    assert table.s_max == length
    assert [row.stack_weight for row in table.rows] == list(range(length, 0, -1))
    assert len(trace.pushes) == length


def test_three_level_nesting():
    table = total_complexity(_graph(NESTED_THREE_LEVELS, "Outer"))
    middle = table.find_nested("o2")
    inner = middle.find_nested("m2")

    assert [row.total for row in inner.rows] == [2, 1]
    assert inner.grand_total == 3
    assert middle.row("m2").total == 6
    assert middle.grand_total == 10
    assert table.row("o2").total == 13
    print("✓ three level nesting test passed")


def test_host_totals_go_through_nested_complexity(shipping_graph):
    with patch(
        "backend.prioritizer.complexity.complexity_analyzer.nested_complexity",
        wraps=nested_complexity,
    ) as aggregate:
        table = total_complexity(shipping_graph)

    hosts = [call.args[0] for call in aggregate.call_args_list if call.args[0] is not None]
    assert [sub.name for sub in hosts] == ["ModifyOrder"]
    assert table.row("9").nested_complexity == 44
    assert aggregate.call_count == len(shipping_graph) + len(hosts[0])


def test_stack_trace_is_balanced(shipping_graph):
    table, trace = stack_weights(shipping_graph)
    pushes = [e for e in trace.events if e.op == "push"]
    pops = [e for e in trace.events if e.op == "pop"]
    assert len(pushes) == len(pops)
    assert max(e.size for e in trace.events) == trace.s_max == table.s_max
    assert trace.events[-1].size == 0
    assert len(pushes) == sum(len(row.push_log) for row in table.rows)


def test_weights_are_deterministic(shipping_graph, shipping_weights):
    assert total_complexity(shipping_graph) == shipping_weights


def test_csv_records(enrolment_weights):
    records = enrolment_weights.as_records()
    assert records[6] == {"node": "7", "A": 7, "B": 0, "total": 7, "push_contributions": "4;2;1"}
