"""
Shared pytest fixtures: fixture file paths and pre-built graphs.
"""

from pathlib import Path

import pytest

from backend.prioritizer.complexity.complexity_analyzer import total_complexity
from backend.prioritizer.encoding.path_encoder import make_layout
from backend.prioritizer.graph.graph_builder import build_graph
from backend.prioritizer.orchestrator import load_model

FIXTURES = Path(__file__).parent / "fixtures"
SHIPPING_MODEL = FIXTURES / "shipping_order.model"
SHIPPING_JSON = FIXTURES / "shipping_order.json"
ENROLMENT_MODEL = FIXTURES / "student_enrolment.model"
ENROLMENT_JSON = FIXTURES / "student_enrolment.json"


@pytest.fixture(scope="session")
def shipping_path() -> Path:
    return SHIPPING_MODEL


@pytest.fixture(scope="session")
def enrolment_path() -> Path:
    return ENROLMENT_MODEL


@pytest.fixture(scope="session")
def shipping_graph():
    return build_graph(load_model(SHIPPING_MODEL, "ShippingOrder"))


@pytest.fixture(scope="session")
def modify_order_graph():
    return build_graph(load_model(SHIPPING_MODEL, "ModifyOrder"))


@pytest.fixture(scope="session")
def enrolment_graph():
    return build_graph(load_model(ENROLMENT_MODEL))


@pytest.fixture(scope="session")
def shipping_weights(shipping_graph):
    return total_complexity(shipping_graph)


@pytest.fixture(scope="session")
def enrolment_weights(enrolment_graph):
    return total_complexity(enrolment_graph)


@pytest.fixture(scope="session")
def shipping_layout(shipping_graph):
    return make_layout(shipping_graph)


@pytest.fixture(scope="session")
def enrolment_layout(enrolment_graph):
    return make_layout(enrolment_graph)
