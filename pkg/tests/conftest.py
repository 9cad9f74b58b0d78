"""
Shared fixtures: the bundled policy documents and knowledge bases built from them
"""
from pathlib import Path
from typing import Optional, Sequence

import pytest
from rdflib import Graph

from rdf.turtle import parse_turtle
from reasoner.knowledge_base import assemble
from reasoner.models import KnowledgeBase

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

ALICE = "http://a.b/alice#card"
PAYMENT_URI = "http://a.b/payment-info"
ADDRESS_URI = "http://a.b/address"
SHOE_URI = "http://a.b/shoe-size"
HISTORY_URI = "http://a.b/purchase-history"
HAPPY_SHOP = "http://happy.shop"
DUCKPAY = "http://duckpay.com/"

ALL_FIXTURES = sorted(path.name for path in FIXTURES.glob("*.ttl"))


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def fixture_graph(name: str) -> Graph:
    return parse_turtle(fixture_text(name))


def happyshop_kb(app_text: Optional[str] = None, data: Sequence[str] = ("payment-info.ttl", "address.ttl"),
                 **kwargs) -> KnowledgeBase:
    """HappyShop knowledge base, optionally with a modified app document"""
    app_graph = parse_turtle(app_text) if app_text is not None else fixture_graph("happyshop-app.ttl")
    return assemble(
        fixture_graph("alice-context.ttl"),
        app_graph,
        [fixture_graph(name) for name in data],
        **kwargs,
    )


@pytest.fixture
def payment_graph() -> Graph:
    return fixture_graph("payment-info.ttl")


@pytest.fixture
def happyshop_text() -> str:
    return fixture_text("happyshop-app.ttl")


@pytest.fixture
def kb() -> KnowledgeBase:
    return happyshop_kb()


@pytest.fixture
def research_kb() -> KnowledgeBase:
    return assemble(
        fixture_graph("research-context.ttl"),
        fixture_graph("research-app.ttl"),
        [fixture_graph("shoe-size.ttl")],
    )
