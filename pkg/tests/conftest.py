from __future__ import annotations

from pathlib import Path

import pytest

from exemplar.dsl import parse_schema, parse_tree_spec

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def load_schema(name: str):
    result = parse_schema((FIXTURES / name).read_text())
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.schema


@pytest.fixture(scope="session")
def shop():
    return load_schema("shop.orm")


@pytest.fixture(scope="session")
def prop():
    return load_schema("prop.orm")


@pytest.fixture(scope="session")
def zerosize():
    return load_schema("zerosize.orm")


@pytest.fixture(scope="session")
def shop_tree(shop):
    result = parse_tree_spec((FIXTURES / "shop.tree").read_text(), shop)
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.tree


@pytest.fixture(scope="session")
def shop_labels(shop):
    result = parse_tree_spec((FIXTURES / "shop.tree").read_text(), shop)
    return result.labels
