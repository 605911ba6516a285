import pytest

from arbcolor.models.graph import Graph
from arbcolor.services.generators import disjoint_cliques, union_of_random_forests
from arbcolor.utils.config import reset_settings

from .strategies import complete_graph


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    for key in ("ARBCOLOR_WORKERS", "ARBCOLOR_ROUND_LIMIT", "ARBCOLOR_DISPATCH_THRESHOLD",
                "ARBCOLOR_CHERNOFF_GUARD", "ARBCOLOR_CONGEST_CONSTANT", "ARBCOLOR_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def k6() -> Graph:
    return complete_graph(6)


@pytest.fixture
def forest_union() -> Graph:
    return union_of_random_forests(300, 3, seed=7)


@pytest.fixture
def cliques() -> Graph:
    return disjoint_cliques(40, 3)
