from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from cpgqa.cql.evaluator import PathMatch
from cpgqa.graph import (
    GuidelineEdge,
    GuidelineGraph,
    GuidelineNode,
    NodeCategory,
    RelationType,
    load_graph,
)

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"

CATEGORIES = list(NodeCategory)
RELATIONS = list(RelationType)


@pytest.fixture(scope="session")
def fixture_graph() -> GuidelineGraph:
    return load_graph((FIXTURES / "nscl-mini.json").read_bytes())


@pytest.fixture(scope="session")
def fixture_document() -> dict:
    return json.loads((FIXTURES / "nscl-mini.json").read_text(encoding="utf-8"))


def read_fixture(*parts: str) -> bytes:
    return FIXTURES.joinpath(*parts).read_bytes()


def read_query(name: str) -> str:
    return (FIXTURES / "queries" / name).read_text(encoding="utf-8")


def make_graph(node_specs, edge_specs, version="test") -> GuidelineGraph:
    """node_specs: (id, category) or (id, category, content); edges: (src, dst, relation)."""
    nodes = []
    for spec in node_specs:
        node_id, category = spec[0], spec[1]
        content = spec[2] if len(spec) > 2 else f"content of {node_id}"
        nodes.append(GuidelineNode(id=node_id, content=content, category=category))
    edges = [GuidelineEdge(source=s, target=t, relation=r) for s, t, r in edge_specs]
    return GuidelineGraph(version=version, nodes=tuple(nodes), edges=tuple(edges))


def random_labeled_graph(rng: random.Random, max_nodes: int = 12, max_edges: int = 30) -> GuidelineGraph:
    """Random fully-labeled graph with bounded density (for oracle cross-checks)."""
    node_count = rng.randint(2, max_nodes)
    nodes = tuple(
        GuidelineNode(
            id=f"n{i:02d}",
            content=f"node {i} {rng.choice(['alpha', 'beta', 'gamma', 'delta'])}",
            context=rng.choice([None, "", "page label", "Clinical stage"]),
            category=rng.choice(CATEGORIES),
        )
        for i in range(node_count)
    )
    edge_limit = min(max_edges, int(2.5 * node_count))
    edges: set[tuple[str, str, RelationType]] = set()
    for _ in range(rng.randint(0, edge_limit)):
        src, dst = rng.sample(range(node_count), 2)
        edges.add((f"n{src:02d}", f"n{dst:02d}", rng.choice(RELATIONS)))
    return GuidelineGraph(
        version="random",
        nodes=nodes,
        edges=tuple(GuidelineEdge(source=s, target=t, relation=r) for s, t, r in edges),
    )


def assert_valid_path(path: PathMatch, graph: GuidelineGraph, lo: int, hi: int,
                      start_category=None, end_category=None) -> None:
    assert lo <= path.length <= hi
    assert len(set(path.edges)) == len(path.edges)
    for i, edge in enumerate(path.edges):
        assert edge.source == path.nodes[i].id
        assert edge.target == path.nodes[i + 1].id
        assert edge in graph.out_edges(edge.source)
    if start_category is not None:
        assert path.nodes[0].category is start_category
    if end_category is not None:
        assert path.nodes[-1].category is end_category
