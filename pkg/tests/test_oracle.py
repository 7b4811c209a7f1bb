import random

import pytest

from cpgqa.cql import enumerate_paths_oracle, evaluate, parse_query
from cpgqa.errors import BoundsError, OracleSizeExceeded
from cpgqa.graph import NodeCategory, RelationType

from conftest import make_graph, random_labeled_graph

DC = NodeCategory.DISEASE_CONDITION
FBY = RelationType.IS_FOLLOWED_BY

ANY = lambda node: True  # noqa: E731


class TestOracle:
    def test_chain(self):
        graph = make_graph([("A", DC), ("B", DC), ("C", DC)], [("A", "B", FBY), ("B", "C", FBY)])
        paths = enumerate_paths_oracle(graph, lambda n: n.id == "A", ANY, 1, 2)
        assert [p.node_ids for p in paths] == [("A", "B"), ("A", "B", "C")]

    def test_cycle_trail_semantics(self):
        graph = make_graph([("A", DC), ("B", DC)], [("A", "B", FBY), ("B", "A", FBY)])
        paths = enumerate_paths_oracle(
            graph, lambda n: n.id == "A", lambda n: n.id == "A", 1, 4
        )
        assert [p.node_ids for p in paths] == [("A", "B", "A")]

    def test_size_guard(self):
        graph = make_graph([(f"x{i}", DC) for i in range(13)], [])
        with pytest.raises(OracleSizeExceeded):
            enumerate_paths_oracle(graph, ANY, ANY, 1, 2)

    def test_bounds_guards(self):
        graph = make_graph([("A", DC)], [])
        with pytest.raises(BoundsError):
            enumerate_paths_oracle(graph, ANY, ANY, 0, 2)
        with pytest.raises(BoundsError):
            enumerate_paths_oracle(graph, ANY, ANY, 3, 2)


def _pattern_query(src_label, dst_label, lo, hi):
    src = f":{src_label.query_label}" if src_label else ""
    dst = f":{dst_label.query_label}" if dst_label else ""
    return parse_query(f"MATCH p=(a{src})-[*{lo}..{hi}]->(b{dst}) RETURN p")


def test_random_graphs_match_oracle():
    rng = random.Random(20240817)
    categories = [None] + list(NodeCategory)
    for _ in range(150):
        graph = random_labeled_graph(rng)
        lo = rng.randint(1, 3)
        hi = rng.randint(lo, 6)
        src_label = rng.choice(categories)
        dst_label = rng.choice(categories)
        ast = _pattern_query(src_label, dst_label, lo, hi)
        result = evaluate(ast, graph)
        got = {p.identity() for p in result.paths()}
        oracle = enumerate_paths_oracle(
            graph,
            lambda n: src_label is None or n.category is src_label,
            lambda n: dst_label is None or n.category is dst_label,
            lo,
            hi,
        )
        expected = {p.identity() for p in oracle}
        assert got == expected
