"""Exhaustive trail enumeration used to cross-check query evaluation.

Intended for tiny graphs only (tests); the engine itself never calls this.
"""

from __future__ import annotations

from typing import Callable

from ..errors import BoundsError, OracleSizeExceeded
from ..graph import GuidelineEdge, GuidelineGraph, GuidelineNode
from .evaluator import PathMatch

ORACLE_NODE_LIMIT = 12

NodePredicate = Callable[[GuidelineNode], bool]


def enumerate_paths_oracle(
    graph: GuidelineGraph,
    start_predicate: NodePredicate,
    end_predicate: NodePredicate,
    minimum: int,
    maximum: int,
) -> list[PathMatch]:
    """Every directed trail from a start-matching to an end-matching node
    with length in [minimum, maximum], by depth-first enumeration."""
    if len(graph.nodes) > ORACLE_NODE_LIMIT:
        raise OracleSizeExceeded(f"oracle accepts at most {ORACLE_NODE_LIMIT} nodes")
    if minimum < 1:
        raise BoundsError(f"minimum must be >= 1, got {minimum}")
    if maximum < minimum:
        raise BoundsError(f"maximum {maximum} < minimum {minimum}")

    found: list[PathMatch] = []
    nodes_acc: list[GuidelineNode] = []
    edges_acc: list[GuidelineEdge] = []
    used: set[GuidelineEdge] = set()

    def walk(depth: int) -> None:
        here = nodes_acc[-1]
        if depth >= minimum and end_predicate(here):
            found.append(PathMatch(tuple(nodes_acc), tuple(edges_acc)))
        if depth == maximum:
            return
        for edge in graph.out_edges(here.id):
            if edge in used:
                continue
            used.add(edge)
            nodes_acc.append(graph.node(edge.target))
            edges_acc.append(edge)
            walk(depth + 1)
            used.remove(edge)
            nodes_acc.pop()
            edges_acc.pop()

    for start in graph.nodes:
        if not start_predicate(start):
            continue
        nodes_acc.append(start)
        walk(0)
        nodes_acc.pop()

    found.sort(key=lambda p: (p.length, p.node_ids, tuple(e.sort_key() for e in p.edges)))
    return found
