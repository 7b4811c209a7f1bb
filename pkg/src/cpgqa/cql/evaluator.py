"""CQL evaluation over an immutable guideline graph.

Semantics:

- node patterns bind nodes whose category matches the label (no label
  matches any node);
- hops walk directed edges left to right; variable-length hops enumerate
  trails (edges never repeat within one path match, nodes may);
- WHERE is a conjunction of substring filters, case-folded when flagged;
  an absent context never matches;
- multiple MATCH clauses join on shared variables;
- WITH projects the listed variables forward and drops the rest;
- RETURN rows are deduplicated and ordered by (total path length,
  node-id sequence, serialized form).

Evaluation is read-only and deterministic; any number of evaluations may
run concurrently over the same graph.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

from ..errors import ResultLimitExceeded
from ..graph import GuidelineEdge, GuidelineGraph, GuidelineNode
from .ast import (
    ContainsFilter,
    MatchClause,
    PathPattern,
    QueryAst,
    ReturnItem,
    ReturnKind,
    WhereClause,
    WithClause,
)
from .parser import DEFAULT_HOP_CAP

DEFAULT_ROW_CAP = 10_000


@dataclass(frozen=True)
class EngineLimits:
    hop_cap: int = DEFAULT_HOP_CAP
    row_cap: int = DEFAULT_ROW_CAP

    def __post_init__(self) -> None:
        if self.hop_cap < 1 or self.row_cap < 1:
            raise ValueError("caps must be positive")


@dataclass(frozen=True)
class PathMatch:
    """Alternating node/edge sequence; edges are distinct and connected."""

    nodes: tuple[GuidelineNode, ...]
    edges: tuple[GuidelineEdge, ...]

    def __post_init__(self) -> None:
        if len(self.edges) < 1 or len(self.nodes) != len(self.edges) + 1:
            raise ValueError("a path needs k >= 1 edges and k+1 nodes")
        if len(set(self.edges)) != len(self.edges):
            raise ValueError("edges within a path must be distinct")
        for i, edge in enumerate(self.edges):
            if edge.source != self.nodes[i].id or edge.target != self.nodes[i + 1].id:
                raise ValueError(f"edge {i} does not connect its adjacent nodes")

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def identity(self) -> tuple:
        return (self.node_ids, tuple(e.sort_key() for e in self.edges))


Value = PathMatch | GuidelineNode | tuple | str | None

Frame = dict[str, "PathMatch | GuidelineNode"]


@dataclass(frozen=True)
class ResultSet:
    columns: tuple[str, ...]
    rows: list[tuple[Value, ...]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def to_payload(self) -> dict:
        return {
            "columns": list(self.columns),
            "rows": [[serialize_value(v) for v in row] for row in self.rows],
        }

    def paths(self) -> list[PathMatch]:
        """First path value of each row, for rows that carry one."""
        out = []
        for row in self.rows:
            for value in row:
                if isinstance(value, PathMatch):
                    out.append(value)
                    break
        return out


def serialize_value(value: Value):
    if isinstance(value, PathMatch):
        return {
            "nodes": list(value.node_ids),
            "relations": [e.relation.value if e.relation else None for e in value.edges],
        }
    if isinstance(value, GuidelineNode):
        return {
            "id": value.id,
            "content": value.content,
            "context": value.context,
            "category": value.category.value if value.category else None,
            "page": value.page,
        }
    if isinstance(value, tuple):
        return [serialize_value(v) for v in value]
    return value


def _value_identity(value: PathMatch | GuidelineNode) -> tuple:
    if isinstance(value, PathMatch):
        return ("path",) + value.identity()
    return ("node", value.id)


def _pattern_frames(graph: GuidelineGraph, frame: Frame, pattern: PathPattern) -> Iterator[Frame]:
    """All ways to embed one path pattern in the graph, extending a frame."""
    binds: dict = dict(frame)
    nodes_acc: list[GuidelineNode] = []
    edges_acc: list[GuidelineEdge] = []
    used: set[GuidelineEdge] = set()

    def try_bind(np, node) -> tuple[str, ...] | None:
        """Bind the node pattern to a concrete node; None on mismatch,
        else the names to unbind on backtrack."""
        if np.label is not None and node.category is not np.label:
            return None
        if np.variable is None:
            return ()
        bound = binds.get(np.variable)
        if bound is None:
            binds[np.variable] = node
            return (np.variable,)
        return () if isinstance(bound, GuidelineNode) and bound.id == node.id else None

    def emit() -> Frame:
        out = dict(binds)
        if pattern.path_variable is not None:
            out[pattern.path_variable] = PathMatch(tuple(nodes_acc), tuple(edges_acc))
        return out

    def step(hop_index: int) -> Iterator[Frame]:
        if hop_index == len(pattern.hops):
            yield emit()
            return
        hop = pattern.hops[hop_index]
        next_np = pattern.nodes[hop_index + 1]

        def advance_over(edge: GuidelineEdge) -> Iterator[Frame]:
            target = graph.node(edge.target)
            undo = try_bind(next_np, target)
            if undo is None:
                return
            used.add(edge)
            nodes_acc.append(target)
            edges_acc.append(edge)
            yield from step(hop_index + 1)
            used.remove(edge)
            nodes_acc.pop()
            edges_acc.pop()
            for name in undo:
                del binds[name]

        if hop.bounds is None:
            for edge in graph.out_edges(nodes_acc[-1].id):
                if edge not in used:
                    yield from advance_over(edge)
            return

        lo, hi = hop.bounds

        def walk(depth: int) -> Iterator[Frame]:
            here = nodes_acc[-1]
            if depth >= lo:
                undo = try_bind(next_np, here)
                if undo is not None:
                    yield from step(hop_index + 1)
                    for name in undo:
                        del binds[name]
            if depth < hi:
                for edge in graph.out_edges(here.id):
                    if edge in used:
                        continue
                    used.add(edge)
                    nodes_acc.append(graph.node(edge.target))
                    edges_acc.append(edge)
                    yield from walk(depth + 1)
                    used.remove(edge)
                    nodes_acc.pop()
                    edges_acc.pop()

        # the segment end re-checks the pattern at each depth, so walking
        # starts below the pattern-end node without binding it
        yield from walk(0)

    first = pattern.nodes[0]
    bound_start = binds.get(first.variable) if first.variable else None
    candidates = [bound_start] if isinstance(bound_start, GuidelineNode) else graph.nodes
    for start in candidates:
        undo = try_bind(first, start)
        if undo is None:
            continue
        nodes_acc.append(start)
        yield from step(0)
        nodes_acc.pop()
        for name in undo:
            del binds[name]


def filter_matches(node: GuidelineNode, flt: ContainsFilter) -> bool:
    """Substring containment under the filter's case rule; absent context never matches."""
    value = node.content if flt.prop == "content" else node.context
    if value is None:
        return False
    if flt.folded:
        return flt.needle.lower() in value.lower()
    return flt.needle in value


def _filter_ok(frame: Frame, flt: ContainsFilter) -> bool:
    node = frame[flt.variable]
    assert isinstance(node, GuidelineNode)
    return filter_matches(node, flt)


def _frames(ast: QueryAst, graph: GuidelineGraph) -> Iterator[Frame]:
    frames: Iterator[Frame] = iter([{}])
    for clause in ast.clauses:
        if isinstance(clause, MatchClause):

            def apply_match(frames_in, patterns) -> Iterator[Frame]:
                def expand(frame, index) -> Iterator[Frame]:
                    if index == len(patterns):
                        yield frame
                        return
                    for extended in _pattern_frames(graph, frame, patterns[index]):
                        yield from expand(extended, index + 1)

                for frame in frames_in:
                    yield from expand(frame, 0)

            frames = apply_match(frames, clause.patterns)
        elif isinstance(clause, WhereClause):

            def apply_where(frames_in, filters) -> Iterator[Frame]:
                for frame in frames_in:
                    if all(_filter_ok(frame, f) for f in filters):
                        yield frame

            frames = apply_where(frames, clause.filters)
        else:

            def apply_with(frames_in, clause_: WithClause) -> Iterator[Frame]:
                seen = set()
                for frame in frames_in:
                    projected = {v: frame[v] for v in clause_.variables}
                    key = tuple(_value_identity(projected[v]) for v in clause_.variables)
                    if key not in seen:
                        seen.add(key)
                        yield projected

            frames = apply_with(frames, clause)
    return frames


def _project(frame: Frame, item: ReturnItem) -> Value:
    value = frame[item.variable]
    if item.kind is ReturnKind.VARIABLE:
        return value
    if item.kind is ReturnKind.NODES:
        assert isinstance(value, PathMatch)
        return value.nodes
    assert isinstance(value, GuidelineNode)
    return value.content if item.prop == "content" else value.context


def _row_sort_key(values: tuple[Value, ...], serialized: str) -> tuple:
    total = 0
    id_seq: list[str] = []
    for value in values:
        if isinstance(value, PathMatch):
            total += value.length
            id_seq.extend(value.node_ids)
    return (total, tuple(id_seq), serialized)


def evaluate(ast: QueryAst, graph: GuidelineGraph, limits: EngineLimits | None = None) -> ResultSet:
    """Run a parsed query and return its deduplicated, ordered result rows."""
    limits = limits or EngineLimits()
    columns = tuple(item.column_name() for item in ast.returns.items)
    collected: dict[str, tuple[tuple, tuple[Value, ...]]] = {}
    for frame in _frames(ast, graph):
        values = tuple(_project(frame, item) for item in ast.returns.items)
        serialized = json.dumps(
            [serialize_value(v) for v in values], ensure_ascii=False, sort_keys=True
        )
        if serialized in collected:
            continue
        collected[serialized] = (_row_sort_key(values, serialized), values)
        if len(collected) > limits.row_cap:
            raise ResultLimitExceeded(f"more than {limits.row_cap} result rows")
    ordered = sorted(collected.values(), key=lambda pair: pair[0])
    return ResultSet(columns=columns, rows=[values for _, values in ordered])


def has_any_match(ast: QueryAst, graph: GuidelineGraph) -> bool:
    """True when the query produces at least one row; stops at the first."""
    return next(_frames(ast, graph), None) is not None
