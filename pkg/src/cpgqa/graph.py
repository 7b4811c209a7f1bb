"""Guideline graph data model and on-disk document format.

A guideline graph is an immutable directed property graph. Nodes carry the
flow-box text (``content``), the page-top label (``context``), an optional
category, and a page tag. Edges are typed by a relation that is fully
determined by the endpoint categories once the graph is enriched.

The on-disk format is a UTF-8 JSON document::

    {"@context": "...", "version": "...", "nodes": [...], "edges": [...]}

Loading validates referential integrity and rejects self-loops, duplicate
ids, duplicate edge triples, and unknown tokens. Exporting is byte-stable:
keys are emitted in a fixed order, nodes sorted by id, edges sorted by
(source, target, relation).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    DanglingEdge,
    DuplicateNodeId,
    MalformedDocument,
    SelfLoop,
    UnknownCategoryToken,
    UnknownNode,
    UnknownRelationToken,
)

DOCUMENT_CONTEXT_IRI = "https://example.org/cpg/v1"

# Node properties the upstream extractor emits but the QA system discards.
DROPPED_NODE_PROPERTIES = frozenset({"footnotes", "t_score", "m_score", "prev", "n_score"})

_NODE_KEYS = ("id", "content", "context", "category", "page")
_EDGE_KEYS = ("source", "target", "relation")


class NodeCategory(Enum):
    """The three-way taxonomy of guideline flow elements."""

    DISEASE_CONDITION = "DiseaseCondition"
    TREATMENT_OPTION = "TreatmentOption"
    EVALUATION = "Evaluation"

    @property
    def display_name(self) -> str:
        """Human-readable name, e.g. ``Disease Condition``."""
        return _CATEGORY_DISPLAY[self]

    @property
    def query_label(self) -> str:
        """Underscore form used as a node label in queries."""
        return _CATEGORY_LABEL[self]

    @classmethod
    def from_token(cls, token: str) -> NodeCategory:
        try:
            return cls(token)
        except ValueError:
            raise UnknownCategoryToken(f"unknown category token: {token!r}") from None


_CATEGORY_DISPLAY = {
    NodeCategory.DISEASE_CONDITION: "Disease Condition",
    NodeCategory.TREATMENT_OPTION: "Treatment Option",
    NodeCategory.EVALUATION: "Evaluation",
}
_CATEGORY_LABEL = {
    NodeCategory.DISEASE_CONDITION: "Disease_Condition",
    NodeCategory.TREATMENT_OPTION: "Treatment_Option",
    NodeCategory.EVALUATION: "Evaluation",
}


class RelationType(Enum):
    """The three-way taxonomy of edges between guideline flow elements."""

    REQUIRES = "requires"
    INDICATES = "indicates"
    IS_FOLLOWED_BY = "isFollowedBy"

    @property
    def display_name(self) -> str:
        return _RELATION_DISPLAY[self]

    @classmethod
    def from_token(cls, token: str) -> RelationType:
        try:
            return cls(token)
        except ValueError:
            raise UnknownRelationToken(f"unknown relation token: {token!r}") from None


_RELATION_DISPLAY = {
    RelationType.REQUIRES: "requires",
    RelationType.INDICATES: "indicates",
    RelationType.IS_FOLLOWED_BY: "is followed by",
}


@dataclass(frozen=True)
class GuidelineNode:
    """One flow element of a guideline page.

    ``context`` distinguishes absence (None) from empty text; ``category``
    is None while the node is unlabeled.
    """

    id: str
    content: str
    context: str | None = None
    category: NodeCategory | None = None
    page: str | None = None

    def __post_init__(self) -> None:
        if not self.content.strip():
            raise MalformedDocument(f"node {self.id!r}: content is empty")


@dataclass(frozen=True)
class GuidelineEdge:
    """A directed edge between two nodes; relation None while unlabeled."""

    source: str
    target: str
    relation: RelationType | None = None

    def sort_key(self) -> tuple[str, str, str]:
        return (self.source, self.target, self.relation.value if self.relation else "")


@dataclass(frozen=True)
class GuidelineGraph:
    """Immutable directed property graph of guideline nodes and relations.

    Safe to share across concurrent readers; enrichment produces new graph
    values instead of mutating.
    """

    version: str
    nodes: tuple[GuidelineNode, ...]
    edges: tuple[GuidelineEdge, ...]
    _by_id: dict[str, GuidelineNode] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _out: dict[str, tuple[GuidelineEdge, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _in: dict[str, tuple[GuidelineEdge, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        nodes = tuple(sorted(self.nodes, key=lambda n: n.id))
        edges = tuple(sorted(self.edges, key=GuidelineEdge.sort_key))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)
        by_id: dict[str, GuidelineNode] = {}
        for node in nodes:
            if node.id in by_id:
                raise DuplicateNodeId(f"duplicate node id: {node.id!r}")
            by_id[node.id] = node
        out: dict[str, list[GuidelineEdge]] = {n.id: [] for n in nodes}
        inc: dict[str, list[GuidelineEdge]] = {n.id: [] for n in nodes}
        seen: set[tuple[str, str, RelationType | None]] = set()
        for edge in edges:
            if edge.source == edge.target:
                raise SelfLoop(f"self-loop on node {edge.source!r}")
            for endpoint in (edge.source, edge.target):
                if endpoint not in by_id:
                    raise DanglingEdge(f"edge endpoint {endpoint!r} is not a node")
            triple = (edge.source, edge.target, edge.relation)
            if triple in seen:
                raise MalformedDocument(
                    f"duplicate edge {edge.source!r}->{edge.target!r} ({edge.relation})"
                )
            seen.add(triple)
            out[edge.source].append(edge)
            inc[edge.target].append(edge)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})
        object.__setattr__(self, "_in", {k: tuple(v) for k, v in inc.items()})

    def node(self, node_id: str) -> GuidelineNode:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node id: {node_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._by_id

    def out_edges(self, node_id: str) -> tuple[GuidelineEdge, ...]:
        self.node(node_id)
        return self._out[node_id]

    def in_edges(self, node_id: str) -> tuple[GuidelineEdge, ...]:
        self.node(node_id)
        return self._in[node_id]

    def with_nodes(self, replacements: dict[str, GuidelineNode]) -> GuidelineGraph:
        """Return a new graph with the given nodes replaced (keyed by id)."""
        for node_id in replacements:
            self.node(node_id)
        nodes = tuple(replacements.get(n.id, n) for n in self.nodes)
        return GuidelineGraph(version=self.version, nodes=nodes, edges=self.edges)

    def with_edges(self, edges: tuple[GuidelineEdge, ...]) -> GuidelineGraph:
        return GuidelineGraph(version=self.version, nodes=self.nodes, edges=edges)


@dataclass(frozen=True)
class GraphStats:
    """Node counts per category and edge counts per relation type."""

    nodes_by_category: dict[str, int]
    node_total: int
    edges_by_relation: dict[str, int]
    edge_total: int

    def to_payload(self) -> dict:
        return {
            "nodes": {**self.nodes_by_category, "total": self.node_total},
            "edges": {**self.edges_by_relation, "total": self.edge_total},
        }


def stats(graph: GuidelineGraph) -> GraphStats:
    """Count nodes per category and edges per relation; unlabeled counted separately."""
    node_counts = {c.value: 0 for c in NodeCategory}
    node_counts["unlabeled"] = 0
    for node in graph.nodes:
        node_counts[node.category.value if node.category else "unlabeled"] += 1
    edge_counts = {r.value: 0 for r in RelationType}
    edge_counts["unlabeled"] = 0
    for edge in graph.edges:
        edge_counts[edge.relation.value if edge.relation else "unlabeled"] += 1
    return GraphStats(
        nodes_by_category=node_counts,
        node_total=len(graph.nodes),
        edges_by_relation=edge_counts,
        edge_total=len(graph.edges),
    )


def neighbors(
    graph: GuidelineGraph, node_id: str, direction: str = "outgoing"
) -> list[tuple[GuidelineEdge, GuidelineNode]]:
    """Adjacent (edge, node) pairs, ordered by relation type name then neighbor id."""
    if direction not in ("outgoing", "incoming"):
        raise ValueError(f"direction must be 'outgoing' or 'incoming', got {direction!r}")
    if direction == "outgoing":
        pairs = [(e, graph.node(e.target)) for e in graph.out_edges(node_id)]
    else:
        pairs = [(e, graph.node(e.source)) for e in graph.in_edges(node_id)]
    # "~" sorts after any label name, so unlabeled edges come last
    pairs.sort(key=lambda p: (p[0].relation.name if p[0].relation else "~", p[1].id))
    return pairs


def _require_keys(obj: dict, allowed: tuple[str, ...], kind: str, dropped: frozenset = frozenset()):
    unknown = set(obj) - set(allowed) - dropped
    if unknown:
        raise MalformedDocument(f"{kind} has unknown key(s): {', '.join(sorted(unknown))}")


def _opt_text(obj: dict, key: str, kind: str) -> str | None:
    value = obj.get(key)
    if value is None:
        return None
    if not isinstance(value, str):
        raise MalformedDocument(f"{kind}: {key!r} must be text or null")
    return value


def load_graph(document: bytes | str) -> GuidelineGraph:
    """Parse and validate a guideline document.

    Unknown node properties in :data:`DROPPED_NODE_PROPERTIES` are discarded;
    any other unknown key is rejected rather than silently accepted.
    """
    try:
        raw = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise MalformedDocument("document root must be an object")
    _require_keys(raw, ("@context", "version", "nodes", "edges"), "document")
    for key in ("@context", "version", "nodes", "edges"):
        if key not in raw:
            raise MalformedDocument(f"document is missing {key!r}")
    if not isinstance(raw["version"], str):
        raise MalformedDocument("'version' must be text")
    if not isinstance(raw["nodes"], list) or not isinstance(raw["edges"], list):
        raise MalformedDocument("'nodes' and 'edges' must be arrays")

    nodes = []
    for item in raw["nodes"]:
        if not isinstance(item, dict):
            raise MalformedDocument("node entries must be objects")
        _require_keys(item, _NODE_KEYS, "node", DROPPED_NODE_PROPERTIES)
        if not isinstance(item.get("id"), str) or not item["id"]:
            raise MalformedDocument("node is missing a text 'id'")
        if not isinstance(item.get("content"), str):
            raise MalformedDocument(f"node {item['id']!r} is missing text 'content'")
        token = item.get("category")
        category = None
        if token is not None:
            if not isinstance(token, str):
                raise UnknownCategoryToken(f"node {item['id']!r}: category must be text or null")
            category = NodeCategory.from_token(token)
        nodes.append(
            GuidelineNode(
                id=item["id"],
                content=item["content"],
                context=_opt_text(item, "context", f"node {item['id']!r}"),
                category=category,
                page=_opt_text(item, "page", f"node {item['id']!r}"),
            )
        )

    edges = []
    for item in raw["edges"]:
        if not isinstance(item, dict):
            raise MalformedDocument("edge entries must be objects")
        _require_keys(item, _EDGE_KEYS, "edge")
        for key in ("source", "target"):
            if not isinstance(item.get(key), str) or not item[key]:
                raise MalformedDocument(f"edge is missing a text {key!r}")
        token = item.get("relation")
        relation = None
        if token is not None:
            if not isinstance(token, str):
                raise UnknownRelationToken("edge relation must be text or null")
            relation = RelationType.from_token(token)
        edges.append(GuidelineEdge(source=item["source"], target=item["target"], relation=relation))

    return GuidelineGraph(version=raw["version"], nodes=tuple(nodes), edges=tuple(edges))


def export_graph(graph: GuidelineGraph) -> bytes:
    """Serialize a graph to the on-disk document format (round-trips with load_graph)."""
    doc = {
        "@context": DOCUMENT_CONTEXT_IRI,
        "version": graph.version,
        "nodes": [
            {
                "id": n.id,
                "content": n.content,
                "context": n.context,
                "category": n.category.value if n.category else None,
                "page": n.page,
            }
            for n in graph.nodes
        ],
        "edges": [
            {
                "source": e.source,
                "target": e.target,
                "relation": e.relation.value if e.relation else None,
            }
            for e in graph.edges
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")
