"""Exception hierarchy shared across the package.

Every domain failure derives from :class:`CpgError` so callers (CLI, HTTP
service) can distinguish domain errors from programming errors.
"""

from __future__ import annotations


class CpgError(Exception):
    """Base class for all domain errors raised by this package."""


# --- graph document loading/validation ---

class MalformedDocument(CpgError):
    """The guideline document cannot be parsed or violates the schema."""


class DanglingEdge(CpgError):
    """An edge references a node id that does not exist."""


class DuplicateNodeId(CpgError):
    """Two nodes in the document share the same id."""


class SelfLoop(CpgError):
    """An edge points from a node to itself."""


class UnknownCategoryToken(CpgError):
    """A node category token is not one of the known category names."""


class UnknownRelationToken(CpgError):
    """An edge relation token is not one of the known relation names."""


class UnknownNode(CpgError):
    """A node id was looked up that is not present in the graph."""


# --- enrichment ---

class UnlabeledEndpoint(CpgError):
    """A relation rule was applied to an edge with uncategorized endpoints."""

    def __init__(self, node_ids: list[str]):
        self.node_ids = sorted(node_ids)
        super().__init__(f"uncategorized node(s): {', '.join(self.node_ids)}")


class EmptyExemplarList(CpgError):
    """A few-shot prompt was requested without any exemplars."""


class UnparseableLabel(CpgError):
    """A completion reply contains no recognizable category name."""


class MissingGoldLabel(CpgError):
    """A prediction refers to a node id absent from the gold label map."""


# --- query language ---

class QueryError(CpgError):
    """Base class for query parse failures."""


class QuerySyntaxError(QueryError):
    """Input text does not conform to the query grammar."""

    def __init__(self, position: int, expected: list[str], found: str):
        self.position = position
        self.expected = sorted(expected)
        self.found = found
        super().__init__(
            f"syntax error at offset {position}: expected {' | '.join(self.expected)}, found {found}"
        )


class UnboundVariable(QueryError):
    """A clause references a variable not bound by a preceding MATCH."""


class UnknownLabel(QueryError):
    """A node pattern uses a label outside the three known categories."""


class UnknownProperty(QueryError):
    """A property access names something other than content/context."""


class BoundsError(QueryError):
    """Variable-length hop bounds are out of range."""


class ResultLimitExceeded(CpgError):
    """Query evaluation produced more rows than the configured cap."""


class OracleSizeExceeded(CpgError):
    """The brute-force path oracle was asked to run on too large a graph."""


# --- answer rendering ---

class UnlabeledPathElement(CpgError):
    """A path cannot be rendered because a node or edge is unlabeled."""


class NoPathInResults(CpgError):
    """Rendering was requested for a result set with no path projections."""


# --- completion client / pipeline ---

class ClientFailure(CpgError):
    """A completion client failed after exhausting its retry budget."""

    def __init__(self, kind: str, detail: str = ""):
        self.kind = kind
        self.detail = detail
        super().__init__(f"completion failed ({kind}){': ' + detail if detail else ''}")
