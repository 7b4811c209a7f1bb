"""CQL: a Cypher-compatible query subset over guideline graphs."""

from .ast import (
    ContainsFilter,
    Hop,
    MatchClause,
    NodePattern,
    PathPattern,
    QueryAst,
    ReturnClause,
    ReturnItem,
    ReturnKind,
    WhereClause,
    WithClause,
    render_query,
)
from .evaluator import (
    DEFAULT_ROW_CAP,
    EngineLimits,
    PathMatch,
    ResultSet,
    evaluate,
    filter_matches,
    has_any_match,
    serialize_value,
)
from .oracle import ORACLE_NODE_LIMIT, enumerate_paths_oracle
from .parser import DEFAULT_HOP_CAP, parse_query, tokenize

__all__ = [
    "ContainsFilter",
    "Hop",
    "MatchClause",
    "NodePattern",
    "PathPattern",
    "QueryAst",
    "ReturnClause",
    "ReturnItem",
    "ReturnKind",
    "WhereClause",
    "WithClause",
    "render_query",
    "DEFAULT_ROW_CAP",
    "EngineLimits",
    "PathMatch",
    "ResultSet",
    "evaluate",
    "filter_matches",
    "has_any_match",
    "serialize_value",
    "ORACLE_NODE_LIMIT",
    "enumerate_paths_oracle",
    "DEFAULT_HOP_CAP",
    "parse_query",
    "tokenize",
]
