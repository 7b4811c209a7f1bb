"""Guideline knowledge-graph engine with query-based question answering.

Models clinical-practice-guideline flows as a typed directed graph,
enriches nodes and relations, answers path queries through a
Cypher-compatible subset, and renders matched paths as template-
constrained natural-language answers.
"""

from .completion import (
    CompletionOutcome,
    CompletionRequest,
    HttpCompletionClient,
    MockCompletionClient,
    replay_client,
)
from .cql import EngineLimits, PathMatch, ResultSet, evaluate, parse_query, render_query
from .enrichment import (
    AccuracyReport,
    ClassificationResult,
    Exemplar,
    build_few_shot_prompt,
    build_zero_shot_prompt,
    classify_nodes,
    heuristic_categorize,
    label_all_relations,
    label_relation,
    parse_category_reply,
    score_classification,
)
from .graph import (
    GraphStats,
    GuidelineEdge,
    GuidelineGraph,
    GuidelineNode,
    NodeCategory,
    RelationType,
    export_graph,
    load_graph,
    neighbors,
    stats,
)
from .pipeline import (
    AskResult,
    ErrorType,
    EvalReport,
    QaQuestion,
    ask,
    build_query_prompt,
    classify_error,
    generate_query,
    load_questions,
    run_eval,
)
from .render import RenderedAnswer, render_path, render_subgraph, template_for

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "AskResult",
    "ClassificationResult",
    "CompletionOutcome",
    "CompletionRequest",
    "EngineLimits",
    "ErrorType",
    "EvalReport",
    "Exemplar",
    "GraphStats",
    "GuidelineEdge",
    "GuidelineGraph",
    "GuidelineNode",
    "HttpCompletionClient",
    "MockCompletionClient",
    "NodeCategory",
    "PathMatch",
    "QaQuestion",
    "RelationType",
    "RenderedAnswer",
    "ResultSet",
    "ask",
    "build_few_shot_prompt",
    "build_query_prompt",
    "build_zero_shot_prompt",
    "classify_error",
    "classify_nodes",
    "evaluate",
    "export_graph",
    "generate_query",
    "heuristic_categorize",
    "label_all_relations",
    "label_relation",
    "load_graph",
    "load_questions",
    "neighbors",
    "parse_category_reply",
    "parse_query",
    "render_path",
    "render_query",
    "render_subgraph",
    "replay_client",
    "run_eval",
    "score_classification",
    "stats",
    "template_for",
]
