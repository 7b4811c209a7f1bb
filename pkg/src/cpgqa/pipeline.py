"""End-to-end question answering and query-generation evaluation.

A question flows through four steps: prompt the completion client with
schema plus train exemplars, take the generated query, classify it against
the error taxonomy (syntax / content matching / connection length), and
when clean, evaluate it and render the matched paths. The evaluation
harness aggregates error occurrences per question set with truncated
two-decimal percentages.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

from .completion import DEFAULT_MODEL, CompletionClient, CompletionRequest
from .cql.ast import Hop, MatchClause, PathPattern, QueryAst, WhereClause
from .cql.evaluator import EngineLimits, evaluate, filter_matches, has_any_match
from .cql.parser import parse_query
from .enrichment import truncate_percent
from .errors import ClientFailure, MalformedDocument, QueryError
from .graph import GuidelineGraph, NodeCategory, RelationType
from .render import RenderedAnswer, render_subgraph

QUESTION_SETS = ("A", "B")
SPLITS = ("train", "test")


@dataclass(frozen=True)
class QaQuestion:
    id: str
    text: str
    qset: str
    split: str
    gold_query: str | None = None
    expected_literals: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.qset not in QUESTION_SETS:
            raise MalformedDocument(f"question {self.id!r}: set must be one of {QUESTION_SETS}")
        if self.split not in SPLITS:
            raise MalformedDocument(f"question {self.id!r}: split must be one of {SPLITS}")
        if self.split == "train" and not self.gold_query:
            raise MalformedDocument(f"train question {self.id!r} is missing its gold query")


def load_questions(document: bytes | str) -> list[QaQuestion]:
    """Parse a question dataset file."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"dataset is not valid JSON: {exc}") from None
    if not isinstance(raw, list):
        raise MalformedDocument("dataset must be an array of questions")
    questions = []
    for item in raw:
        if not isinstance(item, dict):
            raise MalformedDocument("dataset entries must be objects")
        literals = item.get("expectedLiterals")
        questions.append(
            QaQuestion(
                id=str(item.get("id", "")),
                text=item.get("text", ""),
                qset=item.get("set", ""),
                split=item.get("split", ""),
                gold_query=item.get("goldQuery"),
                expected_literals=tuple(literals) if literals else None,
            )
        )
    return questions


def train_exemplars(questions: list[QaQuestion]) -> list[tuple[str, str]]:
    """(question, gold query) pairs from the train split, in dataset order."""
    return [(q.text, q.gold_query or "") for q in questions if q.split == "train"]


# --- prompt building ---


def default_schema_summary() -> str:
    labels = ", ".join(c.query_label for c in NodeCategory)
    relations = ", ".join(r.value for r in RelationType)
    return (
        f"Node labels: {labels}\n"
        f"Relationship types: {relations}\n"
        "Node properties: content, context"
    )


def build_query_prompt(
    schema_summary: str, exemplars: list[tuple[str, str]], question: str
) -> str:
    """Deterministic text-to-query prompt: schema, exemplar pairs, target question."""
    if not exemplars:
        raise MalformedDocument("query prompt needs at least one exemplar")
    pairs = "".join(f"Question: {q}\nQuery: {c}\n" for q, c in exemplars)
    return (
        "Translate the question about a cancer clinical practice guideline into a "
        "Cypher query over the guideline knowledge graph.\n"
        "Schema:\n"
        f"{schema_summary}\n"
        "Here are some example translations:\n"
        f"{pairs}"
        f"Question: {question}\n"
        "Query:"
    )


_FENCE = re.compile(r"^```[A-Za-z]*\s*\n(.*?)\n?```$", re.DOTALL)


def strip_code_fences(text: str) -> str:
    text = text.strip()
    match = _FENCE.match(text)
    if match:
        return match.group(1).strip()
    return text


def generate_query(
    question: QaQuestion | str,
    client: CompletionClient,
    *,
    exemplars: list[tuple[str, str]],
    schema_summary: str | None = None,
    model: str = DEFAULT_MODEL,
) -> str:
    """Obtain a raw query for a question; trims whitespace and code fences only."""
    text = question.text if isinstance(question, QaQuestion) else question
    prompt = build_query_prompt(schema_summary or default_schema_summary(), exemplars, text)
    outcome = client.complete(CompletionRequest(prompt=prompt, model=model, max_tokens=256))
    if outcome.failure is not None:
        raise ClientFailure(outcome.failure.value)
    return strip_code_fences(outcome.reply or "")


# --- error taxonomy ---


class ErrorType(Enum):
    TYPE_I = "typeI"
    TYPE_II = "typeII"
    TYPE_III = "typeIII"
    NO_ERROR = "noError"

    @property
    def display_name(self) -> str:
        return {
            ErrorType.TYPE_I: "Type-I",
            ErrorType.TYPE_II: "Type-II",
            ErrorType.TYPE_III: "Type-III",
            ErrorType.NO_ERROR: "No Error",
        }[self]


def _raise_upper_bounds(ast: QueryAst, hop_cap: int) -> QueryAst:
    clauses = []
    for clause in ast.clauses:
        if isinstance(clause, MatchClause):
            patterns = tuple(
                PathPattern(
                    path_variable=p.path_variable,
                    nodes=p.nodes,
                    hops=tuple(
                        Hop(bounds=(h.bounds[0], hop_cap)) if h.bounds else h for h in p.hops
                    ),
                )
                for p in clause.patterns
            )
            clauses.append(MatchClause(patterns=patterns))
        else:
            clauses.append(clause)
    return QueryAst(clauses=tuple(clauses), returns=ast.returns)


def classify_error(
    query_text: str, graph: GuidelineGraph, limits: EngineLimits | None = None
) -> ErrorType:
    """Deterministic proxy for the three-way generated-query error taxonomy.

    Priority order: syntax error, then a filter literal matching no node
    property anywhere in the corpus, then a path-length bound that empties
    a result the global cap would recover, then no error.
    """
    limits = limits or EngineLimits()
    try:
        ast = parse_query(query_text, hop_cap=limits.hop_cap)
    except QueryError:
        return ErrorType.TYPE_I
    for clause in ast.clauses:
        if isinstance(clause, WhereClause):
            for flt in clause.filters:
                if not any(filter_matches(node, flt) for node in graph.nodes):
                    return ErrorType.TYPE_II
    if not has_any_match(ast, graph):
        relaxed = _raise_upper_bounds(ast, limits.hop_cap)
        if has_any_match(relaxed, graph):
            return ErrorType.TYPE_III
    return ErrorType.NO_ERROR


# --- asking ---


@dataclass(frozen=True)
class AskResult:
    query: str
    answers: list[RenderedAnswer]
    error: ErrorType | None

    def to_payload(self) -> dict:
        return {
            "query": self.query,
            "error": self.error.value if self.error else None,
            "answers": [a.to_payload() for a in self.answers],
        }


def ask(
    question_text: str,
    graph: GuidelineGraph,
    client: CompletionClient,
    exemplars: list[tuple[str, str]],
    *,
    limits: EngineLimits | None = None,
    schema_summary: str | None = None,
    model: str = DEFAULT_MODEL,
) -> AskResult:
    """Generate, vet, run, and render; the generated query is always reported."""
    limits = limits or EngineLimits()
    query = generate_query(
        question_text, client, exemplars=exemplars, schema_summary=schema_summary, model=model
    )
    error = classify_error(query, graph, limits)
    answers: list[RenderedAnswer] = []
    if error is ErrorType.NO_ERROR:
        ast = parse_query(query, hop_cap=limits.hop_cap)
        results = evaluate(ast, graph, limits)
        if len(results):
            answers = render_subgraph(results)
    return AskResult(
        query=query,
        answers=answers,
        error=None if error is ErrorType.NO_ERROR else error,
    )


# --- evaluation harness ---


@dataclass(frozen=True)
class EvalReport:
    """Error-occurrence counts per question set with truncated percentages."""

    set_totals: dict[str, int]
    counts: dict[str, dict[ErrorType, int]]
    notes: tuple[tuple[str, str], ...] = field(default_factory=tuple)

    def percent(self, set_name: str, error_type: ErrorType) -> str:
        return truncate_percent(self.counts[set_name][error_type], self.set_totals[set_name])

    def overall_percent(self, error_type: ErrorType) -> str:
        count = sum(self.counts[s][error_type] for s in self.counts)
        total = sum(self.set_totals.values())
        return truncate_percent(count, total)

    def to_payload(self) -> dict:
        sets = {}
        for name in sorted(self.set_totals):
            sets[name] = {
                "total": self.set_totals[name],
                "counts": {e.value: self.counts[name][e] for e in ErrorType},
                "percent": {e.value: self.percent(name, e) for e in ErrorType},
            }
        return {
            "sets": sets,
            "overall": {e.value: self.overall_percent(e) for e in ErrorType},
            "notes": [{"questionId": qid, "note": note} for qid, note in self.notes],
        }

    def format_table(self) -> str:
        names = sorted(self.set_totals)
        header = ["Error Type"]
        header += [f"#Occurrences in Query set {n}" for n in names]
        header += ["Overall Error (%)"]
        rows = [header]
        for error_type in ErrorType:
            row = [error_type.display_name]
            for name in names:
                row.append(f"{self.counts[name][error_type]} ({self.percent(name, error_type)}%)")
            row.append(self.overall_percent(error_type))
            rows.append(row)
        totals = ["Total"] + [str(self.set_totals[n]) for n in names] + ["-"]
        rows.append(totals)
        widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
        lines = ["   ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
                 for row in rows]
        return "\n".join(lines)


def run_eval(
    dataset: list[QaQuestion],
    graph: GuidelineGraph,
    client: CompletionClient,
    *,
    limits: EngineLimits | None = None,
    schema_summary: str | None = None,
    model: str = DEFAULT_MODEL,
    parallelism: int = 1,
) -> EvalReport:
    """Classify every test question's generated query and aggregate per set.

    Train questions serve only as prompt exemplars. A client failure is
    counted as a syntax error with an explanatory note so reports stay
    total.
    """
    limits = limits or EngineLimits()
    exemplars = train_exemplars(dataset)
    test_questions = [q for q in dataset if q.split == "test"]
    if not test_questions:
        raise MalformedDocument("dataset has no test questions")

    def classify_one(question: QaQuestion) -> tuple[str, ErrorType, str | None]:
        try:
            query = generate_query(
                question, client, exemplars=exemplars, schema_summary=schema_summary, model=model
            )
        except ClientFailure as exc:
            return question.qset, ErrorType.TYPE_I, f"{question.id}: counted as Type-I ({exc})"
        return question.qset, classify_error(query, graph, limits), None

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            outcomes = list(pool.map(classify_one, test_questions))
    else:
        outcomes = [classify_one(q) for q in test_questions]

    set_names = sorted({q.qset for q in test_questions})
    counts = {name: {e: 0 for e in ErrorType} for name in set_names}
    totals = {name: 0 for name in set_names}
    notes = []
    for (qset, error_type, note), question in zip(outcomes, test_questions):
        counts[qset][error_type] += 1
        totals[qset] += 1
        if note:
            notes.append((question.id, note))
    return EvalReport(set_totals=totals, counts=counts, notes=tuple(notes))
