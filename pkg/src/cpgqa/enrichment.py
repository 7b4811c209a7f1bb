"""Node categorization and relation labeling.

Three routes assign node categories: an offline keyword-lexicon heuristic,
and two prompt-based routes (zero-shot and few-shot) that call a text
completion client. Relation types are never predicted: they follow
deterministically from the endpoint categories.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal

from .completion import DEFAULT_MODEL, CompletionClient, CompletionRequest
from .errors import (
    EmptyExemplarList,
    MalformedDocument,
    MissingGoldLabel,
    UnlabeledEndpoint,
    UnparseableLabel,
)
from .graph import GuidelineEdge, GuidelineGraph, GuidelineNode, NodeCategory, RelationType

CLASSIFICATION_MODES = ("heuristic", "zero-shot", "few-shot")

# Substituted for the context slot when a node has no page-top label.
CONTEXT_ABSENT = "Not Available. Use only node text."

ZERO_SHOT_INSTRUCTION = (
    "You are an expert oncologist, and you are interpreting an NCCN Non-small cell "
    "lung cancer guideline. You have decided to categorise the content in each node "
    "of the NCCN CPG graph as either: Disease Condition, Treatment Option, or "
    "Evaluation. Given the following node text from the guideline please assign the "
    "most appropriate label among the ones mentioned. You may use the context "
    "whenever there is a discrepancy between two labels but give major importance "
    "to the node text."
)

DEFAULT_LEXICONS: dict[str, tuple[str, ...]] = {
    "treatment": ("therapy", "chemoradiation", "resection", "RT", "surgery", "treatment"),
    "evaluation": ("scan", "MRI", "biopsy", "testing", "evaluation", "PET", "PFTs"),
}


def truncate_percent(count: int, total: int) -> str:
    """100*count/total truncated (not rounded) to two decimals, as text."""
    if total == 0:
        return "0.00"
    value = (Decimal(100 * count) / Decimal(total)).quantize(Decimal("0.01"), rounding=ROUND_DOWN)
    return str(value)


# --- relation labeling ---


def label_relation(src: NodeCategory | None, dst: NodeCategory | None) -> RelationType:
    """Relation type implied by an ordered pair of endpoint categories.

    Disease condition -> treatment option is ``requires``; evaluation ->
    disease condition is ``indicates``; the remaining seven pairs are
    ``is followed by``.
    """
    if src is None or dst is None:
        raise UnlabeledEndpoint([])
    if src is NodeCategory.DISEASE_CONDITION and dst is NodeCategory.TREATMENT_OPTION:
        return RelationType.REQUIRES
    if src is NodeCategory.EVALUATION and dst is NodeCategory.DISEASE_CONDITION:
        return RelationType.INDICATES
    return RelationType.IS_FOLLOWED_BY


def label_all_relations(graph: GuidelineGraph) -> GuidelineGraph:
    """New graph with every edge relation derived from its endpoint categories."""
    unlabeled = [n.id for n in graph.nodes if n.category is None]
    if unlabeled:
        raise UnlabeledEndpoint(unlabeled)
    edges = tuple(
        GuidelineEdge(
            source=e.source,
            target=e.target,
            relation=label_relation(graph.node(e.source).category, graph.node(e.target).category),
        )
        for e in graph.edges
    )
    return graph.with_edges(edges)


# --- heuristic categorization ---


def load_lexicons(document: bytes | str) -> dict[str, tuple[str, ...]]:
    """Parse a lexicon file: {"treatment": [...], "evaluation": [...]}."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"lexicon file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict) or set(raw) != {"treatment", "evaluation"}:
        raise MalformedDocument("lexicon file must map exactly 'treatment' and 'evaluation'")
    out = {}
    for key, words in raw.items():
        if not isinstance(words, list) or not all(isinstance(w, str) and w for w in words):
            raise MalformedDocument(f"lexicon {key!r} must be a list of words")
        out[key] = tuple(words)
    return out


def _word_hits(text: str, words: tuple[str, ...]) -> int:
    return sum(
        len(re.findall(rf"\b{re.escape(word)}\b", text, flags=re.IGNORECASE)) for word in words
    )


def heuristic_categorize(
    node: GuidelineNode, lexicons: dict[str, tuple[str, ...]] | None = None
) -> NodeCategory:
    """Keyword vote over content, context breaking ties; default disease condition."""
    lex = lexicons or DEFAULT_LEXICONS
    treatment = _word_hits(node.content, lex["treatment"])
    evaluation = _word_hits(node.content, lex["evaluation"])
    if treatment == evaluation and node.context:
        treatment = _word_hits(node.context, lex["treatment"])
        evaluation = _word_hits(node.context, lex["evaluation"])
    if treatment > evaluation:
        return NodeCategory.TREATMENT_OPTION
    if evaluation > treatment:
        return NodeCategory.EVALUATION
    return NodeCategory.DISEASE_CONDITION


# --- prompt building ---


@dataclass(frozen=True)
class Exemplar:
    """A labeled node shown to the completion model in few-shot prompts."""

    content: str
    context: str | None
    label: NodeCategory

    def __post_init__(self) -> None:
        if not self.content.strip():
            raise MalformedDocument("exemplar content is empty")


def load_exemplars(document: bytes | str) -> list[Exemplar]:
    """Parse an exemplar file: [{"content", "context", "label"}]."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"exemplar file is not valid JSON: {exc}") from None
    if not isinstance(raw, list):
        raise MalformedDocument("exemplar file must be an array")
    out = []
    for item in raw:
        if not isinstance(item, dict) or "content" not in item or "label" not in item:
            raise MalformedDocument("exemplar entries need 'content' and 'label'")
        out.append(
            Exemplar(
                content=item["content"],
                context=item.get("context"),
                label=NodeCategory.from_token(item["label"]),
            )
        )
    return out


def _node_lines(content: str, context: str | None) -> str:
    filled = context if context is not None else CONTEXT_ABSENT
    return f"node text: {content}\ncontext: {filled}"


def build_zero_shot_prompt(node: GuidelineNode) -> str:
    """Categorization prompt carrying only the instruction and the node."""
    return f"{ZERO_SHOT_INSTRUCTION}\n{_node_lines(node.content, node.context)}"


def build_few_shot_prompt(node: GuidelineNode, exemplars: list[Exemplar]) -> str:
    """Zero-shot prompt with labeled exemplars inserted before the node lines."""
    if not exemplars:
        raise EmptyExemplarList("few-shot prompt needs at least one exemplar")
    blocks = "\n".join(
        f"{_node_lines(e.content, e.context)}\nlabel: {e.label.display_name}" for e in exemplars
    )
    return (
        f"{ZERO_SHOT_INSTRUCTION}\n"
        f"Here are some examples: {blocks}\n"
        f"{_node_lines(node.content, node.context)}"
    )


def parse_category_reply(reply: str) -> NodeCategory:
    """Category whose display name occurs earliest in the reply, case-insensitive."""
    lowered = reply.lower()
    best: tuple[int, NodeCategory] | None = None
    for category in NodeCategory:
        index = lowered.find(category.display_name.lower())
        if index >= 0 and (best is None or index < best[0]):
            best = (index, category)
    if best is None:
        raise UnparseableLabel(f"no category name in reply: {reply!r}")
    return best[1]


# --- batch classification ---


@dataclass(frozen=True)
class PredictionFailure:
    """Marker for a node whose prediction could not be obtained."""

    reason: str


@dataclass(frozen=True)
class ClassificationResult:
    """Per-node predictions for one classification run."""

    mode: str
    predictions: dict[str, NodeCategory | PredictionFailure]

    def to_payload(self) -> dict:
        out = {}
        for node_id in sorted(self.predictions):
            pred = self.predictions[node_id]
            if isinstance(pred, PredictionFailure):
                out[node_id] = {"failure": pred.reason}
            else:
                out[node_id] = pred.value
        return {"mode": self.mode, "predictions": out}


def _classify_one(
    node: GuidelineNode,
    client: CompletionClient,
    mode: str,
    exemplars: list[Exemplar] | None,
    model: str,
) -> NodeCategory | PredictionFailure:
    if mode == "zero-shot":
        prompt = build_zero_shot_prompt(node)
    else:
        prompt = build_few_shot_prompt(node, exemplars or [])
    outcome = client.complete(CompletionRequest(prompt=prompt, model=model, max_tokens=16))
    if outcome.failure is not None:
        return PredictionFailure(reason=f"client-{outcome.failure.value}")
    try:
        return parse_category_reply(outcome.reply or "")
    except UnparseableLabel:
        return PredictionFailure(reason="unparseable-label")


def classify_nodes(
    graph: GuidelineGraph,
    client: CompletionClient | None = None,
    mode: str = "heuristic",
    exemplars: list[Exemplar] | None = None,
    *,
    lexicons: dict[str, tuple[str, ...]] | None = None,
    model: str = DEFAULT_MODEL,
    parallelism: int = 1,
) -> ClassificationResult:
    """Predict a category for every node in the graph.

    Heuristic mode needs no client; few-shot mode requires exemplars.
    Per-node failures (client errors, unparseable replies) are recorded in
    the result instead of aborting the batch.
    """
    if mode not in CLASSIFICATION_MODES:
        raise ValueError(f"mode must be one of {CLASSIFICATION_MODES}, got {mode!r}")
    if mode == "few-shot" and not exemplars:
        raise EmptyExemplarList("few-shot classification needs exemplars")
    if mode != "heuristic" and client is None:
        raise ValueError(f"{mode} classification needs a completion client")

    if mode == "heuristic":
        predictions = {n.id: heuristic_categorize(n, lexicons) for n in graph.nodes}
        return ClassificationResult(mode=mode, predictions=predictions)

    assert client is not None
    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(
                pool.map(lambda n: _classify_one(n, client, mode, exemplars, model), graph.nodes)
            )
        predictions = {n.id: r for n, r in zip(graph.nodes, results)}
    else:
        predictions = {n.id: _classify_one(n, client, mode, exemplars, model) for n in graph.nodes}
    return ClassificationResult(mode=mode, predictions=predictions)


def apply_classification(graph: GuidelineGraph, result: ClassificationResult) -> GuidelineGraph:
    """New graph with predicted categories applied; failed nodes are unchanged."""
    replacements = {}
    for node_id, pred in result.predictions.items():
        if isinstance(pred, PredictionFailure):
            continue
        node = graph.node(node_id)
        if node.category is not pred:
            replacements[node_id] = GuidelineNode(
                id=node.id, content=node.content, context=node.context,
                category=pred, page=node.page,
            )
    return graph.with_nodes(replacements) if replacements else graph


# --- scoring ---

FAILURE_KEY = "failure"


def load_gold_labels(document: bytes | str) -> dict[str, NodeCategory]:
    """Parse a gold-label file: {"<node-id>": "<category>"}."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"gold-label file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise MalformedDocument("gold-label file must be an object")
    return {node_id: NodeCategory.from_token(token) for node_id, token in raw.items()}


@dataclass(frozen=True)
class AccuracyReport:
    """Classification accuracy against gold labels.

    ``confusion`` rows are predictions (three categories plus a failure
    row), columns are gold categories.
    """

    correct: int
    total: int
    accuracy: str
    confusion: dict[str, dict[str, int]]

    def to_payload(self) -> dict:
        return {
            "correct": self.correct,
            "total": self.total,
            "accuracy": self.accuracy,
            "confusion": self.confusion,
        }


def score_classification(
    predicted: ClassificationResult, gold: dict[str, NodeCategory]
) -> AccuracyReport:
    """Score predictions against gold labels; failures count as incorrect."""
    rows = [c.value for c in NodeCategory] + [FAILURE_KEY]
    confusion = {row: {c.value: 0 for c in NodeCategory} for row in rows}
    correct = 0
    for node_id in sorted(predicted.predictions):
        if node_id not in gold:
            raise MissingGoldLabel(f"no gold label for node {node_id!r}")
        pred = predicted.predictions[node_id]
        actual = gold[node_id]
        row = FAILURE_KEY if isinstance(pred, PredictionFailure) else pred.value
        confusion[row][actual.value] += 1
        if pred is actual:
            correct += 1
    total = len(predicted.predictions)
    return AccuracyReport(
        correct=correct,
        total=total,
        accuracy=truncate_percent(correct, total),
        confusion=confusion,
    )
