"""Template-constrained rendering of matched paths into answer text.

Every sentence instantiates a fixed template chosen by (source category,
relation, destination category, first-vs-subsequent position), with node
content substituted verbatim in double quotes. Free-form paraphrasing is
deliberately impossible: answers can only recombine guideline text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .cql.evaluator import PathMatch, ResultSet
from .errors import NoPathInResults, UnlabeledPathElement
from .graph import NodeCategory, RelationType

_DC = NodeCategory.DISEASE_CONDITION
_TO = NodeCategory.TREATMENT_OPTION
_EV = NodeCategory.EVALUATION
_REQ = RelationType.REQUIRES
_IND = RelationType.INDICATES
_FBY = RelationType.IS_FOLLOWED_BY


class Position(Enum):
    FIRST = "first"
    SUBSEQUENT = "subsequent"


@dataclass(frozen=True)
class TemplateKey:
    source: NodeCategory
    relation: RelationType
    destination: NodeCategory
    position: Position


@dataclass(frozen=True)
class Template:
    text: str
    fallback: bool = False

    def fill(self, source: str, destination: str) -> str:
        return self.text.format(source=f'"{source}"', destination=f'"{destination}"')


# The eight canonical (source, relation, destination) rows, each with a
# first-relation and a subsequent-relation variant.
_CANONICAL: dict[tuple[NodeCategory, RelationType, NodeCategory], tuple[str, str]] = {
    (_DC, _REQ, _TO): (
        "If the disease condition is {source}, use the treatment {destination}.",
        "If that disease condition has occurred, use the treatment {destination}.",
    ),
    (_EV, _FBY, _TO): (
        "Evaluate the patient for {source}, then use the treatment {destination}.",
        "After the evaluation, use the treatment {destination}.",
    ),
    (_TO, _FBY, _TO): (
        "After the treatment {source} is over, further use the treatment {destination}.",
        "After the previous treatment is over, further use the treatment {destination}.",
    ),
    (_DC, _FBY, _EV): (
        "If the disease condition is {source}, then evaluate the patient for {destination}.",
        "If that disease condition has occurred, then evaluate the patient for {destination}.",
    ),
    (_TO, _FBY, _EV): (
        "After the treatment {source}, evaluate the patient for {destination}.",
        "After the previous treatment, evaluate the patient for {destination}.",
    ),
    (_TO, _FBY, _DC): (
        "Check if after the treatment {source}, the disease condition {destination} has occurred.",
        "Check if after the previous treatment, the disease condition {destination} has occurred.",
    ),
    (_EV, _IND, _DC): (
        "Evaluate the patient for {source}, check if it indicates the disease condition {destination}.",
        "Based on the evaluation, check if it indicates the disease condition {destination}.",
    ),
    (_DC, _FBY, _DC): (
        "If the current disease condition is {source}, further check if the disease condition is {destination}.",
        "If that disease condition has occurred, further check if the disease condition is {destination}.",
    ),
}

FALLBACK_TEMPLATE = "After {source}, proceed to {destination}."

CANONICAL_ROWS = tuple(_CANONICAL)


def template_for(key: TemplateKey) -> Template:
    """Template for a key; non-canonical keys get the flagged fallback."""
    row = _CANONICAL.get((key.source, key.relation, key.destination))
    if row is None:
        return Template(text=FALLBACK_TEMPLATE, fallback=True)
    return Template(text=row[0] if key.position is Position.FIRST else row[1])


@dataclass(frozen=True)
class RenderedAnswer:
    """One paragraph per path: one sentence per relation, in path order."""

    sentences: tuple[str, ...]
    node_ids: tuple[str, ...]
    fallback_used: bool

    @property
    def text(self) -> str:
        return " ".join(self.sentences)

    def to_payload(self) -> dict:
        return {"nodeIds": list(self.node_ids), "text": self.text, "fallbackUsed": self.fallback_used}


def render_path(path: PathMatch) -> RenderedAnswer:
    """Render one alternating node/relation sequence into a paragraph."""
    sentences = []
    fallback_used = False
    for i, edge in enumerate(path.edges):
        src = path.nodes[i]
        dst = path.nodes[i + 1]
        if src.category is None or dst.category is None:
            offender = src.id if src.category is None else dst.id
            raise UnlabeledPathElement(f"uncategorized node on path: {offender!r}")
        if edge.relation is None:
            raise UnlabeledPathElement(f"untyped edge {edge.source!r}->{edge.target!r}")
        key = TemplateKey(
            source=src.category,
            relation=edge.relation,
            destination=dst.category,
            position=Position.FIRST if i == 0 else Position.SUBSEQUENT,
        )
        template = template_for(key)
        fallback_used = fallback_used or template.fallback
        sentences.append(template.fill(src.content, dst.content))
    return RenderedAnswer(
        sentences=tuple(sentences), node_ids=path.node_ids, fallback_used=fallback_used
    )


def render_subgraph(results: ResultSet) -> list[RenderedAnswer]:
    """One paragraph per path-bearing result row, in result order."""
    paths = results.paths()
    if not paths:
        raise NoPathInResults("result set carries no path projections")
    return [render_path(p) for p in paths]


def answers_payload(answers: list[RenderedAnswer]) -> dict:
    return {"paths": [a.to_payload() for a in answers]}


def normalize_answer_text(text: str) -> str:
    """Comparison form: drop commas adjacent to closing quotes, collapse whitespace."""
    text = re.sub(r'"\s*,', '"', text)
    return re.sub(r"\s+", " ", text).strip()
