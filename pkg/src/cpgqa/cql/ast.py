"""AST for the CQL query subset and its canonical pretty-printer.

CQL covers labeled node patterns, single and variable-length directed
hops, case-foldable substring filters, variable passthrough, and
path/node/property projections. ASTs are plain frozen dataclasses;
``parse_query(render_query(ast)) == ast`` holds for every valid AST.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..graph import NodeCategory

PROPERTIES = ("content", "context")

LABELS: dict[str, NodeCategory] = {c.query_label: c for c in NodeCategory}


@dataclass(frozen=True)
class NodePattern:
    variable: str | None = None
    label: NodeCategory | None = None


@dataclass(frozen=True)
class Hop:
    """A directed hop; ``bounds`` is None for a single hop, else (min, max)."""

    bounds: tuple[int, int] | None = None


@dataclass(frozen=True)
class PathPattern:
    path_variable: str | None
    nodes: tuple[NodePattern, ...]
    hops: tuple[Hop, ...]


@dataclass(frozen=True)
class MatchClause:
    patterns: tuple[PathPattern, ...]


@dataclass(frozen=True)
class ContainsFilter:
    """``folded`` marks case-insensitive matching (a lower-casing wrapper
    appeared on either side of CONTAINS)."""

    variable: str
    prop: str
    needle: str
    folded: bool


@dataclass(frozen=True)
class WhereClause:
    filters: tuple[ContainsFilter, ...]


@dataclass(frozen=True)
class WithClause:
    variables: tuple[str, ...]


class ReturnKind(Enum):
    VARIABLE = "variable"
    NODES = "nodes"
    PROPERTY = "property"


@dataclass(frozen=True)
class ReturnItem:
    kind: ReturnKind
    variable: str
    prop: str | None = None

    def column_name(self) -> str:
        if self.kind is ReturnKind.NODES:
            return f"nodes({self.variable})"
        if self.kind is ReturnKind.PROPERTY:
            return f"{self.variable}.{self.prop}"
        return self.variable


@dataclass(frozen=True)
class ReturnClause:
    items: tuple[ReturnItem, ...]


Clause = MatchClause | WhereClause | WithClause


@dataclass(frozen=True)
class QueryAst:
    """Ordered clause sequence ending in exactly one RETURN."""

    clauses: tuple[Clause, ...]
    returns: ReturnClause


def _render_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _render_node(pattern: NodePattern) -> str:
    inner = pattern.variable or ""
    if pattern.label is not None:
        inner += f":{pattern.label.query_label}"
    return f"({inner})"


def _render_hop(hop: Hop) -> str:
    if hop.bounds is None:
        return "-[]->"
    lo, hi = hop.bounds
    return f"-[*{lo}..{hi}]->"


def _render_pattern(pattern: PathPattern) -> str:
    prefix = f"{pattern.path_variable}=" if pattern.path_variable else ""
    parts = [_render_node(pattern.nodes[0])]
    for hop, node in zip(pattern.hops, pattern.nodes[1:]):
        parts.append(_render_hop(hop))
        parts.append(_render_node(node))
    return prefix + "".join(parts)


def _render_filter(flt: ContainsFilter) -> str:
    subject = f"{flt.variable}.{flt.prop}"
    if flt.folded:
        subject = f"toLower({subject})"
    return f"{subject} CONTAINS {_render_string(flt.needle)}"


def render_query(ast: QueryAst) -> str:
    """Canonical text form: upper-case keywords, canonical toLower, one clause per line."""
    lines = []
    for clause in ast.clauses:
        if isinstance(clause, MatchClause):
            lines.append("MATCH " + ", ".join(_render_pattern(p) for p in clause.patterns))
        elif isinstance(clause, WhereClause):
            lines.append("WHERE " + " AND ".join(_render_filter(f) for f in clause.filters))
        else:
            lines.append("WITH " + ", ".join(clause.variables))
    lines.append("RETURN " + ", ".join(i.column_name() for i in ast.returns.items))
    return "\n".join(lines)
