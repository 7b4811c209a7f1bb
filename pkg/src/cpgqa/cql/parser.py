"""Recursive-descent parser for CQL.

Grammar (keywords case-insensitive)::

    statement    := matchClause (whereClause | withClause | matchClause)* returnClause ";"?
    matchClause  := "MATCH" pattern ("," pattern)*
    pattern      := (ident "=")? nodePat (hop nodePat)*
    nodePat      := "(" ident? (":" label)? ")"
    hop          := "-[" ("*" int ".." int)? "]->"
    whereClause  := "WHERE" filter ("AND" filter)*
    filter       := foldable "CONTAINS" foldableLit
    foldable     := "toLower(" ident "." property ")" | ident "." property
    foldableLit  := "toLower(" stringLit ")" | stringLit
    withClause   := "WITH" ident ("," ident)*
    returnClause := "RETURN" retItem ("," retItem)*
    retItem      := ident | "nodes(" ident ")" | ident "." property
    property     := "content" | "context"
    stringLit    := single- or double-quoted; backslash escapes the quote
                    character and the backslash itself

The parser never aborts: every input yields an AST or a positioned error.
Variable scoping is checked here (kinds are known statically: path
variables are exactly those bound with ``ident =``), as are label and
property names and hop bounds against the global hop cap.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import (
    BoundsError,
    QuerySyntaxError,
    UnboundVariable,
    UnknownLabel,
    UnknownProperty,
)
from .ast import (
    LABELS,
    PROPERTIES,
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
)

DEFAULT_HOP_CAP = 10

_PUNCT = "()[]:,=;.*->"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "string" | one of the punct literals | "eof"
    value: str
    pos: int


def _describe(token: Token) -> str:
    if token.kind == "eof":
        return "end of input"
    if token.kind == "ident":
        return f"identifier {token.value!r}"
    if token.kind == "int":
        return f"number {token.value}"
    if token.kind == "string":
        return "string literal"
    return f"{token.kind!r}"


def tokenize(text: str) -> list[Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            tokens.append(Token("ident", text[start:i], start))
            continue
        if ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(Token("int", text[start:i], start))
            continue
        if ch in ("'", '"'):
            start = i
            i += 1
            chars = []
            closed = False
            while i < n:
                c = text[i]
                if c == "\\" and i + 1 < n and text[i + 1] in (ch, "\\"):
                    chars.append(text[i + 1])
                    i += 2
                    continue
                if c == ch:
                    i += 1
                    closed = True
                    break
                chars.append(c)
                i += 1
            if not closed:
                raise QuerySyntaxError(start, [f"closing {ch}"], "end of input")
            tokens.append(Token("string", "".join(chars), start))
            continue
        if text.startswith("..", i):
            tokens.append(Token("..", "..", i))
            i += 2
            continue
        if ch in _PUNCT:
            tokens.append(Token(ch, ch, i))
            i += 1
            continue
        raise QuerySyntaxError(i, ["token"], f"character {ch!r}")
    tokens.append(Token("eof", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, hop_cap: int):
        self.tokens = tokenize(text)
        self.index = 0
        self.hop_cap = hop_cap
        # variable name -> "node" | "path"
        self.scope: dict[str, str] = {}

    # --- token helpers ---

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.index + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != "eof":
            self.index += 1
        return token

    def fail(self, expected: list[str], token: Token | None = None) -> QuerySyntaxError:
        token = token or self.peek()
        return QuerySyntaxError(token.pos, expected, _describe(token))

    def expect(self, kind: str, expected: str) -> Token:
        if self.peek().kind != kind:
            raise self.fail([expected])
        return self.advance()

    def at_keyword(self, *words: str) -> bool:
        token = self.peek()
        return token.kind == "ident" and token.value.lower() in words

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            raise self.fail([word.upper()])
        return self.advance()

    # --- scope helpers ---

    def bind(self, name: str, kind: str, pos: int) -> None:
        existing = self.scope.get(name)
        if existing is not None and existing != kind:
            raise QuerySyntaxError(pos, [f"unused {kind} variable"], f"{existing} variable {name!r}")
        if existing == "path" and kind == "path":
            raise QuerySyntaxError(pos, ["unused variable"], f"already-bound path variable {name!r}")
        self.scope[name] = kind

    def require(self, name: str, pos: int, kinds: tuple[str, ...]) -> str:
        kind = self.scope.get(name)
        if kind is None:
            raise UnboundVariable(f"variable {name!r} at offset {pos} is not bound by a MATCH")
        if kind not in kinds:
            raise QuerySyntaxError(pos, [f"{kinds[0]} variable"], f"{kind} variable {name!r}")
        return kind

    # --- grammar ---

    def parse(self) -> QueryAst:
        clauses: list = [self.parse_match()]
        while True:
            if self.at_keyword("where"):
                clauses.append(self.parse_where())
            elif self.at_keyword("with"):
                clauses.append(self.parse_with())
            elif self.at_keyword("match"):
                clauses.append(self.parse_match())
            else:
                break
        returns = self.parse_return()
        if self.peek().kind == ";":
            self.advance()
        if self.peek().kind != "eof":
            raise self.fail(["end of input"])
        return QueryAst(clauses=tuple(clauses), returns=returns)

    def parse_match(self) -> MatchClause:
        self.expect_keyword("match")
        patterns = [self.parse_pattern()]
        while self.peek().kind == ",":
            self.advance()
            patterns.append(self.parse_pattern())
        return MatchClause(patterns=tuple(patterns))

    def parse_pattern(self) -> PathPattern:
        path_variable = None
        path_pos = self.peek().pos
        if self.peek().kind == "ident" and self.peek(1).kind == "=":
            path_variable = self.advance().value
            self.advance()
        nodes = [self.parse_node_pattern()]
        hops = []
        while self.peek().kind == "-":
            hops.append(self.parse_hop())
            nodes.append(self.parse_node_pattern())
        if path_variable is not None:
            if not hops:
                raise QuerySyntaxError(path_pos, ["a hop after the path-variable pattern"],
                                       f"path variable {path_variable!r} on a single node")
            self.bind(path_variable, "path", path_pos)
        for node in nodes:
            if node.variable is not None:
                self.bind(node.variable, "node", path_pos)
        return PathPattern(path_variable=path_variable, nodes=tuple(nodes), hops=tuple(hops))

    def parse_node_pattern(self) -> NodePattern:
        self.expect("(", "'('")
        variable = None
        if self.peek().kind == "ident":
            variable = self.advance().value
        label = None
        if self.peek().kind == ":":
            self.advance()
            token = self.expect("ident", "node label")
            if token.value not in LABELS:
                raise UnknownLabel(
                    f"unknown label {token.value!r} at offset {token.pos}; "
                    f"expected one of {', '.join(sorted(LABELS))}"
                )
            label = LABELS[token.value]
        self.expect(")", "')'")
        return NodePattern(variable=variable, label=label)

    def parse_hop(self) -> Hop:
        self.expect("-", "'-['")
        self.expect("[", "'['")
        bounds = None
        if self.peek().kind == "*":
            star = self.advance()
            lo_token = self.expect("int", "hop minimum")
            self.expect("..", "'..'")
            hi_token = self.expect("int", "hop maximum")
            lo, hi = int(lo_token.value), int(hi_token.value)
            if lo < 1:
                raise BoundsError(f"hop minimum must be >= 1, got {lo} at offset {star.pos}")
            if hi < lo:
                raise BoundsError(f"hop maximum {hi} < minimum {lo} at offset {star.pos}")
            if hi > self.hop_cap:
                raise BoundsError(f"hop maximum {hi} exceeds the cap {self.hop_cap} at offset {star.pos}")
            bounds = (lo, hi)
        self.expect("]", "']'")
        self.expect("-", "'->'")
        self.expect(">", "'->'")
        return Hop(bounds=bounds)

    def parse_where(self) -> WhereClause:
        self.expect_keyword("where")
        filters = [self.parse_filter()]
        while self.at_keyword("and"):
            self.advance()
            filters.append(self.parse_filter())
        return WhereClause(filters=tuple(filters))

    def parse_property(self) -> str:
        token = self.expect("ident", "property name")
        if token.value not in PROPERTIES:
            raise UnknownProperty(
                f"unknown property {token.value!r} at offset {token.pos}; "
                f"expected one of {', '.join(PROPERTIES)}"
            )
        return token.value

    def parse_filter(self) -> ContainsFilter:
        folded = False
        if self.at_keyword("tolower") and self.peek(1).kind == "(":
            self.advance()
            self.advance()
            variable, prop = self.parse_subject()
            self.expect(")", "')'")
            folded = True
        else:
            variable, prop = self.parse_subject()
        if not self.at_keyword("contains"):
            raise self.fail(["CONTAINS"])
        self.advance()
        if self.at_keyword("tolower") and self.peek(1).kind == "(":
            self.advance()
            self.advance()
            needle_token = self.expect("string", "string literal")
            self.expect(")", "')'")
            folded = True
        else:
            needle_token = self.expect("string", "string literal")
        if not needle_token.value:
            raise self.fail(["non-empty string literal"], needle_token)
        return ContainsFilter(variable=variable, prop=prop, needle=needle_token.value, folded=folded)

    def parse_subject(self) -> tuple[str, str]:
        token = self.expect("ident", "variable")
        self.require(token.value, token.pos, ("node",))
        self.expect(".", "'.'")
        prop = self.parse_property()
        return token.value, prop

    def parse_with(self) -> WithClause:
        self.expect_keyword("with")
        names = []
        while True:
            token = self.expect("ident", "variable")
            self.require(token.value, token.pos, ("node", "path"))
            names.append(token.value)
            if self.peek().kind != ",":
                break
            self.advance()
        # WITH narrows the scope to exactly the projected variables
        self.scope = {name: self.scope[name] for name in names}
        return WithClause(variables=tuple(names))

    def parse_return(self) -> ReturnClause:
        self.expect_keyword("return")
        items = [self.parse_return_item()]
        while self.peek().kind == ",":
            self.advance()
            items.append(self.parse_return_item())
        return ReturnClause(items=tuple(items))

    def parse_return_item(self) -> ReturnItem:
        if self.at_keyword("nodes") and self.peek(1).kind == "(":
            self.advance()
            self.advance()
            token = self.expect("ident", "path variable")
            self.require(token.value, token.pos, ("path",))
            self.expect(")", "')'")
            return ReturnItem(kind=ReturnKind.NODES, variable=token.value)
        token = self.expect("ident", "variable")
        if self.peek().kind == ".":
            self.require(token.value, token.pos, ("node",))
            self.advance()
            prop = self.parse_property()
            return ReturnItem(kind=ReturnKind.PROPERTY, variable=token.value, prop=prop)
        self.require(token.value, token.pos, ("node", "path"))
        return ReturnItem(kind=ReturnKind.VARIABLE, variable=token.value)


def parse_query(text: str, hop_cap: int = DEFAULT_HOP_CAP) -> QueryAst:
    """Parse CQL text into an AST, or raise a positioned query error."""
    return _Parser(text, hop_cap).parse()
