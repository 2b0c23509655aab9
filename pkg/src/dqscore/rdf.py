"""RDF terms and quads, a TriG/Turtle subset parser, and an N-Quads writer.

Only the subset of TriG needed for extracted documents and provenance
emissions is understood: prefix/base directives, IRIs, prefixed names,
string/numeric/boolean literals, blank node labels and property lists,
``;``/``,`` lists and ``GRAPH`` blocks. Collections are rejected.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union
from urllib.parse import urljoin

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD = "http://www.w3.org/2001/XMLSchema#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATETIME = XSD + "dateTime"
RDF_TYPE = RDF + "type"
RDF_LANGSTRING = RDF + "langString"

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_BAD_IRI_CHARS = re.compile(r'[\x00-\x20<>"{}|^`\\]')
_LANG = re.compile(r"^[a-zA-Z]+(-[a-zA-Z0-9]+)*$")


class RdfSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class IRI:
    value: str

    def __post_init__(self):
        if not _SCHEME.match(self.value):
            raise ValueError(f"IRI is not absolute: {self.value!r}")
        if _BAD_IRI_CHARS.search(self.value):
            raise ValueError(f"illegal character in IRI: {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BNode:
    label: str

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z0-9_](?:[\w.\-]*[\w\-])?", self.label):
            raise ValueError(f"bad blank node label: {self.label!r}")


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: str | None = None

    def __post_init__(self):
        if self.language is not None:
            if not _LANG.match(self.language):
                raise ValueError(f"bad language tag: {self.language!r}")
            # Tags compare case-insensitively; store the lowercase form.
            object.__setattr__(self, "language", self.language.lower())
            object.__setattr__(self, "datatype", RDF_LANGSTRING)
        elif self.datatype == RDF_LANGSTRING:
            raise ValueError("rdf:langString literal needs a language tag")
        if not _SCHEME.match(self.datatype):
            raise ValueError(f"datatype IRI is not absolute: {self.datatype!r}")

    @classmethod
    def double(cls, value: float) -> "Literal":
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite double: {value!r}")
        # repr() is the shortest string that round-trips.
        return cls(repr(value), XSD_DOUBLE)

    @classmethod
    def integer(cls, value: int) -> "Literal":
        return cls(str(int(value)), XSD_INTEGER)

    def to_python(self):
        if self.datatype == XSD_DOUBLE:
            return float(self.lexical)
        if self.datatype == XSD_INTEGER:
            return int(self.lexical)
        if self.datatype == XSD_BOOLEAN:
            return self.lexical == "true"
        return self.lexical


Term = Union[IRI, BNode, Literal]


@dataclass(frozen=True, slots=True)
class Quad:
    subject: IRI | BNode
    predicate: IRI
    object: Term
    graph: IRI

    def __post_init__(self):
        if not isinstance(self.subject, (IRI, BNode)):
            raise TypeError(f"subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, IRI):
            raise TypeError(f"predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (IRI, BNode, Literal)):
            raise TypeError(f"object must be an RDF term, got {self.object!r}")
        if not isinstance(self.graph, IRI):
            raise TypeError(f"graph must be an IRI, got {self.graph!r}")


# -- canonical ordering ------------------------------------------------------

_KIND_RANK = {IRI: 0, BNode: 1, Literal: 2}


def term_key(term: Term) -> tuple:
    if isinstance(term, IRI):
        return (0, term.value)
    if isinstance(term, BNode):
        return (1, term.label)
    return (2, term.lexical, term.datatype, term.language or "")


def quad_key(quad: Quad) -> tuple:
    """Sort key: graph, subject, predicate, object."""
    return (term_key(quad.graph), term_key(quad.subject),
            term_key(quad.predicate), term_key(quad.object))


def canonical_term_order(a: Term, b: Term) -> int:
    """Three-way compare: IRIs < blank nodes < literals, then by components."""
    ka, kb = term_key(a), term_key(b)
    return (ka > kb) - (ka < kb)


class QuadSet:
    """Immutable set of quads iterated in canonical order."""

    __slots__ = ("_set", "_ordered")

    def __init__(self, quads: Iterable[Quad] = ()):
        self._set = frozenset(quads)
        self._ordered: tuple[Quad, ...] | None = None

    def _order(self) -> tuple[Quad, ...]:
        if self._ordered is None:
            self._ordered = tuple(sorted(self._set, key=quad_key))
        return self._ordered

    def __iter__(self) -> Iterator[Quad]:
        return iter(self._order())

    def __len__(self) -> int:
        return len(self._set)

    def __contains__(self, quad) -> bool:
        return quad in self._set

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadSet):
            return self._set == other._set
        if isinstance(other, (set, frozenset)):
            return self._set == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._set)

    def __or__(self, other: Iterable[Quad]) -> "QuadSet":
        return QuadSet(self._set.union(other))

    def __getitem__(self, index):
        return self._order()[index]

    def __repr__(self) -> str:
        return f"QuadSet({len(self)} quads)"

    def graphs(self) -> set[IRI]:
        return {q.graph for q in self._set}


# -- lexer -------------------------------------------------------------------

_PN_PREFIX = r"[A-Za-z](?:[\w.\-]*[\w\-])?"
_PN_LOCAL = r"(?:[\w:%\-]|\\[_~.\-!$&'()*+,;=/?#@%])(?:(?:[\w.:%\-]|\\[_~.\-!$&'()*+,;=/?#@%])*(?:[\w:%\-]|\\[_~.\-!$&'()*+,;=/?#@%]))?"

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\r\n]*"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("STRING_LONG", r'"""(?:[^"\\]|\\.|"(?!""))*"""' + r"|'''(?:[^'\\]|\\.|'(?!''))*'''"),
    ("STRING", r'"(?:[^"\\\r\n]|\\.)*"' + r"|'(?:[^'\\\r\n]|\\.)*'"),
    ("DIRECTIVE", r"@(?:prefix|base)\b"),
    ("LANGTAG", r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"),
    ("DATATYPE_MARK", r"\^\^"),
    ("DOUBLE", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"[+-]?\d*\.\d+"),
    ("INTEGER", r"[+-]?\d+"),
    ("BNODE", r"_:[A-Za-z0-9_](?:[\w.\-]*[\w\-])?"),
    ("VAR", r"[?$][A-Za-z_]\w*"),
    ("PNAME", rf"(?:{_PN_PREFIX})?:(?:{_PN_LOCAL})?"),
    ("WORD", r"[A-Za-z]+"),
    ("PUNCT", r"[.;,\[\]{}()]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
            '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.S)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    text: str
    pos: int


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def tokenize_rdf(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RdfSyntaxError(f"unexpected character {text[pos]!r}", *_line_col(text, pos))
        kind = m.lastgroup
        if kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    return tokens


def _unescape(body: str, text: str, pos: int) -> str:
    def repl(m: re.Match) -> str:
        esc = m.group(1)
        if esc[0] in "uU":
            return chr(int(esc[1:], 16))
        if esc in _ESCAPES:
            return _ESCAPES[esc]
        raise RdfSyntaxError(f"bad escape \\{esc}", *_line_col(text, pos + m.start()))
    return _ESCAPE_RE.sub(repl, body)


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, base_graph: IRI | None, bnode_prefix: str,
                 prefixes: dict[str, str] | None = None, allow_vars: bool = False):
        self.text = text
        self.tokens = tokenize_rdf(text)
        self.i = 0
        self.base_graph = base_graph
        self.base: str | None = None
        self.prefixes: dict[str, str] = dict(prefixes or {})
        self.bnode_prefix = bnode_prefix
        self.bnode_count = 0
        self.bnode_labels: dict[str, BNode] = {}
        self.allow_vars = allow_vars
        self.out: list[Quad] = []

    # token helpers
    def error(self, message: str, token: Token | None = None):
        pos = token.pos if token is not None else len(self.text)
        raise RdfSyntaxError(message, *_line_col(self.text, pos))

    def peek(self, offset: int = 0) -> Token | None:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        self.i += 1
        return tok

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "PUNCT" and tok.text == ch

    def expect(self, ch: str) -> Token:
        tok = self.next()
        if tok.kind != "PUNCT" or tok.text != ch:
            self.error(f"expected {ch!r}, found {tok.text!r}", tok)
        return tok

    def at_word(self, word: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "WORD" and tok.text.upper() == word

    # terms
    def fresh_bnode(self) -> BNode:
        node = BNode(f"{self.bnode_prefix}{self.bnode_count}")
        self.bnode_count += 1
        return node

    def resolve_iri(self, tok: Token) -> IRI:
        raw = _unescape(tok.text[1:-1], self.text, tok.pos)
        if not _SCHEME.match(raw):
            if self.base is None:
                self.error(f"relative IRI <{raw}> with no base", tok)
            raw = urljoin(self.base, raw)
        try:
            return IRI(raw)
        except ValueError as exc:
            self.error(str(exc), tok)

    def resolve_pname(self, tok: Token) -> IRI:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            self.error(f"undeclared prefix {prefix!r}", tok)
        local = re.sub(r"\\(.)", r"\1", local)
        try:
            return IRI(self.prefixes[prefix] + local)
        except ValueError as exc:
            self.error(str(exc), tok)

    def iri(self) -> IRI:
        tok = self.next()
        if tok.kind == "IRIREF":
            return self.resolve_iri(tok)
        if tok.kind == "PNAME":
            return self.resolve_pname(tok)
        self.error(f"expected an IRI, found {tok.text!r}", tok)

    def bnode_label(self, tok: Token) -> BNode:
        label = tok.text[2:]
        if label not in self.bnode_labels:
            self.bnode_labels[label] = self.fresh_bnode()
        return self.bnode_labels[label]

    def literal(self, tok: Token) -> Literal:
        if tok.kind == "STRING_LONG":
            body = tok.text[3:-3]
        else:
            body = tok.text[1:-1]
        lexical = _unescape(body, self.text, tok.pos)
        nxt = self.peek()
        if nxt is not None and nxt.kind == "LANGTAG":
            self.i += 1
            return Literal(lexical, language=nxt.text[1:])
        if nxt is not None and nxt.kind == "DATATYPE_MARK":
            self.i += 1
            return Literal(lexical, self.iri().value)
        return Literal(lexical)

    def subject(self) -> IRI | BNode:
        tok = self.peek()
        if tok is None:
            self.error("expected a subject")
        if tok.kind in ("IRIREF", "PNAME"):
            return self.iri()
        if tok.kind == "BNODE":
            self.i += 1
            return self.bnode_label(tok)
        if tok.kind == "VAR" and self.allow_vars:
            self.i += 1
            return Var(tok.text[1:])
        if tok.kind == "PUNCT" and tok.text == "(":
            self.error("collections are not supported", tok)
        self.error(f"expected a subject, found {tok.text!r}", tok)

    def predicate(self) -> IRI:
        tok = self.peek()
        if tok is not None and tok.kind == "WORD" and tok.text == "a":
            self.i += 1
            return IRI(RDF_TYPE)
        if tok is not None and tok.kind == "VAR" and self.allow_vars:
            self.i += 1
            return Var(tok.text[1:])
        if tok is None or tok.kind not in ("IRIREF", "PNAME"):
            self.error("expected a predicate", tok)
        return self.iri()

    def object(self, graph: IRI) -> Term:
        tok = self.next()
        kind = tok.kind
        if kind in ("IRIREF", "PNAME"):
            self.i -= 1
            return self.iri()
        if kind == "BNODE":
            return self.bnode_label(tok)
        if kind in ("STRING", "STRING_LONG"):
            return self.literal(tok)
        if kind == "INTEGER":
            return Literal(tok.text, XSD_INTEGER)
        if kind == "DECIMAL":
            return Literal(tok.text, XSD_DECIMAL)
        if kind == "DOUBLE":
            return Literal(tok.text, XSD_DOUBLE)
        if kind == "WORD" and tok.text in ("true", "false"):
            return Literal(tok.text, XSD_BOOLEAN)
        if kind == "VAR" and self.allow_vars:
            return Var(tok.text[1:])
        if kind == "PUNCT" and tok.text == "[":
            node = self.fresh_bnode()
            if not self.at_punct("]"):
                self.predicate_object_list(node, graph)
            self.expect("]")
            return node
        if kind == "PUNCT" and tok.text == "(":
            self.error("collections are not supported", tok)
        self.error(f"expected an object, found {tok.text!r}", tok)

    def emit(self, s, p, o, g):
        self.out.append(Quad(s, p, o, g))

    def predicate_object_list(self, subject, graph: IRI):
        while True:
            pred = self.predicate()
            while True:
                self.emit(subject, pred, self.object(graph), graph)
                if not self.at_punct(","):
                    break
                self.i += 1
            # Trailing ';' sequences are legal.
            if not self.at_punct(";"):
                return
            while self.at_punct(";"):
                self.i += 1
            tok = self.peek()
            if tok is None or (tok.kind == "PUNCT" and tok.text in ".]}"):
                return

    def triples(self, graph: IRI):
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text == "[":
            self.i += 1
            node = self.fresh_bnode()
            if not self.at_punct("]"):
                self.predicate_object_list(node, graph)
            self.expect("]")
            if not self.at_punct("."):
                self.predicate_object_list(node, graph)
        else:
            subj = self.subject()
            self.predicate_object_list(subj, graph)
        self.expect(".")

    def directive(self):
        tok = self.next()
        sparql_style = tok.kind == "WORD"
        if tok.text.lower().endswith("prefix"):
            name = self.next()
            if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
                self.error("expected a prefix name", name)
            iri_tok = self.next()
            if iri_tok.kind != "IRIREF":
                self.error("expected an IRI", iri_tok)
            self.prefixes[name.text[:-1]] = self.resolve_iri(iri_tok).value
        else:
            iri_tok = self.next()
            if iri_tok.kind != "IRIREF":
                self.error("expected an IRI", iri_tok)
            self.base = self.resolve_iri(iri_tok).value
        if not sparql_style:
            self.expect(".")

    def graph_block(self, graph: IRI):
        self.expect("{")
        while not self.at_punct("}"):
            if self.peek() is None:
                self.error("unterminated graph block")
            self.triples_in_block(graph)
        self.expect("}")

    def triples_in_block(self, graph: IRI):
        # The final triple in a block may omit its '.'.
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text == "[":
            self.i += 1
            node = self.fresh_bnode()
            if not self.at_punct("]"):
                self.predicate_object_list(node, graph)
            self.expect("]")
            if not self.at_punct(".") and not self.at_punct("}"):
                self.predicate_object_list(node, graph)
        else:
            self.predicate_object_list(self.subject(), graph)
        if self.at_punct("."):
            self.i += 1
        elif not self.at_punct("}"):
            tok = self.peek()
            self.error(f"expected '.' or '}}', found {tok.text if tok else 'end of input'!r}", tok)

    def parse_trig(self) -> list[Quad]:
        while self.peek() is not None:
            tok = self.peek()
            if tok.kind == "DIRECTIVE" or (tok.kind == "WORD" and tok.text.upper() in ("PREFIX", "BASE")):
                self.directive()
            elif self.at_word("GRAPH"):
                self.i += 1
                self.graph_block(self.iri())
            elif tok.kind in ("IRIREF", "PNAME") and self._next_is_brace():
                self.graph_block(self.iri())
            elif tok.kind == "PUNCT" and tok.text == "{":
                self.graph_block(self._default_graph(tok))
            else:
                self.triples(self._default_graph(tok))
        return self.out

    def _next_is_brace(self) -> bool:
        nxt = self.peek(1)
        return nxt is not None and nxt.kind == "PUNCT" and nxt.text == "{"

    def _default_graph(self, tok: Token) -> IRI:
        if self.base_graph is None:
            self.error("triple outside a GRAPH block and no base graph given", tok)
        return self.base_graph

    def parse_nquads(self) -> list[Quad]:
        while self.peek() is not None:
            subj = self.subject()
            pred = self.predicate()
            obj = self.object(self.base_graph)
            if self.at_punct("."):
                self.emit(subj, pred, obj, self._default_graph(self.peek()))
            else:
                self.emit(subj, pred, obj, self.iri())
            self.expect(".")
        return self.out


@dataclass(frozen=True, slots=True)
class Var:
    """Query variable; only produced when parsing query patterns."""
    name: str


def parse_trig(text: str, base_graph: IRI | str | None = None, *,
               bnode_prefix: str = "b") -> QuadSet:
    """Parse TriG text; triples outside GRAPH blocks land in ``base_graph``.

    Blank nodes are relabelled ``_:<bnode_prefix><n>`` in order of first
    appearance, so a given input always yields the same labels.
    """
    if isinstance(base_graph, str):
        base_graph = IRI(base_graph)
    return QuadSet(_Parser(text, base_graph, bnode_prefix).parse_trig())


def parse_nquads(text: str, default_graph: IRI | str | None = None) -> QuadSet:
    """Parse N-Quads, keeping blank node labels as written."""
    if isinstance(default_graph, str):
        default_graph = IRI(default_graph)
    parser = _Parser(text, default_graph, "")
    parser.bnode_label = lambda tok: BNode(tok.text[2:])
    return QuadSet(parser.parse_nquads())


# -- serialization -----------------------------------------------------------

_NQ_STRING_ESCAPES = str.maketrans({"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r"})


def format_term(term: Term) -> str:
    if isinstance(term, IRI):
        return f"<{term.value}>"
    if isinstance(term, BNode):
        return f"_:{term.label}"
    lexical = f'"{term.lexical.translate(_NQ_STRING_ESCAPES)}"'
    if term.language is not None:
        return f"{lexical}@{term.language}"
    if term.datatype == XSD_STRING:
        return lexical
    return f"{lexical}^^<{term.datatype}>"


def format_quad(quad: Quad) -> str:
    return (f"{format_term(quad.subject)} {format_term(quad.predicate)} "
            f"{format_term(quad.object)} {format_term(quad.graph)} .")


def serialize_nquads(quads: Iterable[Quad]) -> str:
    if not isinstance(quads, QuadSet):
        quads = QuadSet(quads)
    return "".join(format_quad(q) + "\n" for q in quads)
