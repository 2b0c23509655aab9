"""Conjunctive pattern queries whose results can be ordered by analytic scores.

Text form, one item per line::

    PREFIX ex: <http://example.org/>
    ?info im:informationType "mil.af.rl.cot"
    ?info im:hasPublisher ?pub
    ORDER BY pagerank DESC
    LIMIT 10

A pattern line holds subject, predicate, object and an optional graph term.
Without a graph term a pattern only matches document graphs.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime

from .analytics import AnalyticKind, tokenize
from .dq import ANALYTIC_CLASSES
from .rdf import IRI, BNode, Literal, Quad, RdfSyntaxError, Term, Var, _Parser, format_term, term_key
from .store import DocumentStore, QuadPattern, UnknownDocumentError
from .timeutil import parse_datetime
from .vocab import (
    DEFAULT_PREFIXES,
    PROV_GENERATED_AT_TIME,
    PROV_SPECIALIZATION_OF,
    PROV_USED,
    PROV_WAS_GENERATED_BY,
    RDF_TYPE,
    REL_SCORE,
)


class QueryError(ValueError):
    pass


PatternTerm = IRI | BNode | Literal | Var


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm
    graph: IRI | Var | None = None

    def variables(self) -> list[str]:
        return [t.name for t in (self.subject, self.predicate, self.object, self.graph)
                if isinstance(t, Var)]


@dataclass(frozen=True)
class BasicPattern:
    patterns: tuple[TriplePattern, ...]
    order_by: tuple[AnalyticKind, bool] | None = None  # (kind, descending)
    limit: int | None = None

    def __post_init__(self):
        if not self.patterns:
            raise QueryError("a query needs at least one pattern")
        if self.limit is not None and self.limit < 1:
            raise QueryError("LIMIT must be a positive integer")
        if self.order_by is not None and not isinstance(self.order_by[0], AnalyticKind):
            raise QueryError(f"unknown analytic in ORDER BY: {self.order_by[0]!r}")

    def variables(self) -> list[str]:
        seen: list[str] = []
        for p in self.patterns:
            for v in p.variables():
                if v not in seen:
                    seen.append(v)
        return seen


@dataclass(frozen=True)
class ScoredBinding:
    bindings: dict[str, Term]
    document_iri: IRI
    score: float | None = None
    score_emission: IRI | None = None


@dataclass(frozen=True)
class ScoreRecord:
    timestamp: datetime
    score: float
    score_node: IRI
    emission_graph: IRI


# -- text syntax -------------------------------------------------------------

_ORDER_RE = re.compile(r"ORDER\s+BY\s+(\S+)(?:\s+(ASC|DESC))?\s*$", re.I)
_LIMIT_RE = re.compile(r"LIMIT\s+(\d+)\s*$", re.I)
_PREFIX_RE = re.compile(r"(?:@?PREFIX)\s+([A-Za-z][\w.\-]*)?:\s*<([^>]*)>\s*\.?\s*$", re.I)


def parse_query(text: str) -> BasicPattern:
    prefixes = dict(DEFAULT_PREFIXES)
    patterns = []
    order_by = None
    limit = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if m := _PREFIX_RE.match(stripped):
            prefixes[m.group(1) or ""] = m.group(2)
        elif m := _ORDER_RE.match(stripped):
            try:
                kind = AnalyticKind.parse(m.group(1))
            except ValueError as exc:
                raise QueryError(f"line {lineno}: {exc}") from None
            order_by = (kind, (m.group(2) or "DESC").upper() == "DESC")
        elif m := _LIMIT_RE.match(stripped):
            limit = int(m.group(1))
        else:
            try:
                patterns.append(_parse_pattern_line(line, prefixes))
            except RdfSyntaxError as exc:
                raise QueryError(f"line {lineno}: {exc}") from None
    return BasicPattern(tuple(patterns), order_by, limit)


def _parse_pattern_line(line: str, prefixes: dict[str, str]) -> TriplePattern:
    p = _Parser(line, None, "", prefixes=prefixes, allow_vars=True)
    p.bnode_label = lambda tok: BNode(tok.text[2:])
    s = p.subject()
    pred = p.predicate()
    tok = p.peek()
    if tok is not None and tok.kind == "PUNCT" and tok.text == "[":
        p.error("blank node property lists are not allowed in patterns", tok)
    o = p.object(None)
    graph = None
    tok = p.peek()
    if tok is not None and not (tok.kind == "PUNCT" and tok.text == "."):
        if tok.kind == "VAR":
            p.i += 1
            graph = Var(tok.text[1:])
        else:
            graph = p.iri()
    if p.at_punct("."):
        p.i += 1
    if p.peek() is not None:
        p.error(f"unexpected {p.peek().text!r}", p.peek())
    return TriplePattern(s, pred, o, graph)


# -- score lookup ------------------------------------------------------------

def score_records(store: DocumentStore, kind: AnalyticKind) -> dict[IRI, list[ScoreRecord]]:
    """Every single-input emission of ``kind``, grouped by scored document, oldest first."""
    out: dict[IRI, list[ScoreRecord]] = {}
    for typed in store.iter_quads(QuadPattern(predicate=RDF_TYPE, object=ANALYTIC_CLASSES[kind])):
        act, g = typed.subject, typed.graph
        used = list(store.iter_quads(QuadPattern(act, PROV_USED, None, g)))
        if len(used) != 1:
            continue
        for gen in store.iter_quads(QuadPattern(None, PROV_WAS_GENERATED_BY, act, g)):
            node = gen.subject
            values = list(store.iter_quads(QuadPattern(node, REL_SCORE, None, g)))
            times = list(store.iter_quads(QuadPattern(node, PROV_GENERATED_AT_TIME, None, g)))
            if len(values) != 1 or len(times) != 1:
                continue
            rec = ScoreRecord(parse_datetime(times[0].object.lexical),
                              float(values[0].object.lexical), node, g)
            out.setdefault(used[0].object, []).append(rec)
    for recs in out.values():
        recs.sort(key=lambda r: (r.timestamp, r.score_node.value))
    return out


def latest_scores(store: DocumentStore, kind: AnalyticKind) -> dict[IRI, ScoreRecord]:
    return {doc: recs[-1] for doc, recs in score_records(store, kind).items()}


def score_history(store: DocumentStore, document: IRI | str, kind: AnalyticKind) -> list[tuple[datetime, float]]:
    doc = document if isinstance(document, IRI) else IRI(document)
    if not store.has_document(doc):
        raise UnknownDocumentError(doc.value)
    return [(r.timestamp, r.score) for r in score_records(store, kind).get(doc, [])]


def snapshots(store: DocumentStore, document: IRI | str) -> list[tuple[datetime, IRI]]:
    """Specialization snapshots of a document, oldest first (duplicates across graphs merged)."""
    doc = document if isinstance(document, IRI) else IRI(document)
    found = {}
    for q in store.iter_quads(QuadPattern(None, PROV_SPECIALIZATION_OF, doc, None)):
        for t in store.iter_quads(QuadPattern(q.subject, PROV_GENERATED_AT_TIME, None, q.graph)):
            found[q.subject] = parse_datetime(t.object.lexical)
    return sorted(((ts, s) for s, ts in found.items()), key=lambda x: (x[0], x[1].value))


# -- evaluation --------------------------------------------------------------

def _resolve(term, binding):
    if isinstance(term, Var):
        return binding.get(term.name)
    return term


def _extend(binding: dict, pattern: TriplePattern, quad: Quad) -> dict | None:
    new = dict(binding)
    for term, value in ((pattern.subject, quad.subject), (pattern.predicate, quad.predicate),
                        (pattern.object, quad.object), (pattern.graph, quad.graph)):
        if isinstance(term, Var):
            bound = new.get(term.name)
            if bound is None:
                new[term.name] = value
            elif bound != value:
                return None
    return new


def _match(store: DocumentStore, pattern: TriplePattern, binding: dict, doc_graphs: set[IRI]):
    s = _resolve(pattern.subject, binding)
    p = _resolve(pattern.predicate, binding)
    o = _resolve(pattern.object, binding)
    g = _resolve(pattern.graph, binding) if pattern.graph is not None else None
    if isinstance(s, Literal) or (p is not None and not isinstance(p, IRI)):
        return
    if g is not None and not isinstance(g, IRI):
        return
    for q in store.iter_quads(QuadPattern(s, p, o, g)):
        if pattern.graph is None and q.graph not in doc_graphs:
            continue
        yield q


def evaluate(store: DocumentStore, query: BasicPattern | str) -> list[ScoredBinding]:
    """Join the patterns; optionally order by the latest score of one analytic.

    Each row's document is the graph of its first pattern's quad. Unscored
    rows follow scored ones; ties fall back to canonical term order.
    """
    if isinstance(query, str):
        query = parse_query(query)
    doc_graphs = set(store.document_iris())
    rows: list[tuple[dict, IRI]] = [({}, None)]
    for i, pattern in enumerate(query.patterns):
        nxt = []
        for binding, doc in rows:
            for q in _match(store, pattern, binding, doc_graphs):
                ext = _extend(binding, pattern, q)
                if ext is not None:
                    nxt.append((ext, q.graph if i == 0 else doc))
        rows = nxt
        if not rows:
            break

    variables = query.variables()

    def canonical(row):
        binding, doc = row[0], row[1]
        return (term_key(doc), tuple(term_key(binding[v]) for v in variables))

    scores: dict[IRI, ScoreRecord] = {}
    if query.order_by is not None:
        kind, descending = query.order_by
        scores = latest_scores(store, kind)
        if not scores:
            raise QueryError(f"no {kind.value} scores have been persisted; cannot order by it")
        if rows and not any(doc in scores for _, doc in rows):
            raise QueryError(f"none of the results carry a {kind.value} score")
        sign = -1.0 if descending else 1.0
        rows.sort(key=lambda r: (r[1] not in scores,
                                 sign * scores[r[1]].score if r[1] in scores else 0.0,
                                 canonical(r)))
    else:
        rows.sort(key=canonical)

    if query.limit is not None:
        rows = rows[:query.limit]
    out = []
    for binding, doc in rows:
        rec = scores.get(doc)
        out.append(ScoredBinding(binding, doc, rec.score if rec else None,
                                 rec.emission_graph if rec else None))
    return out


def render_tsv(results: list[ScoredBinding], variables: list[str]) -> str:
    lines = ["\t".join([*(f"?{v}" for v in variables), "document", "score", "emission"])]
    for r in results:
        cells = [format_term(r.bindings[v]) for v in variables]
        cells.append(format_term(r.document_iri))
        cells.append("" if r.score is None else repr(r.score))
        cells.append("" if r.score_emission is None else format_term(r.score_emission))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def keyword_trigger(store: DocumentStore, keyword: str) -> frozenset[IRI]:
    """Documents whose raw text contains every token of ``keyword``."""
    wanted = set(tokenize(keyword))
    if not wanted:
        return frozenset()
    return frozenset(rec.graph_iri for rec in store.documents()
                     if wanted <= tokenize(rec.raw_bytes).keys())
