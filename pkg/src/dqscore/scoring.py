"""One scoring pass: run an analytic, pick the DQ model, emit and persist."""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .analytics import (
    AnalyticKind,
    HitsParams,
    PageRankParams,
    ScoreMap,
    VsmParams,
    betweenness,
    document_frequencies,
    hits,
    pagerank,
    tokenize,
    vsm_similarity,
)
from .dq import (
    DESCRIPTORS,
    VSM_PAIRWISE,
    DQEmission,
    DqForm,
    DqStrategy,
    EventKind,
    RelationshipKind,
    classify,
    decide_model,
    emit_collection_dq,
    emit_simple_dq,
)
from .projection import AnalyticGraph, ProjectionConfig, project_document_graph
from .rdf import IRI, XSD_DATETIME
from .store import DocumentStore, QuadPattern, UnknownDocumentError
from .timeutil import parse_datetime
from .vocab import PROV_GENERATED_AT_TIME

ANALYTIC_NAMES = ("pagerank", "hits", "betweenness", "vsm")


@dataclass(frozen=True)
class AnalyticResult:
    scores: ScoreMap
    timestamp: datetime

    @property
    def kind(self) -> AnalyticKind:
        return self.scores.kind


@dataclass
class ScorePass:
    result: AnalyticResult
    form: DqForm
    event: EventKind
    strategy: DqStrategy
    emissions: list[DQEmission] = field(default_factory=list)
    inserted: int = 0


def vsm_query_scores(store: DocumentStore, params: VsmParams) -> ScoreMap:
    """Similarity of every document to the query term, over the stored corpus."""
    if not params.query_term:
        raise ValueError("VSM scoring needs a query term")
    vectors = {rec.graph_iri.value: tokenize(rec.raw_bytes) for rec in store.documents()}
    df = document_frequencies(vectors.values())
    n = max(len(vectors), 1)
    query = tokenize(params.query_term)
    scores = {doc: vsm_similarity(query, vec, df, n, params) for doc, vec in vectors.items()}
    return ScoreMap(AnalyticKind.VSM_SIMILARITY, scores, params)


def compute(store: DocumentStore, analytic: str, params=None, *,
            graph: AnalyticGraph | None = None) -> list[ScoreMap]:
    analytic = analytic.lower()
    if analytic == "vsm":
        return [vsm_query_scores(store, params or VsmParams())]
    if analytic not in ANALYTIC_NAMES:
        raise ValueError(f"unknown analytic {analytic!r}; choose from {', '.join(ANALYTIC_NAMES)}")
    if graph is None:
        graph = project_document_graph(store, ProjectionConfig())
    if analytic == "pagerank":
        return [pagerank(graph, params or PageRankParams())]
    if analytic == "hits":
        return list(hits(graph, params or HitsParams()))
    return [betweenness(graph)]


def qualify(scores: ScoreMap, timestamp: datetime, documents=None) -> ScorePass:
    """Emit one entity-to-entity DQ per scored document."""
    desc = DESCRIPTORS[scores.kind]
    form, event = decide_model(desc)
    strategy = classify(event, RelationshipKind.ANALYTIC)
    specialize = strategy is DqStrategy.SPECIALIZATION_AND_DQ
    sp = ScorePass(AnalyticResult(scores, timestamp), form, event, strategy)
    for doc in sorted(scores.scores):
        sp.emissions.append(emit_simple_dq(doc, float(scores.scores[doc]), scores.kind, scores.params,
                                           timestamp, specialize=specialize, documents=documents))
    return sp


def persist(store: DocumentStore, emissions: list[DQEmission]) -> int:
    return sum(store.insert_quads(em.emission_graph, em.quads) for em in emissions)


def score_pass(store: DocumentStore, analytic: str, params, timestamp: datetime, *,
               graph: AnalyticGraph | None = None) -> list[ScorePass]:
    known = set(store.document_iris())
    passes = []
    for scores in compute(store, analytic, params, graph=graph):
        sp = qualify(scores, timestamp, known)
        sp.inserted = persist(store, sp.emissions)
        passes.append(sp)
    return passes


def vsm_pairwise_pass(store: DocumentStore, anchor: IRI | str, params: VsmParams,
                      timestamp: datetime) -> ScorePass:
    """Compare ``anchor`` with every other document; one collection DQ per pair."""
    anchor = anchor if isinstance(anchor, IRI) else IRI(anchor)
    if not store.has_document(anchor):
        raise UnknownDocumentError(anchor.value)
    vectors = {rec.graph_iri: tokenize(rec.raw_bytes) for rec in store.documents()}
    df = document_frequencies(vectors.values())
    n = len(vectors)
    form, event = decide_model(VSM_PAIRWISE)
    scores = {}
    sp = ScorePass(None, form, event, classify(event, RelationshipKind.ANALYTIC))
    for other in sorted(vectors, key=lambda i: i.value):
        if other == anchor:
            continue
        sim = vsm_similarity(vectors[anchor], vectors[other], df, n, params)
        scores[other.value] = sim
        sp.emissions.append(emit_collection_dq([anchor, other], sim, params, timestamp,
                                               documents=vectors))
    sp.result = AnalyticResult(ScoreMap(AnalyticKind.VSM_SIMILARITY, scores, params), timestamp)
    sp.inserted = persist(store, sp.emissions)
    return sp


def next_timestamp(store: DocumentStore) -> datetime:
    """One second after the latest ingest or generation time in the store."""
    latest = None
    for rec in store.documents():
        if latest is None or rec.ingest_time > latest:
            latest = rec.ingest_time
    for q in store.iter_quads(QuadPattern(predicate=PROV_GENERATED_AT_TIME)):
        if getattr(q.object, "datatype", None) == XSD_DATETIME:
            ts = parse_datetime(q.object.lexical)
            if latest is None or ts > latest:
                latest = ts
    if latest is None:
        raise ValueError("store is empty; supply an explicit timestamp")
    return latest + timedelta(seconds=1)
