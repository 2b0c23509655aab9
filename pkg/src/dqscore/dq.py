"""Direct Qualification: decide how an analytic result is modelled and emit it.

A score becomes a ``prov:Entity`` generated by a ``prov:Activity`` that
used the scored document(s). Results over several documents are derived
from a collection node whose parts are the inputs. Store-growth sensitive
(continuant) analytics also get a specialization snapshot of the document.
"""
from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal
from typing import Container, Iterable, Mapping

from .analytics import AnalyticKind
from .rdf import IRI, XSD_DATETIME, XSD_DOUBLE, Literal, Quad, QuadSet
from .store import UnknownDocumentError
from .timeutil import datetime_literal, format_datetime, parse_datetime
from .vocab import (
    DCTERMS_HAS_PART,
    PARAM_PREDICATES,
    PROV_ACTIVITY,
    PROV_ENTITY,
    PROV_GENERATED_AT_TIME,
    PROV_SPECIALIZATION_OF,
    PROV_USED,
    PROV_WAS_DERIVED_FROM,
    PROV_WAS_GENERATED_BY,
    RDF_TYPE,
    REIFICATION_TERMS,
    REL_DEVIATION,
    REL_HAS_SCORE,
    REL_SCORE,
    RELEVANCY,
)


class EventKind(enum.Enum):
    CONTINUANT = "continuant"
    OCCURRENT = "occurrent"


class RelationshipKind(enum.Enum):
    ANALYTIC = "analytic"
    ATTRIBUTE = "attribute"


class DqStrategy(enum.Enum):
    DIRECT_QUALIFICATION = "direct-qualification"
    SPECIALIZATION_AND_DQ = "specialization-and-direct-qualification"
    SPECIALIZATION = "specialization"
    DEFAULT_INFERENCE = "default-semantic-inferencing-and-reasoning"


class Arity(enum.Enum):
    ONE = "one"
    MANY = "many"


class DqForm(enum.Enum):
    SIMPLE = "simple"
    COLLECTION = "collection"


DECISION_MATRIX = {
    (EventKind.CONTINUANT, RelationshipKind.ANALYTIC): DqStrategy.SPECIALIZATION_AND_DQ,
    (EventKind.OCCURRENT, RelationshipKind.ANALYTIC): DqStrategy.DIRECT_QUALIFICATION,
    (EventKind.CONTINUANT, RelationshipKind.ATTRIBUTE): DqStrategy.SPECIALIZATION,
    (EventKind.OCCURRENT, RelationshipKind.ATTRIBUTE): DqStrategy.DEFAULT_INFERENCE,
}


def classify(event: EventKind, rel: RelationshipKind) -> DqStrategy:
    return DECISION_MATRIX[(event, rel)]


@dataclass(frozen=True)
class AnalyticDescriptor:
    kind: AnalyticKind
    idempotent: bool
    stochastic: bool
    arity: Arity
    monotonic: bool | None = None

    def __post_init__(self):
        implied = self.arity is Arity.ONE
        if self.monotonic is None:
            object.__setattr__(self, "monotonic", implied)
        elif self.monotonic != implied:
            raise ValueError("monotonic must hold exactly when input arity is ONE")


DESCRIPTORS = {
    AnalyticKind.PAGERANK: AnalyticDescriptor(AnalyticKind.PAGERANK, False, True, Arity.ONE),
    AnalyticKind.HITS_HUB: AnalyticDescriptor(AnalyticKind.HITS_HUB, False, True, Arity.ONE),
    AnalyticKind.HITS_AUTHORITY: AnalyticDescriptor(AnalyticKind.HITS_AUTHORITY, False, True, Arity.ONE),
    AnalyticKind.BETWEENNESS: AnalyticDescriptor(AnalyticKind.BETWEENNESS, False, True, Arity.ONE),
    # Query-term relevance of one document; fixed documents give fixed scores.
    AnalyticKind.VSM_SIMILARITY: AnalyticDescriptor(AnalyticKind.VSM_SIMILARITY, True, True, Arity.ONE),
}
VSM_PAIRWISE = AnalyticDescriptor(AnalyticKind.VSM_SIMILARITY, True, True, Arity.MANY)


def decide_model(d: AnalyticDescriptor) -> tuple[DqForm, EventKind]:
    form = DqForm.SIMPLE if d.arity is Arity.ONE else DqForm.COLLECTION
    event = EventKind.OCCURRENT if d.idempotent else EventKind.CONTINUANT
    return form, event


ANALYTIC_CLASSES = {
    AnalyticKind.PAGERANK: IRI(RELEVANCY + "PageRankAnalytic"),
    AnalyticKind.HITS_HUB: IRI(RELEVANCY + "HITSHubAnalytic"),
    AnalyticKind.HITS_AUTHORITY: IRI(RELEVANCY + "HITSAuthorityAnalytic"),
    AnalyticKind.BETWEENNESS: IRI(RELEVANCY + "BetweennessAnalytic"),
    AnalyticKind.VSM_SIMILARITY: IRI(RELEVANCY + "VSMSimilarityAnalytic"),
}
KIND_BY_CLASS = {v: k for k, v in ANALYTIC_CLASSES.items()}


@dataclass(frozen=True)
class DQEmission:
    kind: AnalyticKind
    form: DqForm
    emission_graph: IRI
    quads: QuadSet
    score_node: IRI
    activity_node: IRI
    inputs: tuple[IRI, ...]
    generated_at: datetime
    collection_node: IRI | None = None
    snapshot_node: IRI | None = None


class ShapeError(ValueError):
    pass


def _params_record(params) -> dict:
    if params is None:
        return {}
    if isinstance(params, Mapping):
        return dict(params)
    return params.record()


def _param_literal(value) -> Literal:
    if isinstance(value, bool):
        raise TypeError("boolean parameters are not supported")
    if isinstance(value, int):
        return Literal.integer(value)
    if isinstance(value, float):
        return Literal.double(value)
    return Literal(str(value))


def mint_digest(kind: AnalyticKind, inputs: Iterable[IRI], params: Mapping, timestamp: datetime) -> str:
    payload = json.dumps(
        {"kind": kind.value, "inputs": sorted(i.value for i in inputs),
         "params": params, "timestamp": format_datetime(timestamp)},
        sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:32]


def snapshot_iri(entity: IRI, timestamp: datetime) -> IRI:
    digest = hashlib.sha256(f"{entity.value}\n{format_datetime(timestamp)}".encode("utf-8")).hexdigest()
    return IRI(f"{RELEVANCY}Snapshot_{digest[:32]}")


def _as_iri(v) -> IRI:
    return v if isinstance(v, IRI) else IRI(v)


def _check_known(docs: Iterable[IRI], documents: Container | None) -> None:
    if documents is None:
        return
    for d in docs:
        if d not in documents:
            raise UnknownDocumentError(d.value)


def emit_specialization(entity: IRI | str, snapshot: IRI | str, timestamp: datetime,
                        *, graph: IRI | None = None) -> QuadSet:
    """Snapshot quads: ``snapshot prov:specializationOf entity`` plus its time."""
    entity, snapshot = _as_iri(entity), _as_iri(snapshot)
    graph = graph or snapshot
    return QuadSet([
        Quad(snapshot, PROV_SPECIALIZATION_OF, entity, graph),
        Quad(snapshot, PROV_GENERATED_AT_TIME, datetime_literal(timestamp), graph),
    ])


def emit_simple_dq(target_doc: IRI | str, score: float, kind: AnalyticKind, params, timestamp: datetime,
                   *, specialize: bool = False, documents: Container | None = None) -> DQEmission:
    """Entity-to-entity form: one score node, one activity, one used document.

    With ``specialize`` the emission also carries a snapshot of the document
    (``prov:specializationOf``) that points at the score via
    ``relevancy:hasScore``.
    """
    doc = _as_iri(target_doc)
    _check_known([doc], documents)
    record = _params_record(params)
    digest = mint_digest(kind, [doc], record, timestamp)
    g = IRI(f"{RELEVANCY}Emission_{digest}")
    score_node = IRI(f"{RELEVANCY}Score_{digest}")
    act = IRI(f"{RELEVANCY}Activity_{digest}")
    quads = [
        Quad(score_node, RDF_TYPE, PROV_ENTITY, g),
        Quad(score_node, REL_SCORE, Literal.double(score), g),
        Quad(score_node, PROV_GENERATED_AT_TIME, datetime_literal(timestamp), g),
        Quad(score_node, PROV_WAS_GENERATED_BY, act, g),
        Quad(act, RDF_TYPE, PROV_ACTIVITY, g),
        Quad(act, RDF_TYPE, ANALYTIC_CLASSES[kind], g),
        Quad(act, PROV_USED, doc, g),
    ]
    quads += _param_quads(act, record, g)
    snap = None
    if specialize:
        snap = snapshot_iri(doc, timestamp)
        quads += emit_specialization(doc, snap, timestamp, graph=g)
        quads.append(Quad(snap, REL_HAS_SCORE, score_node, g))
    emission = DQEmission(kind, DqForm.SIMPLE, g, QuadSet(quads), score_node, act, (doc,),
                          timestamp, snapshot_node=snap)
    check_emission(emission)
    return emission


def deviation_of(similarity: float) -> float:
    # Decimal keeps 1 - 0.7 at 0.3 rather than 0.30000000000000004.
    return float(Decimal(1) - Decimal(repr(float(similarity))))


def emit_collection_dq(input_docs: Iterable[IRI | str], similarity: float, params, timestamp: datetime,
                       *, kind: AnalyticKind = AnalyticKind.VSM_SIMILARITY,
                       documents: Container | None = None) -> DQEmission:
    """Entity-to-entities form: the score derives from a collection of the inputs.

    Records ``relevancy:deviation`` (one minus the similarity). Inputs are
    sorted before minting so their order does not matter.
    """
    docs = [_as_iri(d) for d in input_docs]
    if len(docs) < 2:
        raise ValueError("a collection emission needs at least two inputs")
    if len(set(docs)) != len(docs):
        raise ValueError("duplicate inputs")
    docs.sort(key=lambda i: i.value)
    _check_known(docs, documents)
    record = _params_record(params)
    digest = mint_digest(kind, docs, record, timestamp)
    g = IRI(f"{RELEVANCY}Emission_{digest}")
    score_node = IRI(f"{RELEVANCY}Score_{digest}")
    act = IRI(f"{RELEVANCY}Activity_{digest}")
    coll = IRI(f"{RELEVANCY}Collection_{digest}")
    quads = [
        Quad(score_node, RDF_TYPE, PROV_ENTITY, g),
        Quad(score_node, REL_DEVIATION, Literal.double(deviation_of(similarity)), g),
        Quad(score_node, PROV_GENERATED_AT_TIME, datetime_literal(timestamp), g),
        Quad(score_node, PROV_WAS_GENERATED_BY, act, g),
        Quad(score_node, PROV_WAS_DERIVED_FROM, coll, g),
        Quad(coll, RDF_TYPE, PROV_ENTITY, g),
        Quad(act, RDF_TYPE, PROV_ACTIVITY, g),
        Quad(act, RDF_TYPE, ANALYTIC_CLASSES[kind], g),
    ]
    for d in docs:
        quads.append(Quad(coll, DCTERMS_HAS_PART, d, g))
        quads.append(Quad(act, PROV_USED, d, g))
    quads += _param_quads(act, record, g)
    emission = DQEmission(kind, DqForm.COLLECTION, g, QuadSet(quads), score_node, act, tuple(docs),
                          timestamp, collection_node=coll)
    check_emission(emission)
    return emission


def _param_quads(act: IRI, record: Mapping, g: IRI) -> list[Quad]:
    out = []
    for key in sorted(record):
        if key not in PARAM_PREDICATES:
            raise ValueError(f"no predicate for parameter {key!r}")
        out.append(Quad(act, PARAM_PREDICATES[key], _param_literal(record[key]), g))
    return out


# -- shape checking ----------------------------------------------------------

def _objects(quads, s, p) -> list:
    return [q.object for q in quads if q.subject == s and q.predicate == p]


def check_emission(em: DQEmission) -> None:
    """Raise :class:`ShapeError` unless ``em`` has exactly the arcs of its form."""
    quads = list(em.quads)

    def fail(msg):
        raise ShapeError(f"{em.emission_graph.value}: {msg}")

    def one(s, p):
        objs = _objects(quads, s, p)
        if len(objs) != 1:
            fail(f"expected one {p.value} on {s.value}, found {len(objs)}")
        return objs[0]

    for q in quads:
        if q.graph != em.emission_graph:
            fail(f"quad outside the emission graph: {q}")
        if {q.subject, q.predicate, q.object} & REIFICATION_TERMS:
            fail("reification vocabulary present")

    s, a = em.score_node, em.activity_node
    expected = 0
    if set(_objects(quads, s, RDF_TYPE)) != {PROV_ENTITY}:
        fail("score node must be typed prov:Entity only")
    value_pred, absent_pred = ((REL_SCORE, REL_DEVIATION) if em.form is DqForm.SIMPLE
                               else (REL_DEVIATION, REL_SCORE))
    value = one(s, value_pred)
    if not (isinstance(value, Literal) and value.datatype == XSD_DOUBLE):
        fail(f"{value_pred.value} must be an xsd:double literal")
    if _objects(quads, s, absent_pred):
        fail(f"unexpected {absent_pred.value} on the score node")
    ts = one(s, PROV_GENERATED_AT_TIME)
    if not (isinstance(ts, Literal) and ts.datatype == XSD_DATETIME):
        fail("prov:generatedAtTime must be an xsd:dateTime literal")
    if one(s, PROV_WAS_GENERATED_BY) != a:
        fail("score node not generated by the activity")
    expected += 4

    if set(_objects(quads, a, RDF_TYPE)) != {PROV_ACTIVITY, ANALYTIC_CLASSES[em.kind]}:
        fail("activity must be typed prov:Activity and its analytic class")
    used = _objects(quads, a, PROV_USED)
    if len(used) != len(em.inputs) or set(used) != set(em.inputs):
        fail(f"prov:used arity {len(used)} does not match {len(em.inputs)} inputs")
    params = 0
    for pred in set(PARAM_PREDICATES.values()):
        n = len(_objects(quads, a, pred))
        if n > 1:
            fail(f"repeated parameter {pred.value}")
        params += n
    expected += 2 + len(used) + params

    derived = _objects(quads, s, PROV_WAS_DERIVED_FROM)
    if em.form is DqForm.SIMPLE:
        if len(em.inputs) != 1:
            fail("simple form takes exactly one input")
        if em.collection_node is not None or derived or any(q.predicate == DCTERMS_HAS_PART for q in quads):
            fail("simple form must not have a collection")
    else:
        c = em.collection_node
        if c is None or derived != [c]:
            fail("collection form needs prov:wasDerivedFrom to its collection")
        if _objects(quads, c, RDF_TYPE) != [PROV_ENTITY]:
            fail("collection must be typed prov:Entity")
        parts = _objects(quads, c, DCTERMS_HAS_PART)
        if len(parts) < 2 or len(parts) != len(em.inputs) or set(parts) != set(em.inputs):
            fail("collection parts must equal the inputs (at least two)")
        if em.snapshot_node is not None:
            fail("collection form has no snapshot")
        expected += 2 + len(parts)

    if em.snapshot_node is not None:
        n = em.snapshot_node
        if one(n, PROV_SPECIALIZATION_OF) != em.inputs[0]:
            fail("snapshot must specialize the scored document")
        if one(n, PROV_GENERATED_AT_TIME) != ts:
            fail("snapshot time differs from the score time")
        if one(n, REL_HAS_SCORE) != s:
            fail("snapshot must point at the score node")
        expected += 3

    if len(quads) != expected:
        fail(f"{len(quads)} quads, expected {expected}")


def load_emissions(quads: Iterable[Quad]) -> list[DQEmission]:
    """Rebuild emissions from persisted quads, one per ``Emission_`` graph.

    Document graphs are skipped. The result can be fed to :func:`check_emission`.
    """
    by_graph: dict[IRI, list[Quad]] = {}
    for q in quads:
        if q.graph.value.startswith(RELEVANCY + "Emission_"):
            by_graph.setdefault(q.graph, []).append(q)
    out = []
    for g in sorted(by_graph, key=lambda i: i.value):
        qs = by_graph[g]
        digest = g.value[len(RELEVANCY + "Emission_"):]
        score = IRI(f"{RELEVANCY}Score_{digest}")
        act = IRI(f"{RELEVANCY}Activity_{digest}")
        coll = IRI(f"{RELEVANCY}Collection_{digest}")
        kinds = [KIND_BY_CLASS[o] for o in _objects(qs, act, RDF_TYPE) if o in KIND_BY_CLASS]
        if len(kinds) != 1:
            raise ShapeError(f"{g.value}: activity has no single analytic class")
        times = _objects(qs, score, PROV_GENERATED_AT_TIME)
        if len(times) != 1:
            raise ShapeError(f"{g.value}: expected one prov:generatedAtTime on the score node")
        has_coll = any(q.subject == coll for q in qs)
        used = sorted(_objects(qs, act, PROV_USED), key=lambda i: i.value)
        snaps = [q.subject for q in qs if q.predicate == REL_HAS_SCORE]
        out.append(DQEmission(kinds[0], DqForm.COLLECTION if has_coll else DqForm.SIMPLE, g, QuadSet(qs),
                              score, act, tuple(used), parse_datetime(times[0].lexical),
                              collection_node=coll if has_coll else None,
                              snapshot_node=snaps[0] if len(snaps) == 1 else None))
    return out
