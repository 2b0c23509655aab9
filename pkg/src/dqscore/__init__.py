"""Relevancy scoring of RDF named-graph documents with provenance-qualified results."""
from .analytics import AnalyticKind, HitsParams, PageRankParams, VectorWeight, VsmParams
from .rdf import IRI, BNode, Literal, Quad, QuadSet, parse_nquads, parse_trig, serialize_nquads
from .store import DocumentStore, QuadPattern

__all__ = [
    "AnalyticKind", "HitsParams", "PageRankParams", "VectorWeight", "VsmParams",
    "IRI", "BNode", "Literal", "Quad", "QuadSet", "parse_nquads", "parse_trig", "serialize_nquads",
    "DocumentStore", "QuadPattern",
]
