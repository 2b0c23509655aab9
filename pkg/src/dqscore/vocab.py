"""Namespaces and terms used in provenance emissions."""
from __future__ import annotations

from .rdf import IRI, RDF

PROV = "http://www.w3.org/ns/prov#"
DCTERMS = "http://purl.org/dc/terms/"
RELEVANCY = "http://phoenix.rl.af.mil/relevancy#"
IM = "http://phoenix.rl.af.mil/im.owl#"
SCENARIO = "http://phoenix.rl.af.mil/scenario#"
TIME = "http://www.w3.org/2006/time#"
GEO = "http://www.opengis.net/ont/geosparql#"
SF = "http://www.opengis.net/ont/sf#"

RDF_TYPE = IRI(RDF + "type")

PROV_ENTITY = IRI(PROV + "Entity")
PROV_ACTIVITY = IRI(PROV + "Activity")
PROV_USED = IRI(PROV + "used")
PROV_WAS_GENERATED_BY = IRI(PROV + "wasGeneratedBy")
PROV_WAS_DERIVED_FROM = IRI(PROV + "wasDerivedFrom")
PROV_GENERATED_AT_TIME = IRI(PROV + "generatedAtTime")
PROV_SPECIALIZATION_OF = IRI(PROV + "specializationOf")

DCTERMS_HAS_PART = IRI(DCTERMS + "hasPart")

REL_SCORE = IRI(RELEVANCY + "score")
REL_DEVIATION = IRI(RELEVANCY + "deviation")
REL_HAS_SCORE = IRI(RELEVANCY + "hasScore")
REL_ALPHA = IRI(RELEVANCY + "alpha")
REL_TOLERANCE = IRI(RELEVANCY + "tolerance")
REL_MAX_ITERATIONS = IRI(RELEVANCY + "maxIterations")
REL_QUERYTERM = IRI(RELEVANCY + "queryterm")
REL_VECTORWEIGHT = IRI(RELEVANCY + "vectorweight")

# parameter record key -> predicate
PARAM_PREDICATES = {
    "alpha": REL_ALPHA,
    "tolerance": REL_TOLERANCE,
    "maxIterations": REL_MAX_ITERATIONS,
    "queryterm": REL_QUERYTERM,
    "vectorweight": REL_VECTORWEIGHT,
}

REIFICATION_TERMS = frozenset(IRI(RDF + n) for n in ("Statement", "subject", "predicate", "object"))

DEFAULT_PREFIXES = {
    "rdf": RDF,
    "xsd": "http://www.w3.org/2001/XMLSchema#",
    "prov": PROV,
    "dcterms": DCTERMS,
    "relevancy": RELEVANCY,
    "im": IM,
    "scenario": SCENARIO,
    "time": TIME,
    "geo": GEO,
    "sf": SF,
}
