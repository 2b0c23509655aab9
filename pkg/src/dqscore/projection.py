"""Project the quad store onto a directed document-to-document graph."""
from __future__ import annotations

import enum
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .rdf import IRI, RDF_TYPE
from .store import DocumentStore, QuadPattern


class WeightMode(enum.Enum):
    UNIT = "unit"
    MULTIPLICITY = "multiplicity"


@dataclass(frozen=True)
class Edge:
    weight: float
    count: int


@dataclass(frozen=True)
class AnalyticGraph:
    """Vertices are IRI strings; ``edges`` maps ``(from, to)`` to an :class:`Edge`."""
    vertices: tuple[str, ...]
    edges: Mapping[tuple[str, str], Edge] = field(default_factory=dict)

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValueError("duplicate vertex")
        for (u, v), e in self.edges.items():
            if u not in vs or v not in vs:
                raise ValueError(f"edge endpoint not a vertex: {u} -> {v}")
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if not e.weight > 0:
                raise ValueError(f"non-positive weight on {u} -> {v}")
            if e.count < 1:
                raise ValueError(f"provenance count below 1 on {u} -> {v}")

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[tuple] = ()) -> "AnalyticGraph":
        """Build from ``(u, v)`` or ``(u, v, weight)`` tuples; repeats fold into the count."""
        folded: dict[tuple[str, str], list] = {}
        for e in edges:
            u, v = e[0], e[1]
            w = float(e[2]) if len(e) > 2 else 1.0
            if (u, v) in folded:
                folded[(u, v)][1] += 1
            else:
                folded[(u, v)] = [w, 1]
        return cls(tuple(vertices), {k: Edge(w, c) for k, (w, c) in sorted(folded.items())})

    def successors(self) -> dict[str, list[tuple[str, float]]]:
        out = {v: [] for v in self.vertices}
        for (u, v), e in self.edges.items():
            out[u].append((v, e.weight))
        return out

    def predecessors(self) -> dict[str, list[tuple[str, float]]]:
        inc = {v: [] for v in self.vertices}
        for (u, v), e in self.edges.items():
            inc[v].append((u, e.weight))
        return inc

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class ProjectionConfig:
    link_predicates: frozenset[IRI] = frozenset()
    include_shared_resource_links: bool = True
    weight_mode: WeightMode = WeightMode.UNIT
    # Objects of these predicates are vocabulary (classes), not shared resources.
    shared_resource_ignore_predicates: frozenset[IRI] = frozenset({IRI(RDF_TYPE)})


@dataclass(frozen=True)
class GraphStats:
    vertex_count: int
    edge_count: int
    max_out_degree: int
    dangling_count: int


def project_document_graph(store: DocumentStore, config: ProjectionConfig = ProjectionConfig()) -> AnalyticGraph:
    """Build the document graph.

    Direct links: a quad in G whose object IRI is document H, or is a subject
    in H, gives G -> H. Shared-resource links: when documents G and H (G
    ingested first) both mention a non-document IRI as subject or object,
    H -> G. An edge's count is the number of witnessing quads plus shared
    resources behind it.
    """
    docs = [rec.graph_iri for rec in store.documents()]
    doc_set = set(docs)
    allowed = config.link_predicates

    per_doc = {}
    for g in docs:
        quads = [q for q in store.iter_quads(QuadPattern(graph=g))
                 if not allowed or q.predicate in allowed]
        per_doc[g] = quads

    subject_index: dict[IRI, list[IRI]] = defaultdict(list)
    for g in docs:
        for subj in sorted({q.subject for q in per_doc[g] if isinstance(q.subject, IRI)},
                           key=lambda i: i.value):
            subject_index[subj].append(g)

    counts: dict[tuple[IRI, IRI], int] = defaultdict(int)
    for g in docs:
        for q in per_doc[g]:
            o = q.object
            if not isinstance(o, IRI):
                continue
            if o in doc_set and o != g:
                counts[(g, o)] += 1
            for h in subject_index.get(o, ()):
                if h != g:
                    counts[(g, h)] += 1

    if config.include_shared_resource_links:
        ignore = config.shared_resource_ignore_predicates
        mentions: dict[IRI, list[IRI]] = defaultdict(list)
        for g in docs:
            seen = set()
            for q in per_doc[g]:
                if isinstance(q.subject, IRI):
                    seen.add(q.subject)
                if isinstance(q.object, IRI) and q.predicate not in ignore:
                    seen.add(q.object)
            for r in seen - doc_set:
                mentions[r].append(g)
        for r, gs in mentions.items():
            # gs is in ingest order: later documents cite earlier ones.
            for j in range(1, len(gs)):
                for i in range(j):
                    counts[(gs[j], gs[i])] += 1

    edges = {}
    for (u, v), c in sorted(counts.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)):
        w = 1.0 if config.weight_mode is WeightMode.UNIT else float(c)
        edges[(u.value, v.value)] = Edge(w, c)
    return AnalyticGraph(tuple(d.value for d in docs), edges)


def graph_stats(g: AnalyticGraph) -> GraphStats:
    out_degree = {v: 0 for v in g.vertices}
    for u, _ in g.edges:
        out_degree[u] += 1
    return GraphStats(
        vertex_count=len(g.vertices),
        edge_count=len(g.edges),
        max_out_degree=max(out_degree.values(), default=0),
        dangling_count=sum(1 for d in out_degree.values() if d == 0),
    )


def write_edge_list(g: AnalyticGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for (u, v), e in sorted(g.edges.items()):
            fh.write(f"{u}\t{v}\t{e.weight!r}\n")
