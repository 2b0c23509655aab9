"""Quad store with a raw-document region keyed by named-graph IRI.

Quads are held in memory under two indexes (graph-first and
predicate-first). Raw bytes go to ``<root>/raw/<urlencoded-iri>`` as they
are ingested; :meth:`DocumentStore.save` snapshots quads to
``<root>/quads.nq`` and document metadata to ``<root>/documents.json``.
"""
from __future__ import annotations

import json
import os
import tempfile
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Iterator
from urllib.parse import quote

from .rdf import IRI, BNode, Quad, QuadSet, Term, parse_nquads, serialize_nquads
from .timeutil import format_datetime, parse_datetime


class StoreError(Exception):
    pass


class DuplicateDocumentError(StoreError):
    pass


class ForeignGraphError(StoreError):
    pass


class UnknownDocumentError(StoreError, KeyError):
    def __str__(self) -> str:
        return f"unknown document: {self.args[0]}"


@dataclass(frozen=True)
class QuadPattern:
    """Each position is a term or ``None`` for a wildcard."""
    subject: IRI | BNode | None = None
    predicate: IRI | None = None
    object: Term | None = None
    graph: IRI | None = None

    def __post_init__(self):
        if self.predicate is not None and not isinstance(self.predicate, IRI):
            raise TypeError("a bound predicate must be an IRI")

    def matches(self, quad: Quad) -> bool:
        return ((self.subject is None or quad.subject == self.subject)
                and (self.predicate is None or quad.predicate == self.predicate)
                and (self.object is None or quad.object == self.object)
                and (self.graph is None or quad.graph == self.graph))


@dataclass(frozen=True)
class DocumentRecord:
    graph_iri: IRI
    raw_bytes: bytes
    quads: QuadSet
    ingest_time: datetime
    publisher_id: str | None = None
    info_type: str | None = None
    sequence: int = field(default=0, compare=False)


def _nested():
    return defaultdict(lambda: defaultdict(set))


class DocumentStore:
    """Documents-as-named-graphs store.

    Writes are serialized by a lock; reads take the same lock so they never
    see a half-ingested document.
    """

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else None
        self._lock = threading.RLock()
        self._docs: dict[IRI, DocumentRecord] = {}
        self._order: list[IRI] = []
        self._all: set[Quad] = set()
        self._gspo: dict[IRI, dict] = defaultdict(_nested)
        self._posg: dict[IRI, dict] = defaultdict(_nested)
        if self.root is not None:
            (self.root / "raw").mkdir(parents=True, exist_ok=True)

    # -- persistence ---------------------------------------------------------

    @classmethod
    def open(cls, root: str | os.PathLike) -> "DocumentStore":
        """Open (or create) a store directory, loading any snapshot in it."""
        store = cls(root)
        store.root.mkdir(parents=True, exist_ok=True)
        nq = store.root / "quads.nq"
        if nq.exists():
            store._add_quads(parse_nquads(nq.read_text(encoding="utf-8")))
        manifest = store.root / "documents.json"
        if manifest.exists():
            for entry in json.loads(manifest.read_text(encoding="utf-8")):
                iri = IRI(entry["graph"])
                raw = store._raw_path(iri).read_bytes()
                record = DocumentRecord(
                    graph_iri=iri,
                    raw_bytes=raw,
                    quads=store._graph_quads(iri),
                    ingest_time=parse_datetime(entry["ingest_time"]),
                    publisher_id=entry.get("publisher_id"),
                    info_type=entry.get("info_type"),
                    sequence=len(store._order),
                )
                store._docs[iri] = record
                store._order.append(iri)
        return store

    def save(self) -> None:
        if self.root is None:
            raise StoreError("store has no root directory")
        with self._lock:
            manifest = [
                {
                    "graph": rec.graph_iri.value,
                    "ingest_time": format_datetime(rec.ingest_time),
                    "publisher_id": rec.publisher_id,
                    "info_type": rec.info_type,
                }
                for rec in (self._docs[i] for i in self._order)
            ]
            _atomic_write(self.root / "quads.nq", serialize_nquads(self._all).encode("utf-8"))
            _atomic_write(self.root / "documents.json",
                          (json.dumps(manifest, indent=1) + "\n").encode("utf-8"))

    def export_nquads(self) -> str:
        with self._lock:
            return serialize_nquads(self._all)

    def _raw_path(self, iri: IRI) -> Path:
        return self.root / "raw" / quote(iri.value, safe="")

    # -- documents -----------------------------------------------------------

    def ingest_document(self, raw_bytes: bytes, graph_iri: IRI | str, quads: Iterable[Quad] = (),
                        *, ingest_time: datetime | None = None,
                        publisher_id: str | None = None, info_type: str | None = None) -> DocumentRecord:
        graph_iri = _as_iri(graph_iri)
        quads = quads if isinstance(quads, QuadSet) else QuadSet(quads)
        for q in quads:
            if q.graph != graph_iri:
                raise ForeignGraphError(f"quad in graph {q.graph} offered for document {graph_iri}")
        if ingest_time is None:
            ingest_time = datetime.now(timezone.utc)
        raw_bytes = bytes(raw_bytes)
        with self._lock:
            if graph_iri in self._docs:
                raise DuplicateDocumentError(f"document already ingested: {graph_iri}")
            if self.root is not None:
                _atomic_write(self._raw_path(graph_iri), raw_bytes)
            record = DocumentRecord(graph_iri, raw_bytes, quads, ingest_time,
                                    publisher_id, info_type, sequence=len(self._order))
            self._add_quads(quads)
            self._docs[graph_iri] = record
            self._order.append(graph_iri)
        return record

    def get_raw(self, graph_iri: IRI | str) -> bytes:
        graph_iri = _as_iri(graph_iri)
        with self._lock:
            try:
                return self._docs[graph_iri].raw_bytes
            except KeyError:
                raise UnknownDocumentError(graph_iri.value) from None

    def get_document(self, graph_iri: IRI | str) -> DocumentRecord:
        graph_iri = _as_iri(graph_iri)
        with self._lock:
            try:
                return self._docs[graph_iri]
            except KeyError:
                raise UnknownDocumentError(graph_iri.value) from None

    def documents(self) -> list[DocumentRecord]:
        """All document records in ingest order."""
        with self._lock:
            return [self._docs[i] for i in self._order]

    def document_iris(self) -> list[IRI]:
        with self._lock:
            return list(self._order)

    def has_document(self, graph_iri: IRI | str) -> bool:
        return _as_iri(graph_iri) in self._docs

    def __contains__(self, graph_iri) -> bool:
        return self.has_document(graph_iri)

    @property
    def document_count(self) -> int:
        return len(self._order)

    def __len__(self) -> int:
        return len(self._all)

    # -- quads ---------------------------------------------------------------

    def insert_quads(self, graph_iri: IRI | str, quads: Iterable[Quad]) -> int:
        """Add quads to ``graph_iri``; returns how many were not already stored."""
        graph_iri = _as_iri(graph_iri)
        quads = list(quads)
        for q in quads:
            if q.graph != graph_iri:
                raise ForeignGraphError(f"quad in graph {q.graph} offered for graph {graph_iri}")
        with self._lock:
            return self._add_quads(quads)

    def _add_quads(self, quads: Iterable[Quad]) -> int:
        added = 0
        for q in quads:
            if q in self._all:
                continue
            self._all.add(q)
            self._gspo[q.graph][q.subject][q.predicate].add(q.object)
            self._posg[q.predicate][q.object][q.subject].add(q.graph)
            added += 1
        return added

    def _graph_quads(self, graph: IRI) -> QuadSet:
        return QuadSet(self.iter_quads(QuadPattern(graph=graph)))

    def iter_quads(self, pattern: QuadPattern = QuadPattern()) -> Iterator[Quad]:
        """Unordered matches; the result is materialized under the read lock."""
        with self._lock:
            return iter(list(self._scan(pattern)))

    def _scan(self, pat: QuadPattern) -> Iterator[Quad]:
        s, p, o, g = pat.subject, pat.predicate, pat.object, pat.graph
        if g is not None:
            by_subject = self._gspo.get(g)
            if not by_subject:
                return
            subjects = [s] if s is not None else list(by_subject)
            for subj in subjects:
                by_pred = by_subject.get(subj)
                if not by_pred:
                    continue
                preds = [p] if p is not None else list(by_pred)
                for pred in preds:
                    objs = by_pred.get(pred)
                    if not objs:
                        continue
                    if o is not None:
                        if o in objs:
                            yield Quad(subj, pred, o, g)
                    else:
                        for obj in objs:
                            yield Quad(subj, pred, obj, g)
        elif p is not None:
            by_object = self._posg.get(p)
            if not by_object:
                return
            objects = [o] if o is not None else list(by_object)
            for obj in objects:
                by_subject = by_object.get(obj)
                if not by_subject:
                    continue
                subjects = [s] if s is not None else list(by_subject)
                for subj in subjects:
                    for graph in by_subject.get(subj, ()):
                        yield Quad(subj, p, obj, graph)
        else:
            for q in self._all:
                if pat.matches(q):
                    yield q

    def match_quads(self, pattern: QuadPattern = QuadPattern()) -> QuadSet:
        return QuadSet(self.iter_quads(pattern))

    def graph_iris(self) -> list[IRI]:
        with self._lock:
            return sorted((g for g, subs in self._gspo.items() if subs), key=lambda i: i.value)


def _as_iri(value: IRI | str) -> IRI:
    return value if isinstance(value, IRI) else IRI(value)


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
