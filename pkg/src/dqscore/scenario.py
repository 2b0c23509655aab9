"""Synthetic mission scenario and the end-to-end scoring pipeline.

Messages are plain ``KEY/value`` text, loosely in the slash-delimited style
of formatted military traffic. Extraction turns each one into a named graph
shaped like a Blue Force Track semantic document (information node,
payload node, publisher, mission and, for tracks, a WKT point).
"""
from __future__ import annotations

import enum
import hashlib
import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Mapping

from .analytics import AnalyticKind, HitsParams, PageRankParams, VsmParams
from .projection import ProjectionConfig, graph_stats, project_document_graph
from .query import ScoredBinding, evaluate, latest_scores, parse_query
from .rdf import IRI, QuadSet, parse_trig
from .scoring import ANALYTIC_NAMES, score_pass
from .store import DocumentStore
from .timeutil import VirtualClock, format_datetime, parse_datetime
from .vocab import IM, SCENARIO

SCENARIO_START = datetime(2012, 2, 11, 19, 0, 0, tzinfo=timezone.utc)
DOCUMENT_NS = "http://phoenix.rl.af.mil/documents/"


class MessageType(enum.Enum):
    ATO = "ATO"
    INTEL_REPORT = "INTEL_REPORT"
    BDA = "BDA"
    CAS_REQUEST = "CAS_REQUEST"
    BFT_F15 = "BFT_F15"
    BFT_PREDATOR = "BFT_PREDATOR"
    BFT_MRAP = "BFT_MRAP"
    RFT_JTAC = "RFT_JTAC"

    @property
    def is_track(self) -> bool:
        return self in _TRACKS


_TRACKS = {MessageType.BFT_F15, MessageType.BFT_PREDATOR, MessageType.BFT_MRAP, MessageType.RFT_JTAC}

_INFO_TYPES = {
    MessageType.ATO: "mil.af.rl.usmtf.ato",
    MessageType.INTEL_REPORT: "mil.af.rl.usmtf.intrep",
    MessageType.BDA: "mil.af.rl.usmtf.bda",
    MessageType.CAS_REQUEST: "mil.af.rl.usmtf.casreq",
}
_PUBLISHERS = {
    MessageType.ATO: ["AOC1"],
    MessageType.INTEL_REPORT: ["ISR1", "ISR2"],
    MessageType.BDA: ["BDA1", "BDA2"],
    MessageType.CAS_REQUEST: ["Ground1", "Ground2"],
    MessageType.BFT_F15: ["F15A", "F15B", "F15C"],
    MessageType.BFT_PREDATOR: ["Pred1", "Pred2"],
    MessageType.BFT_MRAP: ["MRAP1", "MRAP2", "MRAP3"],
    MessageType.RFT_JTAC: ["JTAC1", "JTAC2"],
}
_COT_TYPES = {
    MessageType.BFT_F15: "a-f-A-M-F-F",
    MessageType.BFT_PREDATOR: "a-f-A-M-F-Q-a",
    MessageType.BFT_MRAP: "a-f-G-E-V-A",
    MessageType.RFT_JTAC: "a-h-G",
}
_REMARKS = {
    MessageType.ATO: "tasking sortie package strike tanker window airspace allocation",
    MessageType.INTEL_REPORT: "observed convoy armor movement bridge checkpoint vehicles",
    MessageType.BDA: "damage assessment destroyed partial structure crater strike",
    MessageType.CAS_REQUEST: "troops contact request support danger close ordnance",
    MessageType.BFT_F15: "orbit altitude heading fuel station patrol",
    MessageType.BFT_PREDATOR: "orbit altitude sensor feed loiter patrol",
    MessageType.BFT_MRAP: "convoy route checkpoint halted moving patrol",
    MessageType.RFT_JTAC: "hostile vehicles observed moving convoy bridge",
}
MISSIONS = ["247A", "247B", "312C", "418D", "520E", "631F"]
LOCATION_COUNT = 16


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 0
    message_count: int = 230
    duration: int = 600
    type_mix: Mapping[MessageType, float] = field(
        default_factory=lambda: {t: 1.0 / len(MessageType) for t in MessageType})

    def __post_init__(self):
        if self.message_count < 1:
            raise ValueError("message_count must be at least 1")
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not self.type_mix or any(p < 0 for p in self.type_mix.values()):
            raise ValueError("type mix proportions must be non-negative")
        if abs(sum(self.type_mix.values()) - 1.0) > 1e-9:
            raise ValueError(f"type mix proportions sum to {sum(self.type_mix.values())}, not 1")
        if self.message_count > self.duration * 1000:
            raise ValueError("more messages than millisecond slots in the duration")


@dataclass(frozen=True)
class Message:
    timestamp: datetime
    message_type: MessageType
    raw: bytes


def _locations(seed: int) -> list[tuple[str, float, float]]:
    rng = random.Random(f"locations-{seed}")
    out = []
    for _ in range(LOCATION_COUNT):
        gid = "%08x-%04x-%04x-%04x-%012x" % (rng.getrandbits(32), rng.getrandbits(16), rng.getrandbits(16),
                                              rng.getrandbits(16), rng.getrandbits(48))
        lon = round(4.86035239692792 + rng.uniform(-0.25, 0.25), 8)
        lat = round(48.41661096320327 + rng.uniform(-0.25, 0.25), 8)
        out.append((gid, lon, lat))
    return out


def generate_scenario(cfg: ScenarioConfig = ScenarioConfig()) -> list[Message]:
    """Deterministic message stream with strictly increasing timestamps inside the duration."""
    rng = random.Random(cfg.seed)
    types = sorted(cfg.type_mix, key=lambda t: t.value)
    weights = [cfg.type_mix[t] for t in types]
    offsets = sorted(rng.sample(range(1, cfg.duration * 1000), cfg.message_count))
    locations = _locations(cfg.seed)
    messages = []
    for seq, ms in enumerate(offsets):
        mtype = rng.choices(types, weights)[0]
        ts = SCENARIO_START + timedelta(milliseconds=ms)
        publisher = rng.choice(_PUBLISHERS[mtype])
        mission = rng.choice(MISSIONS)
        gid, lon, lat = rng.choice(locations)
        words = _REMARKS[mtype].split()
        remarks = " ".join(rng.sample(words, rng.randint(3, len(words))))
        lines = [
            f"MSGTYPE/{mtype.value}",
            f"FORMAT/{'cot' if mtype.is_track else 'usmtf'}",
            f"SEQ/{seq:04d}",
            f"DTG/{format_datetime(ts)}",
            f"PUBLISHER/{publisher}",
            f"MISSION/{mission}",
            f"LOCATION/{gid}",
        ]
        if mtype.is_track:
            lines.append(f"POINT/{lon!r} {lat!r}")
            lines.append(f"COTTYPE/{_COT_TYPES[mtype]}")
        lines.append(f"REMARKS/{remarks}")
        messages.append(Message(ts, mtype, ("\n".join(lines) + "\n").encode("utf-8")))
    return messages


def _fields(raw: bytes) -> dict[str, str]:
    out = {}
    for line in raw.decode("utf-8").splitlines():
        key, sep, value = line.partition("/")
        if sep:
            out[key] = value
    return out


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


_TRIG_PREFIXES = f"""@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
@prefix im: <{IM}> .
@prefix scenario: <{SCENARIO}> .
@prefix time: <http://www.w3.org/2006/time#> .
"""


def semantic_document(raw: bytes) -> tuple[IRI, str, dict[str, str]]:
    """Render the TriG text extracted from one message."""
    f = _fields(raw)
    digest = hashlib.sha256(raw).hexdigest()
    graph = IRI(DOCUMENT_NS + digest[:32])
    info = f"<{IM}Information?id{digest[:28]}>"
    payload = f"<{IM}Payload?id{digest[28:56]}>"
    geometry = f"<http://www.lanuv.nrw.de/osiris/geometries/{f['LOCATION']}>"
    publisher = f"scenario:{f['PUBLISHER']}"
    mtype = MessageType(f["MSGTYPE"])
    ts = parse_datetime(f["DTG"])
    cot = mtype.is_track
    info_type = "mil.af.rl.cot" if cot else _INFO_TYPES[mtype]

    payload_type = _COT_TYPES[mtype] if cot else mtype.value
    lines = [_TRIG_PREFIXES, f"GRAPH <{graph.value}> {{"]
    lines.append(f'{payload}\n\trdf:type im:Payload ;\n\tim:formatId "{f["FORMAT"]}" ;\n'
                 f'\tim:type "{_escape(payload_type)}" .')
    pub = [f"\tim:publishedInformation {info}", f'\tim:publisherId "{_escape(f["PUBLISHER"])}"']
    if cot:
        pub.insert(1, f"\tim:hasLocation {geometry}")
    lines.append(f"{publisher}\n" + " ;\n".join(pub) + " .")
    info_arcs = [
        "\trdf:type im:Information",
        f"\tim:hasPayload {payload}",
        f"\tim:hasPublisher {publisher}",
        f'\tim:informationType "{info_type}"',
        f"\tim:involvesMission scenario:Mission{f['MISSION']}",
        f'\tim:involvesAsset "{_escape(f["PUBLISHER"])}"',
        f'\tim:remarks "{_escape(f["REMARKS"])}"',
        ("\tim:taskStart\n\t\t[ rdf:type time:Instant ;\n\t\ttime:inDateTime\n"
         "\t\t\t[ rdf:type time:DateTimeDescription ;\n"
         f'\t\t\ttime:day "---{ts.day:02d}"^^xsd:gDay ;\n'
         f'\t\t\ttime:hour "{ts.hour:02d}"^^xsd:nonNegativeInteger ;\n'
         f'\t\t\ttime:minute "{ts.minute:02d}"^^xsd:nonNegativeInteger ;\n'
         f'\t\t\ttime:month "--{ts.month:02d}"^^xsd:gMonth ;\n'
         f'\t\t\ttime:year "{ts.year}"^^xsd:gYear\n\t\t\t]\n\t\t]'),
    ]
    if not cot:
        info_arcs.insert(5, f"\tim:concernsLocation {geometry}")
    lines.append(f"{info}\n" + " ;\n".join(info_arcs) + " .")
    if cot:
        lon, lat = f["POINT"].split()
        lines.append(f"{geometry}\n\t<http://www.opengis.net/ont/geosparql#asWKT> "
                     f'"<http://www.opengis.net/def/crs/OGC/1.3/CRS84> POINT ({lon} {lat})"'
                     "^^<http://www.opengis.net/ont/sf#wktLiteral> .")
    lines.append("}\n")
    meta = {"publisher_id": f["PUBLISHER"], "info_type": info_type}
    return graph, "\n".join(lines), meta


def extract_semantics(message: Message | bytes) -> tuple[IRI, QuadSet]:
    raw = message.raw if isinstance(message, Message) else message
    graph, trig, _ = semantic_document(raw)
    # Per-document blank node labels so documents never share a blank node.
    return graph, parse_trig(trig, bnode_prefix=f"d{graph.value[-32:-24]}b")


# -- pipeline ----------------------------------------------------------------

@dataclass
class PipelineReport:
    documents_ingested: int = 0
    new_documents: int = 0
    edges_projected: int = 0
    emissions_per_analytic: dict[str, int] = field(default_factory=dict)
    quads_inserted: int = 0
    stage_seconds: dict[str, float] = field(default_factory=dict)
    top_k: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    sample_query: list[ScoredBinding] = field(default_factory=list)
    sample_query_kind: str | None = None

    def to_text(self) -> str:
        out = [
            f"documents_ingested\t{self.documents_ingested}",
            f"new_documents\t{self.new_documents}",
            f"edges_projected\t{self.edges_projected}",
            f"quads_inserted\t{self.quads_inserted}",
        ]
        for kind, n in self.emissions_per_analytic.items():
            out.append(f"emissions\t{kind}\t{n}")
        for stage, secs in self.stage_seconds.items():
            out.append(f"stage_seconds\t{stage}\t{secs:.3f}")
        for kind, ranked in self.top_k.items():
            for rank, (doc, score) in enumerate(ranked, 1):
                out.append(f"top\t{kind}\t{rank}\t{doc}\t{score!r}")
        return "\n".join(out) + "\n"


def scoring_clock(cfg: ScenarioConfig) -> VirtualClock:
    """Scoring passes start one second after the scenario window closes."""
    return VirtualClock(SCENARIO_START + timedelta(seconds=cfg.duration + 1))


def ingest_scenario(store: DocumentStore, cfg: ScenarioConfig) -> tuple[int, int]:
    """Ingest generated messages; already-present identical documents are skipped.

    Returns ``(new_documents, quads_inserted)``.
    """
    new = inserted = 0
    for msg in generate_scenario(cfg):
        graph, trig, meta = semantic_document(msg.raw)
        if store.has_document(graph):
            if store.get_raw(graph) != msg.raw:
                raise ValueError(f"stored document {graph} differs from the regenerated message")
            continue
        _, quads = extract_semantics(msg)
        store.ingest_document(msg.raw, graph, quads, ingest_time=msg.timestamp, **meta)
        new += 1
        inserted += len(quads)
    return new, inserted


def run_pipeline(cfg: ScenarioConfig, analytics: Iterable[str], store_root, *,
                 top_k: int = 5,
                 projection: ProjectionConfig = ProjectionConfig(),
                 pagerank_params: PageRankParams = PageRankParams(),
                 hits_params: HitsParams = HitsParams(),
                 vsm_params: VsmParams = VsmParams(query_term="convoy"),
                 clock: VirtualClock | None = None) -> PipelineReport:
    """Ingest, project, score, qualify, persist, then run a score-ordered query."""
    analytics = [a.lower() for a in analytics]
    for a in analytics:
        if a not in ANALYTIC_NAMES:
            raise ValueError(f"unknown analytic {a!r}")
    clock = clock or scoring_clock(cfg)
    report = PipelineReport()
    store = DocumentStore.open(Path(store_root))

    t0 = time.perf_counter()
    report.new_documents, report.quads_inserted = ingest_scenario(store, cfg)
    store.save()
    report.documents_ingested = store.document_count
    report.stage_seconds["ingest"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    graph = project_document_graph(store, projection)
    report.edges_projected = graph_stats(graph).edge_count
    report.stage_seconds["project"] = time.perf_counter() - t0

    params = {"pagerank": pagerank_params, "hits": hits_params, "betweenness": None, "vsm": vsm_params}
    for name in analytics:
        t0 = time.perf_counter()
        for sp in score_pass(store, name, params[name], clock.tick(), graph=graph):
            kind = sp.result.kind.value
            report.emissions_per_analytic[kind] = report.emissions_per_analytic.get(kind, 0) + len(sp.emissions)
            report.quads_inserted += sp.inserted
            report.top_k[kind] = sp.result.scores.ranked()[:top_k]
        store.save()
        report.stage_seconds[f"score:{name}"] = time.perf_counter() - t0

    if report.top_k:
        t0 = time.perf_counter()
        kind = next(iter(report.top_k))
        query = parse_query(f"?info rdf:type im:Information\nORDER BY {kind} DESC\nLIMIT {top_k}")
        report.sample_query = evaluate(store, query)
        report.sample_query_kind = kind
        report.stage_seconds["query"] = time.perf_counter() - t0
    return report


def store_report(store: DocumentStore, *, top_k: int = 5,
                 projection: ProjectionConfig = ProjectionConfig()) -> PipelineReport:
    """Summarize a store on disk: documents, projected edges, persisted scores."""
    report = PipelineReport(documents_ingested=store.document_count)
    if store.document_count:
        report.edges_projected = graph_stats(project_document_graph(store, projection)).edge_count
    for kind in AnalyticKind:
        latest = latest_scores(store, kind)
        if not latest:
            continue
        report.emissions_per_analytic[kind.value] = len(latest)
        ranked = sorted(((d.value, r.score) for d, r in latest.items()), key=lambda kv: (-kv[1], kv[0]))
        report.top_k[kind.value] = ranked[:top_k]
    return report
