from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analytics import HitsParams, PageRankParams, VectorWeight, VsmParams
from .projection import ProjectionConfig, project_document_graph, write_edge_list
from .query import QueryError, evaluate, parse_query, render_tsv
from .rdf import RdfSyntaxError
from .scenario import ScenarioConfig, ingest_scenario, run_pipeline, store_report
from .scoring import ANALYTIC_NAMES, next_timestamp, score_pass, vsm_pairwise_pass
from .store import DocumentStore, StoreError
from .timeutil import parse_datetime


def _add_store(p: argparse.ArgumentParser) -> None:
    p.add_argument("--store", required=True, type=Path, help="store directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dqscore",
                                     description="Score named-graph documents and record the scores as provenance.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="generate and ingest a synthetic scenario")
    p.add_argument("--scenario-seed", type=int, default=0)
    p.add_argument("--count", type=int, default=230)
    p.add_argument("--duration", type=int, default=600, help="scenario length in seconds")
    _add_store(p)

    p = sub.add_parser("score", help="run one analytic and persist its DQ emissions")
    _add_store(p)
    p.add_argument("--analytic", required=True, choices=ANALYTIC_NAMES)
    p.add_argument("--alpha", type=float, default=0.85)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--query-term", help="VSM query term")
    p.add_argument("--against", help="VSM: compare this document with every other one")
    p.add_argument("--vector-weight", choices=["tf", "tfidf"], default="tfidf")
    p.add_argument("--timestamp", help="generation time (default: one second after the latest in the store)")

    p = sub.add_parser("query", help="evaluate a pattern query file")
    _add_store(p)
    p.add_argument("--file", required=True, type=Path)

    p = sub.add_parser("export", help="write the store as N-Quads")
    _add_store(p)
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--edges", type=Path, help="also write the projected document edge list here")

    p = sub.add_parser("report", help="summarize documents, edges and persisted scores")
    _add_store(p)
    p.add_argument("--top", type=int, default=5)

    p = sub.add_parser("run", help="full pipeline: ingest, project, score, qualify, persist, query")
    _add_store(p)
    p.add_argument("--scenario-seed", type=int, default=0)
    p.add_argument("--count", type=int, default=230)
    p.add_argument("--duration", type=int, default=600)
    p.add_argument("--analytics", default="pagerank,hits,betweenness")
    p.add_argument("--top", type=int, default=5)
    return parser


def _open_existing(root: Path) -> DocumentStore:
    if not root.is_dir():
        raise StoreError(f"no store at {root}")
    return DocumentStore.open(root)


def _score(args) -> str:
    store = _open_existing(args.store)
    ts = parse_datetime(args.timestamp) if args.timestamp else next_timestamp(store)
    if args.analytic == "pagerank":
        params = PageRankParams(args.alpha, args.tolerance or 1e-9, args.max_iterations or 100)
    elif args.analytic == "hits":
        params = HitsParams(args.tolerance or 1e-10, args.max_iterations or 10000)
    elif args.analytic == "vsm":
        params = VsmParams(args.query_term, VectorWeight[args.vector_weight.upper()])
    else:
        params = None
    if args.analytic == "vsm" and args.against:
        passes = [vsm_pairwise_pass(store, args.against, params, ts)]
    else:
        passes = score_pass(store, args.analytic, params, ts)
    store.save()
    return "".join(f"{sp.result.kind.value}\t{sp.strategy.value}\t{len(sp.emissions)} emissions\t"
                   f"{sp.inserted} quads\n" for sp in passes)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "ingest":
            store = DocumentStore.open(args.store)
            cfg = ScenarioConfig(seed=args.scenario_seed, message_count=args.count, duration=args.duration)
            new, quads = ingest_scenario(store, cfg)
            store.save()
            out = f"ingested {new} documents ({quads} quads); store holds {store.document_count}\n"
        elif args.command == "score":
            out = _score(args)
        elif args.command == "query":
            store = _open_existing(args.store)
            query = parse_query(args.file.read_text(encoding="utf-8"))
            out = render_tsv(evaluate(store, query), query.variables())
        elif args.command == "export":
            store = _open_existing(args.store)
            data = store.export_nquads()
            if args.edges:
                write_edge_list(project_document_graph(store, ProjectionConfig()), args.edges)
            if args.out:
                args.out.write_text(data, encoding="utf-8", newline="\n")
                out = ""
            else:
                out = data
        elif args.command == "report":
            out = store_report(_open_existing(args.store), top_k=args.top).to_text()
        else:
            cfg = ScenarioConfig(seed=args.scenario_seed, message_count=args.count, duration=args.duration)
            names = [a.strip() for a in args.analytics.split(",") if a.strip()]
            report = run_pipeline(cfg, names, args.store, top_k=args.top)
            out = report.to_text()
    except (StoreError, QueryError, RdfSyntaxError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
