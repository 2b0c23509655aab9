from __future__ import annotations

from datetime import timedelta

import pytest

from dqscore.query import evaluate, parse_query
from dqscore.rdf import IRI, Literal
from dqscore.scenario import (
    MISSIONS,
    SCENARIO_START,
    MessageType,
    ScenarioConfig,
    extract_semantics,
    generate_scenario,
    run_pipeline,
)

IM = "http://phoenix.rl.af.mil/im.owl#"
WKT = IRI("http://www.opengis.net/ont/geosparql#asWKT")


def test_default_scenario_shape():
    msgs = generate_scenario(ScenarioConfig())
    assert len(msgs) == 230
    times = [m.timestamp for m in msgs]
    assert all(a < b for a, b in zip(times, times[1:]))
    assert SCENARIO_START < times[0] and times[-1] - SCENARIO_START <= timedelta(seconds=600)
    assert {m.message_type for m in msgs} == set(MessageType)


def test_single_message():
    (m,) = generate_scenario(ScenarioConfig(seed=3, message_count=1))
    assert isinstance(m.message_type, MessageType)


def test_same_seed_same_bytes():
    a = [m.raw for m in generate_scenario(ScenarioConfig(seed=11))]
    b = [m.raw for m in generate_scenario(ScenarioConfig(seed=11))]
    c = [m.raw for m in generate_scenario(ScenarioConfig(seed=12))]
    assert a == b and a != c


@pytest.mark.parametrize("kwargs", [
    {"message_count": 0},
    {"duration": 0},
    {"type_mix": {MessageType.ATO: 0.5}},
    {"type_mix": {MessageType.ATO: 1.5, MessageType.BDA: -0.5}},
])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        ScenarioConfig(**kwargs)


def test_type_mix_respected():
    cfg = ScenarioConfig(message_count=50, type_mix={MessageType.BFT_PREDATOR: 1.0})
    assert {m.message_type for m in generate_scenario(cfg)} == {MessageType.BFT_PREDATOR}


def test_predator_extraction_shape():
    cfg = ScenarioConfig(message_count=20, type_mix={MessageType.BFT_PREDATOR: 1.0})
    for m in generate_scenario(cfg):
        g, quads = extract_semantics(m)
        assert all(q.graph == g for q in quads)
        preds = {q.predicate.value: q.object for q in quads}
        assert preds[IM + "formatId"] == Literal("cot")
        assert preds[IM + "informationType"] == Literal("mil.af.rl.cot")
        assert preds[IM + "hasPublisher"].value.startswith("http://phoenix.rl.af.mil/scenario#Pred")
        assert preds[IM + "involvesMission"].value.rsplit("Mission", 1)[1] in MISSIONS
        assert "POINT (" in preds[WKT.value].lexical


def test_report_messages_have_no_wkt():
    cfg = ScenarioConfig(message_count=10, type_mix={MessageType.INTEL_REPORT: 1.0})
    for m in generate_scenario(cfg):
        _, quads = extract_semantics(m)
        assert not [q for q in quads if q.predicate == WKT]
        assert any(q.predicate.value == IM + "concernsLocation" for q in quads)


def test_documents_do_not_share_blank_nodes():
    labels = []
    for m in generate_scenario(ScenarioConfig(seed=2, message_count=30)):
        _, quads = extract_semantics(m)
        labels.append({t for q in quads for t in (q.subject, q.object) if type(t).__name__ == "BNode"})
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            assert not a & b


def test_pipeline_small(tmp_path):
    cfg = ScenarioConfig(seed=6, message_count=30, duration=60)
    report = run_pipeline(cfg, ["pagerank", "hits", "betweenness", "vsm"], tmp_path, top_k=3)
    assert report.documents_ingested == 30
    assert report.emissions_per_analytic == {"pagerank": 30, "hits-hub": 30, "hits-authority": 30,
                                             "betweenness": 30, "vsm-similarity": 30}
    # top-k agrees with the score-ordered query
    assert [r.document_iri.value for r in report.sample_query] == [d for d, _ in report.top_k["pagerank"]]
    again = run_pipeline(cfg, ["pagerank", "hits", "betweenness", "vsm"], tmp_path, top_k=3)
    assert again.quads_inserted == 0 and again.new_documents == 0
    text = report.to_text()
    assert "documents_ingested\t30" in text and "top\tpagerank\t1\t" in text


def test_pipeline_without_analytics(tmp_path):
    report = run_pipeline(ScenarioConfig(message_count=12), [], tmp_path)
    assert report.documents_ingested == 12 and report.emissions_per_analytic == {}
    assert report.sample_query == []


def test_pipeline_rejects_unknown_analytic(tmp_path):
    with pytest.raises(ValueError):
        run_pipeline(ScenarioConfig(message_count=5), ["clustering"], tmp_path)


def test_partial_run_leaves_loadable_store(tmp_path):
    from dqscore.store import DocumentStore

    run_pipeline(ScenarioConfig(seed=1, message_count=15), ["pagerank"], tmp_path)
    store = DocumentStore.open(tmp_path)
    assert store.document_count == 15
    rows = evaluate(store, parse_query("?i rdf:type im:Information\nORDER BY pagerank"))
    assert len(rows) == 15 and all(r.score is not None for r in rows)
