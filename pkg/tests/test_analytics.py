from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_digraph
from dqscore.analytics import (
    AnalyticKind,
    EmptyGraphError,
    HitsParams,
    PageRankParams,
    VectorWeight,
    VsmParams,
    betweenness,
    document_frequencies,
    hits,
    hits_update,
    pagerank,
    tokenize,
    vsm_raw,
    vsm_similarity,
)
from dqscore.projection import AnalyticGraph
from oracles import dense_hits, dense_pagerank, naive_betweenness
from test_rdf import TRACK_DOCUMENT

TIGHT = PageRankParams(0.85, 1e-12, 1000)


def _weights(g):
    return {k: e.weight for k, e in g.edges.items()}


# -- PageRank ----------------------------------------------------------------

def test_pagerank_two_cycle():
    g = AnalyticGraph.from_edges("AB", [("A", "B"), ("B", "A")])
    assert pagerank(g).scores == pytest.approx({"A": 0.5, "B": 0.5}, abs=1e-12)


def test_pagerank_single_vertex():
    assert pagerank(AnalyticGraph.from_edges("A")).scores == {"A": 1.0}


def test_pagerank_empty_graph():
    with pytest.raises(EmptyGraphError):
        pagerank(AnalyticGraph.from_edges([]))


# Exact rational solution of the linear system: 686/1769, 380/1769, 703/1769.
FOUR_EDGE = {"A": 0.38778971170152626, "B": 0.21481062747314866, "C": 0.397399660825325}


def test_pagerank_four_edges_frozen():
    g = AnalyticGraph.from_edges("ABC", [("A", "B"), ("A", "C"), ("B", "C"), ("C", "A")])
    got = pagerank(g, TIGHT).scores
    dense = dense_pagerank(g.vertices, _weights(g))
    for v in "ABC":
        assert got[v] == pytest.approx(FOUR_EDGE[v], abs=1e-12)
        assert got[v] == pytest.approx(dense[v], abs=1e-8)


def test_pagerank_properties_random(rng):
    for _ in range(100):
        g = random_digraph(rng, 9)
        sm = pagerank(g, TIGHT)
        n = len(g.vertices)
        assert abs(sum(sm.scores.values()) - 1) < 1e-9
        assert min(sm.scores.values()) >= 0.15 / n - 1e-12
        # relabelling the vertices permutes the scores
        perm = list(g.vertices)
        rng.shuffle(perm)
        ren = dict(zip(g.vertices, perm))
        g2 = AnalyticGraph.from_edges(sorted(perm), [(ren[u], ren[v]) for u, v in g.edges])
        sm2 = pagerank(g2, TIGHT)
        for v in g.vertices:
            assert sm2.scores[ren[v]] == pytest.approx(sm.scores[v], abs=1e-10)


def test_pagerank_weighted_matches_dense(rng):
    for _ in range(30):
        vs = [f"v{i}" for i in range(rng.randint(2, 8))]
        edges = [(u, v, float(rng.randint(1, 4))) for u in vs for v in vs if u != v and rng.random() < .4]
        g = AnalyticGraph.from_edges(vs, edges)
        dense = dense_pagerank(vs, _weights(g))
        got = pagerank(g, TIGHT).scores
        assert max(abs(got[v] - dense[v]) for v in vs) < 1e-8


def test_pagerank_reports_convergence():
    g = AnalyticGraph.from_edges("ABC", [("A", "B"), ("B", "C")])
    assert pagerank(g).converged
    assert not pagerank(g, PageRankParams(max_iterations=1)).converged


@pytest.mark.parametrize("kwargs", [{"alpha": 0}, {"alpha": 1}, {"tolerance": 0}, {"max_iterations": 0}])
def test_pagerank_param_validation(kwargs):
    with pytest.raises(ValueError):
        PageRankParams(**kwargs)


# -- HITS --------------------------------------------------------------------

def test_hits_single_edge():
    hub, auth = hits(AnalyticGraph.from_edges("AB", [("A", "B")]))
    assert (hub["A"], hub["B"], auth["A"], auth["B"]) == (1.0, 0.0, 0.0, 1.0)


def test_hits_star():
    hub, auth = hits(AnalyticGraph.from_edges("ABCD", [("A", "B"), ("A", "C"), ("A", "D")]))
    assert hub["A"] == pytest.approx(1.0, abs=1e-15)
    for v in "BCD":
        assert auth[v] == pytest.approx(1 / math.sqrt(3), abs=1e-15)


def test_hits_no_edges_all_zero():
    hub, auth = hits(AnalyticGraph.from_edges("AB"))
    assert set(hub.scores.values()) == {0.0} and set(auth.scores.values()) == {0.0}


def test_hits_matches_dense_oracle():
    rng = random.Random(88)
    checked = 0
    while checked < 20:
        g = random_digraph(rng, 8, min_vertices=8)
        if not g.edges:
            continue
        hub, auth = hits(g)
        o_hub, o_auth = dense_hits(g.vertices, _weights(g))
        for v in g.vertices:
            assert hub[v] == pytest.approx(o_hub[v], abs=1e-6)
            assert auth[v] == pytest.approx(o_auth[v], abs=1e-6)
        checked += 1


def test_hits_update_is_one_round():
    g = AnalyticGraph.from_edges("ABC", [("A", "B"), ("B", "C"), ("A", "C")])
    hub, auth = hits(g, HitsParams(max_iterations=1))
    n = 1 / math.sqrt(3)
    h1, a1 = hits_update(g, dict.fromkeys("ABC", n))
    assert hub.scores == h1 and auth.scores == a1


# -- Betweenness -------------------------------------------------------------

def test_betweenness_path():
    assert betweenness(AnalyticGraph.from_edges("ABC", [("A", "B"), ("B", "C")])).scores == \
        {"A": 0.0, "B": 1.0, "C": 0.0}


def test_betweenness_bidirectional_triangle():
    g = AnalyticGraph.from_edges("ABC", [(u, v) for u in "ABC" for v in "ABC" if u != v])
    assert set(betweenness(g).scores.values()) == {0.0}


def test_betweenness_split_credit():
    g = AnalyticGraph.from_edges("SABT", [("S", "A"), ("S", "B"), ("A", "T"), ("B", "T")])
    assert betweenness(g, exact=True).scores == {"S": 0, "A": Fraction(1, 2), "B": Fraction(1, 2), "T": 0}


def test_betweenness_float_close_to_exact(rng):
    for _ in range(30):
        g = random_digraph(rng, 7)
        exact = betweenness(g, exact=True).scores
        approx = betweenness(g).scores
        assert all(abs(approx[v] - float(exact[v])) < 1e-12 for v in g.vertices)
        assert naive_betweenness(g.vertices, set(g.edges)) == exact


# -- VSM ---------------------------------------------------------------------

def test_tokenize_examples():
    # both "a" and "b" are single characters, so nothing survives
    assert tokenize("A a b") == {}
    assert tokenize("Ab ab b") == {"ab": 2}
    assert tokenize(b"") == {}
    assert tokenize(TRACK_DOCUMENT)["cot"] >= 1
    assert tokenize(b"\xff\xfeok") == {"ok": 1}
    assert tokenize("snake_case x2") == {"snake": 1, "case": 1, "x2": 1}


# (ln 2.5^2 + ln 2^2) / (ln 4^2 + ln 2.5^2 + ln 2^2), evaluated at 30 digits.
THREE_DOC_COSINE = 0.407187310375692066750780028669


def test_vsm_three_document_oracle():
    docs = [tokenize(t) for t in ("alpha strike mission", "strike mission report", "mission planning cell")]
    df = document_frequencies(docs)
    assert vsm_similarity(docs[0], docs[1], df, 3, VsmParams()) == pytest.approx(THREE_DOC_COSINE, abs=1e-12)
    assert vsm_raw(docs[0], docs[1], df, 3) == pytest.approx(math.log(2.5) ** 2 + math.log(2) ** 2, abs=1e-12)


def test_vsm_tf_scheme():
    a, b = tokenize("aa bb bb"), tokenize("bb cc")
    tf = VsmParams(vector_weight=VectorWeight.TF)
    assert vsm_similarity(a, b, {}, 1, tf) == pytest.approx(2 / math.sqrt(5 * 2), abs=1e-15)


def test_vsm_edge_cases():
    v = tokenize("alpha beta")
    assert vsm_similarity(v, v, {"alpha": 1}, 5) == 1.0
    assert vsm_similarity(v, tokenize("gamma"), {}, 5) == 0.0
    assert vsm_similarity({}, v, {}, 5) == 0.0
    with pytest.raises(ValueError):
        vsm_similarity(v, v, {}, 0)


_vec = st.dictionaries(st.sampled_from([f"t{i}" for i in range(12)]), st.integers(1, 9), max_size=8)


@settings(max_examples=200, deadline=None)
@given(_vec, _vec, st.integers(1, 50))
def test_vsm_bounds_and_symmetry(a, b, n):
    df = document_frequencies([a, b])
    s = vsm_similarity(a, b, df, n)
    assert 0.0 <= s <= 1.0
    assert s == vsm_similarity(b, a, df, n)


def test_analytic_kind_parse():
    assert AnalyticKind.parse("PageRank") is AnalyticKind.PAGERANK
    assert AnalyticKind.parse("hits-hub") is AnalyticKind.HITS_HUB
    with pytest.raises(ValueError):
        AnalyticKind.parse("clustering")
