"""Link-analysis and vector-space kernels over document graphs.

All kernels are pure functions of their inputs. Vertex iteration follows
``AnalyticGraph.vertices`` order and edges are visited in sorted order, so
floating-point results are reproducible bit for bit.
"""
from __future__ import annotations

import enum
import math
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .projection import AnalyticGraph


class AnalyticKind(enum.Enum):
    PAGERANK = "pagerank"
    HITS_HUB = "hits-hub"
    HITS_AUTHORITY = "hits-authority"
    BETWEENNESS = "betweenness"
    VSM_SIMILARITY = "vsm-similarity"

    @classmethod
    def parse(cls, name: str) -> "AnalyticKind":
        key = name.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key:
                return kind
        raise ValueError(f"unknown analytic: {name!r}")


class EmptyGraphError(ValueError):
    pass


@dataclass(frozen=True)
class PageRankParams:
    alpha: float = 0.85
    tolerance: float = 1e-9
    max_iterations: int = 100

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    def record(self) -> dict:
        return {"alpha": float(self.alpha), "tolerance": float(self.tolerance),
                "maxIterations": int(self.max_iterations)}


@dataclass(frozen=True)
class HitsParams:
    tolerance: float = 1e-10
    max_iterations: int = 10000

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    def record(self) -> dict:
        return {"tolerance": float(self.tolerance), "maxIterations": int(self.max_iterations)}


class VectorWeight(enum.IntEnum):
    TF = 1
    TFIDF = 2


@dataclass(frozen=True)
class VsmParams:
    query_term: str | None = None
    vector_weight: VectorWeight = VectorWeight.TFIDF

    def record(self) -> dict:
        rec = {"vectorweight": int(self.vector_weight)}
        if self.query_term is not None:
            rec["queryterm"] = self.query_term
        return rec


@dataclass(frozen=True)
class ScoreMap:
    kind: AnalyticKind
    scores: Mapping[str, float]
    params: object = None
    iterations: int = 0
    converged: bool = True
    extra: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, key: str) -> float:
        return self.scores[key]

    def __len__(self) -> int:
        return len(self.scores)

    def ranked(self) -> list[tuple[str, float]]:
        """Highest score first, ties by IRI."""
        return sorted(self.scores.items(), key=lambda kv: (-kv[1], kv[0]))


# -- PageRank ----------------------------------------------------------------

def pagerank(g: AnalyticGraph, params: PageRankParams = PageRankParams()) -> ScoreMap:
    """Weighted PageRank by power iteration.

    Dangling vertices spread their mass uniformly. Iteration stops once the
    L1 change drops below ``params.tolerance``.
    """
    n = len(g.vertices)
    if n == 0:
        raise EmptyGraphError("pagerank needs at least one vertex")
    index = {v: i for i, v in enumerate(g.vertices)}
    out_weight = [0.0] * n
    for (u, _), e in g.edges.items():
        out_weight[index[u]] += e.weight
    links = [(index[u], index[v], e.weight / out_weight[index[u]])
             for (u, v), e in sorted(g.edges.items())]
    dangling = [i for i in range(n) if out_weight[i] == 0.0]

    alpha = params.alpha
    x = [1.0 / n] * n
    converged = False
    it = 0
    for it in range(1, params.max_iterations + 1):
        leak = sum(x[i] for i in dangling)
        base = (1.0 - alpha) / n + alpha * leak / n
        nxt = [base] * n
        for u, v, p in links:
            nxt[v] += alpha * x[u] * p
        err = sum(abs(a - b) for a, b in zip(nxt, x))
        x = nxt
        if err < params.tolerance:
            converged = True
            break
    total = sum(x)
    return ScoreMap(AnalyticKind.PAGERANK, {v: x[i] / total for v, i in index.items()},
                    params, iterations=it, converged=converged)


# -- HITS --------------------------------------------------------------------

def _normalize(vec: list[float]) -> list[float]:
    norm = math.sqrt(sum(c * c for c in vec))
    if norm == 0.0:
        return [0.0] * len(vec)
    return [c / norm for c in vec]


def hits_update(g: AnalyticGraph, hubs: Mapping[str, float]) -> tuple[dict[str, float], dict[str, float]]:
    """One round: authorities from hubs, then hubs from the new authorities."""
    verts = g.vertices
    edges = sorted(g.edges.items())
    auth = dict.fromkeys(verts, 0.0)
    for (u, v), e in edges:
        auth[v] += e.weight * hubs[u]
    auth = dict(zip(verts, _normalize([auth[v] for v in verts])))
    hub = dict.fromkeys(verts, 0.0)
    for (u, v), e in edges:
        hub[u] += e.weight * auth[v]
    hub = dict(zip(verts, _normalize([hub[v] for v in verts])))
    return hub, auth


def hits(g: AnalyticGraph, params: HitsParams = HitsParams()) -> tuple[ScoreMap, ScoreMap]:
    """Hub and authority scores, each L2-normalized.

    Stops when the largest per-vertex change in either vector is below the
    tolerance. A graph without edges gets all-zero vectors.
    """
    n = len(g.vertices)
    if n == 0:
        raise EmptyGraphError("hits needs at least one vertex")
    hub = dict.fromkeys(g.vertices, 1.0 / math.sqrt(n))
    auth = dict.fromkeys(g.vertices, 0.0)
    converged = False
    it = 0
    for it in range(1, params.max_iterations + 1):
        new_hub, new_auth = hits_update(g, hub)
        delta = max(max(abs(new_hub[v] - hub[v]) for v in g.vertices),
                    max(abs(new_auth[v] - auth[v]) for v in g.vertices))
        hub, auth = new_hub, new_auth
        if delta < params.tolerance:
            converged = True
            break
    return (ScoreMap(AnalyticKind.HITS_HUB, hub, params, iterations=it, converged=converged),
            ScoreMap(AnalyticKind.HITS_AUTHORITY, auth, params, iterations=it, converged=converged))


# -- Betweenness -------------------------------------------------------------

def betweenness(g: AnalyticGraph, *, exact: bool = False) -> ScoreMap:
    """Directed, unweighted shortest-path betweenness (Brandes), unnormalized.

    With ``exact=True`` dependencies accumulate as :class:`~fractions.Fraction`
    and the returned scores are fractions.
    """
    zero = Fraction(0) if exact else 0.0
    succ = {v: sorted(w for w, _ in ws) for v, ws in g.successors().items()}
    score = dict.fromkeys(g.vertices, zero)
    for s in g.vertices:
        stack = []
        preds = {v: [] for v in g.vertices}
        sigma = dict.fromkeys(g.vertices, 0)
        dist = dict.fromkeys(g.vertices, -1)
        sigma[s] = 1
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in succ[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(g.vertices, zero)
        while stack:
            w = stack.pop()
            for v in preds[w]:
                ratio = Fraction(sigma[v], sigma[w]) if exact else sigma[v] / sigma[w]
                delta[v] += ratio * (1 + delta[w])
            if w != s:
                score[w] += delta[w]
    return ScoreMap(AnalyticKind.BETWEENNESS, score, None)


# -- Vector space model ------------------------------------------------------

_WORD = re.compile(r"[^\W_]+")


def tokenize(raw: bytes | str) -> Counter:
    """Lowercased alphanumeric runs of length >= 2, counted."""
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="replace")
    return Counter(t for t in _WORD.findall(raw.lower()) if len(t) >= 2)


def document_frequencies(vectors) -> Counter:
    df = Counter()
    for vec in vectors:
        df.update(t for t, c in vec.items() if c > 0)
    return df


def weigh(tf: Mapping[str, float], corpus_df: Mapping[str, int], n_docs: int,
          scheme: VectorWeight) -> dict[str, float]:
    """Apply the weighting scheme. TFIDF uses ``tf * ln(1 + n/df)``; unseen terms count df=1."""
    if scheme is VectorWeight.TF:
        return {t: float(c) for t, c in tf.items() if c}
    return {t: c * math.log(1.0 + n_docs / max(corpus_df.get(t, 0), 1))
            for t, c in tf.items() if c}


def _weighted_pair(a, b, corpus_df, n_docs, params):
    if n_docs < 1:
        raise ValueError("n_docs must be at least 1")
    return (weigh(a, corpus_df, n_docs, params.vector_weight),
            weigh(b, corpus_df, n_docs, params.vector_weight))


def vsm_raw(a: Mapping[str, float], b: Mapping[str, float], corpus_df: Mapping[str, int],
            n_docs: int, params: VsmParams = VsmParams()) -> float:
    """Unnormalized dot product of the weighted vectors."""
    wa, wb = _weighted_pair(a, b, corpus_df, n_docs, params)
    return sum(wa[t] * wb[t] for t in sorted(wa.keys() & wb.keys()))


def vsm_similarity(a: Mapping[str, float], b: Mapping[str, float], corpus_df: Mapping[str, int],
                   n_docs: int, params: VsmParams = VsmParams()) -> float:
    """Cosine similarity of weighted term vectors, clamped to [0, 1].

    Zero-norm inputs score 0.
    """
    wa, wb = _weighted_pair(a, b, corpus_df, n_docs, params)
    na = sum(wa[t] * wa[t] for t in sorted(wa))
    nb = sum(wb[t] * wb[t] for t in sorted(wb))
    if na == 0.0 or nb == 0.0:
        return 0.0
    dot = sum(wa[t] * wb[t] for t in sorted(wa.keys() & wb.keys()))
    # sqrt(na*nb) rather than sqrt(na)*sqrt(nb): exact 1.0 for identical vectors.
    return min(1.0, max(0.0, dot / math.sqrt(na * nb)))
