"""Independent reference computations used as test oracles.

None of these share code with the package kernels: PageRank and HITS use
dense numpy matrices, betweenness enumerates every shortest path, and the
projection oracle scans all document pairs.
"""
from __future__ import annotations

import itertools
from collections import deque
from fractions import Fraction

import numpy as np


def _matrix(vertices, edges):
    ix = {v: i for i, v in enumerate(vertices)}
    a = np.zeros((len(vertices), len(vertices)))
    for (u, v), w in edges.items():
        a[ix[u], ix[v]] = w
    return a


def dense_pagerank(vertices, edges, alpha=0.85, iterations=1000):
    """``edges`` maps (u, v) -> weight. Column-stochastic Google matrix, power iterated."""
    n = len(vertices)
    a = _matrix(vertices, edges)
    m = np.zeros((n, n))
    for j in range(n):
        row = a[j]
        m[:, j] = row / row.sum() if row.sum() > 0 else 1.0 / n
    google = alpha * m + (1 - alpha) / n
    x = np.full(n, 1.0 / n)
    for _ in range(iterations):
        x = google @ x
    return dict(zip(vertices, x / x.sum()))


def dense_hits(vertices, edges, iterations=20000):
    """Authorities by power iteration on AᵀA from Aᵀ·1; hubs = A·auth, both L2-normalized."""
    a = _matrix(vertices, edges)
    auth = a.T @ np.ones(len(vertices))
    if not auth.any():
        zero = dict.fromkeys(vertices, 0.0)
        return dict(zero), dict(zero)
    ata = a.T @ a
    auth /= np.linalg.norm(auth)
    for _ in range(iterations):
        auth = ata @ auth
        auth /= np.linalg.norm(auth)
    hub = a @ auth
    hub /= np.linalg.norm(hub)
    return dict(zip(vertices, hub)), dict(zip(vertices, auth))


def _bfs(adj, s):
    dist = {s: 0}
    q = deque([s])
    while q:
        v = q.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def _all_shortest_paths(adj, s, t, length):
    paths = []

    def walk(path):
        v = path[-1]
        if len(path) - 1 == length:
            if v == t:
                paths.append(list(path))
            return
        for w in adj[v]:
            if w not in path:
                path.append(w)
                walk(path)
                path.pop()

    walk([s])
    return paths


def naive_betweenness(vertices, edge_pairs):
    """Exact rational betweenness by listing every shortest s-t path."""
    adj = {v: sorted({w for (u, w) in edge_pairs if u == v}) for v in vertices}
    score = {v: Fraction(0) for v in vertices}
    for s, t in itertools.permutations(vertices, 2):
        dist = _bfs(adj, s)
        if t not in dist:
            continue
        paths = _all_shortest_paths(adj, s, t, dist[t])
        for p in paths:
            for v in p[1:-1]:
                score[v] += Fraction(1, len(paths))
    return score


def pairwise_projection(docs, quads_by_doc, shared=True, ignore_predicates=frozenset()):
    """Edge -> witness count by comparing every ordered pair of documents.

    ``docs`` is in ingest order; ``quads_by_doc`` maps doc IRI string to a
    list of (subject, predicate, object) strings where non-IRIs are ``None``.
    """
    doc_set = set(docs)
    edges = {}
    for gi, g in enumerate(docs):
        for hi, h in enumerate(docs):
            if g == h:
                continue
            subjects_h = {s for s, _, _ in quads_by_doc[h] if s is not None}
            count = 0
            for _, _, o in quads_by_doc[g]:
                if o is None:
                    continue
                if o == h:
                    count += 1
                if o in subjects_h:
                    count += 1
            if shared and gi > hi:
                def mentions(d):
                    out = set()
                    for s, p, o in quads_by_doc[d]:
                        if s is not None:
                            out.add(s)
                        if o is not None and p not in ignore_predicates:
                            out.add(o)
                    return out - doc_set
                count += len(mentions(g) & mentions(h))
            if count:
                edges[(g, h)] = count
    return edges
