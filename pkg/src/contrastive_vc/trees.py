"""Enumeration of unrooted leaf-labelled trees without degree-2 vertices.

Every such tree on ``n`` leaves is a contraction of some binary tree, so we
grow all binary trees by stepwise leaf insertion, contract every subset of
their internal edges, and deduplicate by split system.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations


@dataclass(frozen=True)
class Topology:
    n_leaves: int
    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    splits: frozenset

    @property
    def leaves(self) -> tuple[int, ...]:
        return tuple(range(self.n_leaves))

    def paths(self) -> dict[tuple[int, int], frozenset[int]]:
        """Edge indices on the path between every pair of leaves ``u < v``."""
        adj = {v: [] for v in range(self.n_vertices)}
        for e, (u, v) in enumerate(self.edges):
            adj[u].append((v, e))
            adj[v].append((u, e))
        out = {}
        for src in range(self.n_leaves):
            via = {src: frozenset()}
            stack = [src]
            while stack:
                u = stack.pop()
                for v, e in adj[u]:
                    if v not in via:
                        via[v] = via[u] | {e}
                        stack.append(v)
            for dst in range(src + 1, self.n_leaves):
                out[(src, dst)] = via[dst]
        return out


def _binary_trees(n: int):
    if n <= 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return

    def grow(edges, k, next_id):
        if k == n:
            yield edges
            return
        for i, (u, v) in enumerate(edges):
            w = next_id
            new = edges[:i] + edges[i + 1:] + [(u, w), (w, v), (w, k)]
            yield from grow(new, k + 1, next_id + 1)

    yield from grow([(0, n), (1, n), (2, n)], 3, n + 1)


def _splits(n, edges):
    adj = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    out = set()
    for u, v in edges:
        if u < n or v < n:
            continue
        # leaves on v's side of edge (u, v)
        side, stack, seen = set(), [v], {u, v}
        while stack:
            a = stack.pop()
            if a < n:
                side.add(a)
            for b in adj[a]:
                if b not in seen:
                    seen.add(b)
                    stack.append(b)
        if 0 in side:
            side = set(range(n)) - side
        out.add(frozenset(side))
    return frozenset(out)


def _contract(n, edges, chosen):
    parent = {}

    def find(a):
        while parent.get(a, a) != a:
            a = parent[a]
        return a

    for u, v in chosen:
        ru, rv = find(u), find(v)
        parent[max(ru, rv)] = min(ru, rv)
    kept = [(find(u), find(v)) for u, v in edges if (u, v) not in chosen]
    internal = sorted({a for e in kept for a in e if a >= n})
    relabel = {a: n + i for i, a in enumerate(internal)}
    relabel.update({i: i for i in range(n)})
    return [(relabel[u], relabel[v]) for u, v in kept], n + len(internal)


@lru_cache(maxsize=None)
def topologies(n: int) -> tuple[Topology, ...]:
    """All distinct topologies on leaves ``0..n-1``: the star first, then by
    increasing number of internal edges, ties broken by split system."""
    if n <= 1:
        return (Topology(n, max(n, 1), (), frozenset()),)
    found = {}
    for edges in _binary_trees(n):
        internal = [e for e in edges if e[0] >= n and e[1] >= n]
        for r in range(len(internal) + 1):
            for chosen in combinations(internal, r):
                new, nv = _contract(n, edges, set(chosen))
                key = _splits(n, new)
                if key not in found:
                    found[key] = Topology(n, nv, tuple(new), key)

    def order(t):
        return len(t.splits), sorted(tuple(sorted(s)) for s in t.splits)

    return tuple(sorted(found.values(), key=order))
