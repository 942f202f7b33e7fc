"""Deterministic graph, chain and matching corpora for the verification
suites and the scenario runner.  Everything is driven by an explicit
random.Random instance, so runs are reproducible per seed.
"""

from __future__ import annotations

import random
from collections import deque
from itertools import combinations
from typing import Iterator, Optional

from .chains import Chain0, Chain1
from .graphs import Edge, OrientedGraph
from .k0_map import expand_graph
from .k1_map import EdgeMatching, canonical_matching, permuted_matching


# ---------------------------------------------------------------------------
# small named graphs


def path_graph(n: int) -> OrientedGraph:
    return OrientedGraph(
        range(n), [Edge(f"e{i}", i, i + 1) for i in range(n - 1)]
    )


def cycle_graph(n: int) -> OrientedGraph:
    edges = [Edge(f"e{i}", i, (i + 1) % n) for i in range(n)]
    return OrientedGraph(range(n), edges)


def triangle_with_chord_orientation() -> tuple[OrientedGraph, Chain1]:
    """Triangle oriented 0->1, 1->2, 0->2 and the cycle e01 + e12 - e02."""
    g = OrientedGraph(
        range(3),
        [Edge("e01", 0, 1), Edge("e12", 1, 2), Edge("e02", 0, 2)],
    )
    return g, Chain1(g, {"e01": 1, "e12": 1, "e02": -1})


def figure_eight() -> tuple[OrientedGraph, Chain1]:
    """Two 2-gons through distinct side vertices, wedged at a center with
    in-flow and out-flow 2; the cycle takes every edge once."""
    g = OrientedGraph(
        ["z", "a", "b"],
        [
            Edge("f1", "z", "a"),
            Edge("g1", "a", "z"),
            Edge("f2", "z", "b"),
            Edge("g2", "b", "z"),
        ],
    )
    return g, Chain1(g, {"f1": 1, "g1": 1, "f2": 1, "g2": 1})


def complete_graph(n: int) -> OrientedGraph:
    edges = [
        Edge(f"e{i}-{j}", i, j) for i, j in combinations(range(n), 2)
    ]
    return OrientedGraph(range(n), edges)


def is_connected(g: OrientedGraph) -> bool:
    if not g.vertices:
        return True
    seen = {g.vertices[0]}
    queue = deque(seen)
    while queue:
        cur = queue.popleft()
        for nxt in g.neighbors(cur):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen) == len(g.vertices)


# ---------------------------------------------------------------------------
# random corpora


def random_graph(
    rng: random.Random, max_vertices: int = 30, max_edges: int = 60
) -> OrientedGraph:
    n = rng.randint(2, max_vertices)
    pairs = list(combinations(range(n), 2))
    cap = min(max_edges, len(pairs))
    m = rng.randint(min(1, cap), cap)
    chosen = rng.sample(pairs, m)
    edges = []
    for i, (u, v) in enumerate(sorted(chosen)):
        if rng.random() < 0.5:
            u, v = v, u
        edges.append(Edge(f"e{i}", u, v))
    return OrientedGraph(range(n), edges)


def _spanning_forest(g: OrientedGraph) -> set:
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = set()
    for e in g.edges:
        ru, rv = find(e.source), find(e.target)
        if ru != rv:
            parent[ru] = rv
            tree.add(e.id)
    return tree


def fundamental_cycle(g: OrientedGraph, tree: set, extra: Edge) -> Chain1:
    """The extra edge plus the tree path closing it up, as a 1-cycle."""
    adj: dict = {v: [] for v in g.vertices}
    for e in g.edges:
        if e.id in tree:
            adj[e.source].append((e, e.target, 1))
            adj[e.target].append((e, e.source, -1))
    start, goal = extra.target, extra.source
    prev = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            break
        for e, nxt, sign in adj[cur]:
            if nxt not in prev:
                prev[nxt] = (cur, e, sign)
                queue.append(nxt)
    coeffs = {extra.id: 1}
    cur = goal
    while prev[cur] is not None:
        back, e, sign = prev[cur]
        coeffs[e.id] = coeffs.get(e.id, 0) + sign
        cur = back
    return Chain1(g, coeffs)


def random_cycle(
    rng: random.Random,
    g: OrientedGraph,
    bound: int = 3,
    nonzero: bool = False,
) -> Chain1:
    """Random integer combination of fundamental cycles with all
    coefficients bounded by the given strict bound in magnitude."""
    tree = _spanning_forest(g)
    extras = [e for e in g.edges if e.id not in tree]
    zero = Chain1(g, {})
    if not extras:
        return zero
    basis = [fundamental_cycle(g, tree, e) for e in extras]
    for _ in range(30):
        chosen = rng.sample(basis, min(len(basis), rng.randint(1, 4)))
        acc = zero
        for b in chosen:
            acc = acc + b.scaled(rng.choice([-2, -1, 1, 1, 2]))
        if acc.coeffs and max(abs(v) for v in acc.coeffs.values()) <= bound:
            return acc
        if not acc.coeffs and not nonzero:
            return acc
    return rng.choice(basis)  # coefficients are +-1, always within bound


def random_multiplicity_cycle(rng: random.Random, g: OrientedGraph) -> Optional[Chain1]:
    """A cycle whose expansion has a vertex with at least two ingoing
    copies, or None when the graph is a forest."""
    tree = _spanning_forest(g)
    extras = [e for e in g.edges if e.id not in tree]
    if not extras:
        return None
    base = fundamental_cycle(g, tree, rng.choice(extras))
    return base.scaled(rng.choice([2, -2, 3, -3]))


def random_chain1(rng: random.Random, g: OrientedGraph, bound: int = 3) -> Chain1:
    if not g.edges:
        return Chain1(g, {})
    m = rng.randint(1, min(len(g.edges), 8))
    picked = rng.sample(list(g.edges), m)
    return Chain1(
        g, {e.id: rng.choice([v for v in range(-bound, bound + 1) if v]) for e in picked}
    )


def random_chain0(rng: random.Random, g: OrientedGraph, bound: int = 3) -> Chain0:
    m = rng.randint(1, min(len(g.vertices), 8))
    picked = rng.sample(list(g.vertices), m)
    return Chain0(
        g, {v: rng.choice([x for x in range(-bound, bound + 1) if x]) for v in picked}
    )


def random_matching_pair(
    rng: random.Random, gamma: Chain1
) -> tuple[EdgeMatching, EdgeMatching]:
    """Canonical matching and an independent uniformly random one."""
    g = expand_graph(gamma.graph, gamma)
    alpha = canonical_matching(g)
    positions = {}
    for x in g.vertices:
        n_x = g.in_count(x)
        if n_x >= 2:
            perm = list(range(n_x))
            rng.shuffle(perm)
            positions[x] = tuple(perm)
    beta = permuted_matching(g, positions)
    return alpha, beta


def random_tree(rng: random.Random, n: int) -> OrientedGraph:
    edges = []
    for i in range(1, n):
        p = rng.randrange(i)
        u, v = (p, i) if rng.random() < 0.5 else (i, p)
        edges.append(Edge(f"t{i}", u, v))
    return OrientedGraph(range(n), edges)


def tree_plus_edges(rng: random.Random, n: int, extra: int) -> OrientedGraph:
    """Connected graph: a random tree plus the given number of extra edges
    (parallel edges permitted), so the cycle rank is exactly `extra`."""
    tree = random_tree(rng, n)
    edges = list(tree.edges)
    for i in range(extra):
        u = rng.randrange(n)
        v = rng.randrange(n)
        while v == u:
            v = rng.randrange(n)
        edges.append(Edge(f"x{i}", u, v))
    return OrientedGraph(range(n), edges)


def all_connected_graphs(n: int) -> Iterator[OrientedGraph]:
    """Every simple connected graph on vertices 0..n-1 (canonical
    orientation: lower endpoint is the source).  Feasible for small n."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        chosen = [p for i, p in enumerate(pairs) if mask >> i & 1]
        if n > 1 and len(chosen) < n - 1:
            continue
        g = OrientedGraph(
            range(n), [Edge(f"e{u}-{v}", u, v) for u, v in chosen]
        )
        if is_connected(g):
            yield g
