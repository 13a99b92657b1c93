"""Synthetic factor graphs: loopy chains, ladders and random small graphs."""
from __future__ import annotations

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .factor_graph import FactorGraph, edge_vertices
from .factor_table import FactorTable


def random_table(rng, scope, domains):
    """Table over ``scope`` (any order) with entries uniform in (0, 1]."""
    scope = sorted(scope)
    shape = [domains[x] for x in scope]
    return FactorTable(scope, 1.0 - rng.random(shape))


def chain_nontree_edges(n, k, length):
    """Edges added to an n-variable chain: ``x_i`` joins ``f_{i+length-1}``."""
    return [
        (f"x{i}", f"f{i + length - 1}")
        for i in range(k, n, k)
        if i + length - 1 <= n - 1
    ]


def gen_chain(n, k, length, seed=0):
    """Markov chain ``x1 - f1 - x2 - ... - xn`` with periodic short cycles.

    Every ``f_i`` starts over ``(x_i, x_{i+1})`` and these edges form the
    spanning tree. For each ``i`` that is a multiple of ``k``, ``x_i`` is also
    added to ``f_{i+length-1}`` as a non-tree edge, closing a cycle. Variables
    are binary; table entries are drawn uniformly from (0, 1].
    """
    if n < 2 or k < 2 or length < 2:
        raise ValueError("gen_chain needs n >= 2, k >= 2 and length >= 2")
    rng = np.random.default_rng(seed)
    g = FactorGraph()
    for i in range(1, n + 1):
        g.add_variable(f"x{i}", 2)
    extra = {}
    for x, f in chain_nontree_edges(n, k, length):
        extra.setdefault(f, []).append(x)
    tree = []
    for i in range(1, n):
        f = f"f{i}"
        scope = [f"x{i}", f"x{i + 1}"] + extra.get(f, [])
        g.add_factor(f, random_table(rng, scope, g.variables))
        tree += [(f"x{i}", f), (f"x{i + 1}", f)]
    g.set_spanning_tree(tree)
    return g


def ladder(n=8, tree="comb", seed=0):
    """Pairwise ladder: top rail ``1..n``, bottom rail ``a, b, ...``, rungs.

    Every pairwise edge ``(u, w)`` becomes a factor ``f_u_w``. With
    ``tree="comb"`` the spanning tree is the top rail plus every rung, and
    each bottom-rail factor hangs off its left variable. With
    ``tree="snake"`` it is the Hamiltonian path ``1..n, last rung, bottom rail
    backwards``, and the remaining rung factors hang off the top variable.
    """
    if tree not in ("comb", "snake"):
        raise ValueError(f"unknown ladder tree {tree!r}")
    if not 2 <= n <= 26:
        raise ValueError("ladder size must be between 2 and 26")
    rng = np.random.default_rng(seed)
    top = [str(i) for i in range(1, n + 1)]
    bottom = [chr(ord("a") + i) for i in range(n)]
    g = FactorGraph()
    for x in top + bottom:
        g.add_variable(x, 2)
    pairs = []
    for i in range(n - 1):
        pairs.append(("top", top[i], top[i + 1]))
    for i in range(n):
        pairs.append(("rung", top[i], bottom[i]))
    for i in range(n - 1):
        pairs.append(("bottom", bottom[i], bottom[i + 1]))
    edges = []
    for kind, u, w in pairs:
        f = f"f_{u}_{w}"
        g.add_factor(f, random_table(rng, [u, w], g.variables))
        if tree == "comb":
            if kind == "bottom":
                edges.append((u, f))
            else:
                edges += [(u, f), (w, f)]
        else:
            if kind == "rung" and u != top[-1]:
                edges.append((u, f))
            else:
                edges += [(u, f), (w, f)]
    g.set_spanning_tree(edges)
    return g


def random_spanning_forest(graph, rng):
    """Uniformly shuffled Kruskal forest over the graph's edges."""
    edges = graph.edges()
    order = rng.permutation(len(edges))
    ds = DisjointSet(graph.vertices())
    tree = []
    for i in order:
        u, w = edge_vertices(edges[i])
        if not ds.connected(u, w):
            ds.merge(u, w)
            tree.append(edges[i])
    return tree


def random_factor_graph(rng, n_vars, domains=(2, 3), max_degree=3, max_factors=None,
                        connected=True):
    """Small random factor graph with a random spanning forest.

    No vertex exceeds ``max_degree``. With ``connected=True`` a random tree of
    pairwise factors is laid down first so that the graph is connected.
    """
    g = FactorGraph()
    for i in range(n_vars):
        g.add_variable(f"x{i}", int(rng.choice(domains)))
    names = list(g.variables)
    deg = dict.fromkeys(names, 0)
    scopes = []
    if connected:
        for i in range(1, n_vars):
            cands = [x for x in names[:i] if deg[x] < max_degree]
            if not cands:
                break
            u = cands[rng.integers(len(cands))]
            scopes.append([u, names[i]])
            deg[u] += 1
            deg[names[i]] += 1
    if max_factors is None:
        max_factors = n_vars + 2
    extra = int(rng.integers(0, max(1, max_factors - len(scopes)) + 1))
    for _ in range(extra):
        avail = [x for x in names if deg[x] < max_degree]
        if not avail:
            break
        k = int(rng.integers(1, min(max_degree, len(avail)) + 1))
        scope = sorted(rng.choice(avail, size=k, replace=False).tolist())
        for x in scope:
            deg[x] += 1
        scopes.append(scope)
    for j, scope in enumerate(scopes):
        g.add_factor(f"f{j}", random_table(rng, scope, g.variables))
    g.set_spanning_tree(random_spanning_forest(g, rng))
    return g
