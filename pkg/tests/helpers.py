"""Independent oracles and random edit drivers shared by the test modules."""
from __future__ import annotations

import networkx as nx
import numpy as np

from adaptive_inference import FactorGraph, FactorTable
from adaptive_inference.factor_graph import edge_vertices
from adaptive_inference.generators import random_table

MAX_DEGREE = 3


def nx_graph(graph, edges=None):
    h = nx.Graph()
    h.add_nodes_from(graph.vertices())
    h.add_edges_from(edge_vertices(e) for e in (graph.edges() if edges is None else edges))
    return h


def cut_size_oracle(graph, tree_edge):
    """Cut size of ``tree_edge`` from networkx components of ``T - e``."""
    t = nx_graph(graph, [e for e in graph.tree_edges if e != tree_edge])
    side = nx.node_connected_component(t, edge_vertices(tree_edge)[0])
    return sum(
        1 for e in graph.edges() if (edge_vertices(e)[0] in side) != (edge_vertices(e)[1] in side)
    )


def elimination_partition_function(graph):
    """Partition function by bucket elimination in variable insertion order.

    Works directly on numpy arrays with explicit broadcasting and does not
    touch the package's table algebra.
    """
    pool = [(list(t.scope), np.asarray(t.values)) for t in graph.factors.values()]
    for x in graph.variables:
        bucket = [p for p in pool if x in p[0]]
        pool = [p for p in pool if x not in p[0]]
        if not bucket:
            pool.append(([], np.array(float(graph.variables[x]))))
            continue
        scope = sorted(set().union(*(set(s) for s, _ in bucket)))
        acc = np.ones([graph.variables[y] for y in scope])
        for s, arr in bucket:
            perm = sorted(range(len(s)), key=lambda i: scope.index(s[i]))
            shape = [graph.variables[y] if y in s else 1 for y in scope]
            acc = acc * np.transpose(arr, perm).reshape(shape)
        acc = acc.sum(axis=scope.index(x))
        scope.remove(x)
        pool.append((scope, acc))
    z = 1.0
    for s, arr in pool:
        assert not s
        z *= float(arr)
    return z


def tree_path_edges(graph, a, b):
    """Tree edges on the tree path between vertices ``a`` and ``b``."""
    t = nx_graph(graph, graph.tree_edges)
    path = nx.shortest_path(t, a, b)
    out = []
    for u, w in zip(path, path[1:]):
        out.append((u.id, w.id) if u.is_var else (w.id, u.id))
    return out


def random_edit(engine, rng):
    """Apply one random valid edit to ``engine``; returns its kind.

    Tries the drawn kind first and falls back to a factor replacement when no
    valid instance exists. Degrees stay at most ``MAX_DEGREE``.
    """
    g = engine.graph_
    kinds = ["replace", "insert_nontree", "delete_nontree", "swap", "delete_tree", "insert_tree"]
    kind = kinds[rng.integers(len(kinds))]
    sk = engine.skeleton_
    var_ids = list(g.variables)
    fac_ids = list(g.factors)

    def pick(seq):
        return seq[rng.integers(len(seq))]

    def same_component(x, f):
        xv, fv = edge_vertices((x, f))
        return sk.root_of(xv) == sk.root_of(fv)

    def addable(x, f):
        return (
            not g.has_edge(x, f)
            and len(g.factors[f].scope) < MAX_DEGREE
            and len(g.factors_of(x)) < MAX_DEGREE
        )

    if kind in ("insert_nontree", "insert_tree"):
        want_same = kind == "insert_nontree"
        cands = [
            (x, f) for x in var_ids for f in fac_ids
            if addable(x, f) and same_component(x, f) == want_same
        ]
        if cands:
            x, f = pick(cands)
            table = random_table(rng, set(g.factors[f].scope) | {x}, g.variables)
            getattr(engine, f"{kind}_edge")(x, f, table)
            return kind
    elif kind == "delete_nontree":
        cands = sorted(g.nontree_edges())
        if cands:
            x, f = pick(cands)
            engine.delete_nontree_edge(
                x, f, random_table(rng, set(g.factors[f].scope) - {x}, g.variables)
            )
            return kind
    elif kind == "delete_tree":
        cands = sorted(e for e in g.tree_edges if g.validate_tree_cut(e))
        if cands:
            x, f = pick(cands)
            engine.delete_tree_edge(
                x, f, random_table(rng, set(g.factors[f].scope) - {x}, g.variables)
            )
            return kind
    elif kind == "swap":
        cands = sorted(g.nontree_edges())
        if cands:
            add = pick(cands)
            remove = pick(tree_path_edges(g, *edge_vertices(add)))
            engine.swap_tree_edge(remove, add)
            return kind
    f = pick(fac_ids)
    engine.replace_factor(f, random_table(rng, g.factors[f].scope, g.variables))
    return "replace"


def table(scope, values, domains=None):
    return FactorTable(scope, values, domains)


def vertex_chain(n, seed=0):
    """Path factor graph with exactly ``n`` vertices (``n`` even).

    Variables ``x1..x{n/2}``; ``f_i`` joins ``x_i`` and ``x_{i+1}`` and the last
    factor is unary, so the tree is a single ``n``-vertex path.
    """
    rng = np.random.default_rng(seed)
    g = FactorGraph()
    m = n // 2
    for i in range(1, m + 1):
        g.add_variable(f"x{i}", 2)
    for i in range(1, m + 1):
        scope = [f"x{i}", f"x{i + 1}"] if i < m else [f"x{i}"]
        g.add_factor(f"f{i}", random_table(rng, scope, g.variables))
    g.set_spanning_tree(g.edges())
    return g
