"""Structural invariant checks for skeletons and annotated engines.

These recompute everything from explicit vertex sets, independently of the
incremental bookkeeping, and raise ``AssertionError`` on the first violation.
They are meant for tests and debugging; cost is about ``n * depth``.
"""
from __future__ import annotations

import math

from .factor_graph import edge_vertices


def check_skeleton(skeleton, graph):
    """Assert the four hierarchical-clustering conditions for ``skeleton``.

    1. every vertex is covered; 2. clusters nest, and clusters sharing a
    tree boundary edge are nested; 3. each cluster has a unique identifier vertex
    that no child contains; 4. every child is linked to the identifier by a
    tree edge.
    """
    vertices = set(graph.vertices())
    assert set(skeleton.parent) == vertices, "cluster set differs from vertex set"
    for v, kids in skeleton.children.items():
        for c in kids:
            assert skeleton.parent[c] == v, f"{c!r} listed under {v!r} but parent differs"
    for v, p in skeleton.parent.items():
        if p is None:
            assert v in skeleton.roots, f"parentless {v!r} not a root"
        else:
            assert v in skeleton.children[p], f"{v!r} missing from children of {p!r}"
    members = skeleton.members()
    # 1: roots cover every vertex exactly once
    covered = [u for r in skeleton.roots for u in members[r]]
    assert len(covered) == len(vertices) and set(covered) == vertices, "coverage"
    # 2 + 3: each cluster is {v} plus a disjoint union of its children
    for v, kids in skeleton.children.items():
        size = 1 + sum(len(members[c]) for c in kids)
        assert size == len(members[v]), f"children of {v!r} overlap or miss vertices"
        assert all(v not in members[c] for c in kids), f"identifier {v!r} inside a child"
    tree_adj = graph.tree_adjacency()
    for v, kids in skeleton.children.items():
        # 4: one tree edge from v into each child
        for c in kids:
            assert any(w in members[c] for w in tree_adj[v]), (
                f"no tree edge from {v!r} into child {c!r}"
            )
        # each component of the tree is one root cluster
        if skeleton.parent[v] is None:
            for w in tree_adj[v]:
                assert w in members[v]
    # clusters sharing a tree boundary edge lie on one root path; for a
    # non-tree edge the clusters holding either endpoint alone are disjoint
    holders = {}
    for v, mem in members.items():
        for e in _boundary(graph, mem):
            if e in graph.tree_edges:
                holders.setdefault(e, []).append(v)
    for e, hs in holders.items():
        low = min(hs, key=lambda h: len(members[h]))
        for h in hs:
            assert members[low] <= members[h], f"clusters sharing {e!r} are not nested"
    return members


def _boundary(graph, member_set):
    out = set()
    for v in member_set:
        for e in graph.incident_edges(v):
            a, b = edge_vertices(e)
            if (a in member_set) != (b in member_set):
                out.add(e)
    return out


def check_engine(engine, partition_function=None, rtol=1e-9):
    """Assert skeleton conditions and every cluster annotation invariant.

    Checks the stored boundary against one recomputed from vertex sets,
    ``|tree boundary| <= 2``, ``|boundary| <= 2 * measure``, scope of each
    cluster function, and (when given) that the product of root scalars
    equals ``partition_function``.
    """
    g = engine.graph_
    members = check_skeleton(engine.skeleton_, g)
    beta = g.measure_graph()
    for v, mem in members.items():
        bd = engine.boundary_[v]
        assert bd == _boundary(g, mem), f"stored boundary of {v!r} is stale"
        tree_part = [e for e in bd if e in g.tree_edges]
        assert len(tree_part) <= 2, f"{v!r} has {len(tree_part)} tree boundary edges"
        assert len(bd) <= 2 * beta, f"{v!r} boundary {len(bd)} exceeds 2*beta={2 * beta}"
        scope = tuple(sorted({x for x, _ in bd}))
        assert engine.phi_[v].scope == scope, f"cluster function of {v!r} has wrong scope"
    for r in engine.skeleton_.roots:
        assert engine.boundary_[r] == frozenset(), f"root {r!r} has a boundary"
    if partition_function is not None:
        z = engine.partition_function()
        assert math.isclose(z, partition_function, rel_tol=rtol, abs_tol=1e-12), (
            f"root scalar {z!r} != partition function {partition_function!r}"
        )
    return members
