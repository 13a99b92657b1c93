"""Bipartite factor graphs with a designated spanning forest.

Vertices are :class:`Vertex` pairs so that variable and factor ids live in
separate namespaces. An edge is a ``(variable_id, factor_id)`` pair and exists
exactly when the variable is in the factor's scope. The caller designates a
subset of edges as the spanning forest ("tree edges"); everything else is a
non-tree edge.
"""
from __future__ import annotations

import itertools
from collections import deque
from typing import NamedTuple

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .exceptions import (
    GraphStructureError,
    ScopeError,
    TreeCycleError,
    UnknownVariableError,
)
from .factor_table import FactorTable

VAR = "var"
FACTOR = "factor"


class Vertex(NamedTuple):
    kind: str
    id: object

    @classmethod
    def var(cls, id):
        return cls(VAR, id)

    @classmethod
    def factor(cls, id):
        return cls(FACTOR, id)

    @property
    def is_var(self):
        return self.kind == VAR

    def __repr__(self):
        return f"{'x' if self.kind == VAR else 'f'}:{self.id!r}"


def edge_vertices(edge):
    """The two endpoints of a ``(var, factor)`` edge as vertices."""
    return Vertex(VAR, edge[0]), Vertex(FACTOR, edge[1])


class FactorGraph:
    """Factor graph ``G = (X + F, E)`` plus spanning forest ``E_T``."""

    def __init__(self):
        self.variables: dict = {}
        self.factors: dict = {}
        self.tree_edges: set = set()
        self._var_factors: dict = {}

    # -- construction ---------------------------------------------------

    def add_variable(self, id, domain_size):
        if id in self.variables:
            raise GraphStructureError(f"duplicate variable id {id!r}")
        domain_size = int(domain_size)
        if domain_size < 1:
            raise ValueError(f"domain size of {id!r} must be positive")
        self.variables[id] = domain_size
        self._var_factors[id] = set()

    def add_factor(self, id, table: FactorTable):
        if id in self.factors:
            raise GraphStructureError(f"duplicate factor id {id!r}")
        self._check_table(table, where=f"factor {id!r}")
        self.factors[id] = table
        for x in table.scope:
            self._var_factors[x].add(id)

    def _check_table(self, table, where="table"):
        for x, d in zip(table.scope, table.domains):
            if x not in self.variables:
                raise UnknownVariableError(f"{where}: unknown variable {x!r}")
            if self.variables[x] != d:
                raise ScopeError(
                    f"{where}: variable {x!r} has domain {self.variables[x]}, table uses {d}"
                )

    def set_spanning_tree(self, edges):
        """Designate ``edges`` as the spanning forest after validating it."""
        edges = {tuple(e) for e in edges}
        for e in edges:
            if not self.has_edge(*e):
                raise GraphStructureError(f"{e!r} is not an edge of the graph")
        self.check_forest(edges)
        self.tree_edges = edges

    def check_forest(self, edges=None):
        """Raise unless ``edges`` is acyclic and spans every component of G."""
        edges = self.tree_edges if edges is None else edges
        tree = DisjointSet(self.vertices())
        for e in edges:
            u, v = edge_vertices(e)
            if tree.connected(u, v):
                raise TreeCycleError(f"tree edges contain a cycle through {e!r}")
            tree.merge(u, v)
        full = DisjointSet(self.vertices())
        for e in self.edges():
            full.merge(*edge_vertices(e))
        if tree.n_subsets != full.n_subsets:
            raise GraphStructureError(
                "tree edges do not span every connected component "
                f"({tree.n_subsets} tree components vs {full.n_subsets} graph components)"
            )

    def copy(self):
        g = FactorGraph()
        g.variables = dict(self.variables)
        g.factors = dict(self.factors)
        g.tree_edges = set(self.tree_edges)
        g._var_factors = {x: set(fs) for x, fs in self._var_factors.items()}
        return g

    # -- structural edits (no spanning-forest validation) ----------------

    def replace_table(self, factor, table: FactorTable):
        """Swap a factor's table; the scope may change, edges follow it."""
        old = self.factors[factor]
        self._check_table(table, where=f"factor {factor!r}")
        for x in old.scope:
            self._var_factors[x].discard(factor)
        for x in table.scope:
            self._var_factors[x].add(factor)
        self.factors[factor] = table
        self.tree_edges = {e for e in self.tree_edges if e[1] != factor or e[0] in table.scope}

    # -- queries --------------------------------------------------------

    def vertices(self):
        return [Vertex(VAR, x) for x in self.variables] + [
            Vertex(FACTOR, f) for f in self.factors
        ]

    @property
    def n_vertices(self):
        return len(self.variables) + len(self.factors)

    def edges(self):
        return [(x, f) for f, t in self.factors.items() for x in t.scope]

    def nontree_edges(self):
        return [e for e in self.edges() if e not in self.tree_edges]

    def has_edge(self, var, factor):
        return factor in self._var_factors.get(var, ())

    def is_tree_edge(self, var, factor):
        return (var, factor) in self.tree_edges

    def incident_edges(self, v: Vertex):
        """``E(v)``: every edge with ``v`` as an endpoint."""
        if v.kind == VAR:
            return [(v.id, f) for f in self._var_factors[v.id]]
        return [(x, v.id) for x in self.factors[v.id].scope]

    def factors_of(self, var):
        return self._var_factors[var]

    def degree(self, v: Vertex):
        if v.kind == VAR:
            return len(self._var_factors[v.id])
        return len(self.factors[v.id].scope)

    def max_degree(self):
        return max((self.degree(v) for v in self.vertices()), default=0)

    def max_domain(self):
        return max(self.variables.values(), default=1)

    def contains(self, v: Vertex):
        return v.id in (self.variables if v.kind == VAR else self.factors)

    def tree_adjacency(self, edges=None):
        adj = {v: [] for v in self.vertices()}
        for e in self.tree_edges if edges is None else edges:
            u, w = edge_vertices(e)
            adj[u].append(w)
            adj[w].append(u)
        return adj

    def tree_side(self, edge):
        """Vertices reachable from the variable end of ``edge`` in ``E_T - {edge}``."""
        adj = self.tree_adjacency()
        u, w = edge_vertices(edge)
        seen = {u}
        todo = deque([u])
        while todo:
            a = todo.popleft()
            for b in adj[a]:
                if b in seen or (a == u and b == w) or (a == w and b == u):
                    continue
                seen.add(b)
                todo.append(b)
        return seen

    # -- diagnostics ----------------------------------------------------

    def measure_edge(self, edge):
        """Cut size of a tree edge: one plus the non-tree edges crossing it."""
        edge = tuple(edge)
        if edge not in self.tree_edges:
            raise GraphStructureError(f"{edge!r} is not a tree edge")
        side = self.tree_side(edge)
        crossing = 0
        for e in self.nontree_edges():
            a, b = edge_vertices(e)
            if (a in side) != (b in side):
                crossing += 1
        return 1 + crossing

    def measures(self):
        """``measure_edge`` for every tree edge at once.

        A non-tree edge crosses the cut of a tree edge exactly when the tree
        edge lies on the tree path between its endpoints, so walking each
        such path once suffices.
        """
        adj = self.tree_adjacency()
        parent, depth = {}, {}
        for s in adj:
            if s in parent:
                continue
            parent[s], depth[s] = None, 0
            todo = [s]
            while todo:
                a = todo.pop()
                for b in adj[a]:
                    if b not in parent:
                        parent[b], depth[b] = a, depth[a] + 1
                        todo.append(b)
        count = {}
        for e in self.nontree_edges():
            a, b = edge_vertices(e)
            while a != b:
                if depth[a] < depth[b]:
                    a, b = b, a
                count[a] = count.get(a, 0) + 1
                a = parent[a]
        out = {}
        for e in self.tree_edges:
            u, w = edge_vertices(e)
            child = u if parent[u] == w else w
            out[e] = 1 + count.get(child, 0)
        return out

    def measure_graph(self):
        """Largest tree-edge cut; 0 when there are no tree edges."""
        return max(self.measures().values(), default=0)

    def characteristic(self):
        """``d ** (k + 1)`` for max domain size ``d`` and max degree ``k``."""
        return self.max_domain() ** (self.max_degree() + 1)

    def validate_tree_cut(self, edge):
        """True iff removing ``edge`` genuinely disconnects the graph."""
        return self.measure_edge(edge) == 1

    # -- brute-force oracle ---------------------------------------------

    def joint_eval(self, assignment):
        """``g(x) = prod_j f_j(x_j)`` at a full assignment."""
        missing = [x for x in self.variables if x not in assignment]
        if missing:
            raise ValueError(f"assignment is missing variables {missing!r}")
        value = 1.0
        for t in self.factors.values():
            value *= t[tuple(assignment[x] for x in t.scope)]
        return value

    def _joint_array(self):
        # Dense joint over all variables in insertion order, one factor at a time.
        order = list(self.variables)
        axis = {x: i for i, x in enumerate(order)}
        shape = [self.variables[x] for x in order]
        joint = np.ones(shape)
        for t in self.factors.values():
            view_shape = [1] * len(order)
            for x in t.scope:
                view_shape[axis[x]] = self.variables[x]
            perm = sorted(range(len(t.scope)), key=lambda i: axis[t.scope[i]])
            joint = joint * np.transpose(t.values, perm).reshape(view_shape)
        return order, joint

    def brute_force_marginal(self, var):
        """Unnormalized marginal of ``var`` by enumerating the full joint."""
        if var not in self.variables:
            raise UnknownVariableError(f"unknown variable {var!r}")
        order, joint = self._joint_array()
        i = order.index(var)
        axes = tuple(j for j in range(len(order)) if j != i)
        return FactorTable([var], joint.sum(axis=axes))

    def brute_force_partition_function(self):
        return float(self._joint_array()[1].sum())

    def enumerate_partition_function(self):
        """Partition function via an explicit loop over assignments (slow)."""
        names = list(self.variables)
        total = 0.0
        for states in itertools.product(*(range(self.variables[x]) for x in names)):
            total += self.joint_eval(dict(zip(names, states)))
        return total

    def __repr__(self):
        return (
            f"FactorGraph({len(self.variables)} variables, {len(self.factors)} factors, "
            f"{len(self.tree_edges)} tree edges)"
        )
