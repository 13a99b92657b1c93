"""Adaptive exact inference over a cluster tree of a factor graph."""
from __future__ import annotations

from dataclasses import dataclass

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .contraction import contract, propagate
from .exceptions import (
    CutViolationError,
    GraphStructureError,
    ScopeError,
    UnknownVariableError,
)
from .factor_graph import FACTOR, VAR, FactorGraph, Vertex, edge_vertices
from .factor_table import FactorTable, constant_table, normalize, sum_product
from .validation import check_factor_graph, check_replacement_scope, as_vertex


@dataclass(frozen=True)
class ClusterNode:
    """Read-only view of one cluster of the cluster tree."""

    identifier: Vertex
    parent: Vertex | None
    children: frozenset
    boundary: frozenset
    tree_boundary: frozenset
    boundary_vars: tuple
    function: FactorTable
    links: dict


    @property
    def nontree_boundary(self):
        return self.boundary - self.tree_boundary


def _boundary_vars(edges):
    return sorted({x for x, _ in edges})


class AdaptiveInference(BaseEstimator):
    """Marginal queries and model edits in time logarithmic in graph size.

    ``fit`` contracts the caller's spanning forest into a cluster tree and
    annotates every cluster with its boundary and cluster function. Queries
    walk one root path; edits recompute only the clusters they invalidate.

    Parameters
    ----------
    seed : int, default=0
        Seed for the contraction's coin flips. The cluster tree, and hence
        every floating point result, is a deterministic function of the
        graph and this seed.
    check_cuts : bool, default=True
        Verify that a tree edge being deleted has no non-tree edge crossing
        its cut. This costs time linear in the graph; with ``False`` the
        caller is trusted to keep the spanning forest consistent.

    Attributes
    ----------
    graph_ : FactorGraph
        Private copy of the fitted graph, kept in sync with every edit.
    skeleton_ : ClusterSkeleton
    state_ : ContractionState
    last_recomputed_ : set
        Clusters whose boundary and function were recomputed by the most
        recent build or edit.
    """

    def __init__(self, seed=0, check_cuts=True):
        self.seed = seed
        self.check_cuts = check_cuts

    # -- construction ---------------------------------------------------

    def fit(self, graph: FactorGraph, y=None):
        check_factor_graph(graph)
        self.graph_ = graph.copy()
        vertices = self.graph_.vertices()
        tree = [edge_vertices(e) for e in sorted(self.graph_.tree_edges)]
        self.skeleton_, self.state_ = contract(tree, vertices, self.seed)
        self.boundary_ = {}
        self.phi_ = {}
        self._recompute_exactly(vertices)
        return self

    def _psi(self, v):
        if v.kind == VAR:
            return constant_table([v.id], 1.0, self.graph_.variables)
        return self.graph_.factors[v.id]

    def _annotate(self, v):
        bd = set(self.graph_.incident_edges(v))
        kids = sorted(self.skeleton_.children[v])
        for c in kids:
            bd ^= self.boundary_[c]
        bd = frozenset(bd)
        tables = [self._psi(v)] + [self.phi_[c] for c in kids]
        self.boundary_[v] = bd
        self.phi_[v] = sum_product(tables, _boundary_vars(bd))

    def _recompute_exactly(self, clusters):
        elim = self.state_.elim
        for v in sorted(clusters, key=lambda u: elim[u].round):
            self._annotate(v)
        self.last_recomputed_ = set(clusters)

    def _recompute_upward(self, seeds):
        parent = self.skeleton_.parent
        dirty = set()
        for v in seeds:
            while v is not None and v not in dirty:
                dirty.add(v)
                v = parent[v]
        self._recompute_exactly(dirty)

    # -- inspection -----------------------------------------------------

    def _vertex(self, v):
        v = as_vertex(v)
        if not self.graph_.contains(v):
            raise UnknownVariableError(f"unknown vertex {v!r}")
        return v

    def cluster(self, v) -> ClusterNode:
        check_is_fitted(self)
        v = self._vertex(v)
        bd = self.boundary_[v]
        # tree edge from v into each child, smallest (var, factor) pair on ties
        tree_edges = self._tree_part(self.graph_.incident_edges(v))
        other = {}
        for e in tree_edges:
            xv, fv = edge_vertices(e)
            other[fv if xv == v else xv] = e
        links = {c: other[w] for c, w in self.skeleton_.linking_edges(v, other).items()}
        return ClusterNode(
            identifier=v,
            parent=self.skeleton_.parent[v],
            children=frozenset(self.skeleton_.children[v]),
            boundary=bd,
            tree_boundary=self._tree_part(bd),
            boundary_vars=tuple(_boundary_vars(bd)),
            function=self.phi_[v],
            links=links,
        )

    def _tree_part(self, edges):
        tree = self.graph_.tree_edges
        return frozenset(e for e in edges if e in tree)

    def depth(self):
        check_is_fitted(self)
        return self.skeleton_.depth()

    def touched_clusters(self):
        """Number of clusters recomputed by the most recent operation."""
        check_is_fitted(self)
        return len(self.last_recomputed_)

    def partition_function(self):
        """Product of the root cluster scalars, one per component."""
        check_is_fitted(self)
        z = 1.0
        for r in sorted(self.skeleton_.roots):
            z *= self.phi_[r].scalar()
        return z

    # -- queries --------------------------------------------------------

    def query(self, v, normalized=False) -> FactorTable:
        """Marginal of a vertex.

        A variable id (or variable :class:`Vertex`) yields the unnormalized
        marginal over that variable; a factor vertex yields the marginal over
        the factor's scope.
        """
        check_is_fitted(self)
        v = self._vertex(v)
        sk = self.skeleton_
        path = sk.path_to_root(v)
        messages = {}
        for i in range(len(path) - 1, 0, -1):
            node, below = path[i], path[i - 1]
            siblings = sorted(sk.children[node] - {below})
            region = set(self.graph_.incident_edges(node))
            tables = [self._psi(node)]
            for u in siblings:
                region ^= self.boundary_[u]
                tables.append(self.phi_[u])
            for a in self._ancestor_sources(node, below, messages):
                table, bd = messages[a]
                region ^= bd
                tables.append(table)
            messages[node] = (sum_product(tables, _boundary_vars(region)), region)
        tables = [self._psi(v)] + [self.phi_[u] for u in sorted(sk.children[v])]
        for a in self._ancestor_sources(v, None, messages):
            tables.append(messages[a][0])
        keep = [v.id] if v.kind == VAR else self.graph_.factors[v.id].scope
        out = sum_product(tables, keep)
        root = path[-1]
        scale = 1.0
        for r in sorted(sk.roots):
            if r != root:
                scale *= self.phi_[r].scalar()
        if scale != 1.0:
            out = FactorTable(out.scope, out.values * scale)
        return normalize(out) if normalized else out

    def _ancestor_sources(self, node, below, messages):
        # Tree boundary edges of ``node`` not shared with the path child lead
        # to ancestors whose downward message covers the far side.
        edges = self._tree_part(self.boundary_[node])
        if below is not None:
            edges = edges - self.boundary_[below]
        sources = []
        for e in sorted(edges):
            xv, fv = edge_vertices(e)
            a = fv if self.skeleton_.contains(node, xv) else xv
            if a not in messages:
                raise RuntimeError(f"boundary edge {e!r} of {node!r} leads to a non-ancestor")
            sources.append(a)
        return sources

    def marginals(self, variables=None, normalized=False):
        check_is_fitted(self)
        if variables is None:
            variables = list(self.graph_.variables)
        return {x: self.query(x, normalized=normalized) for x in variables}

    def predict(self, variables=None):
        """Normalized marginals, as a mapping from variable id to table."""
        return self.marginals(variables, normalized=True)

    # -- edits ----------------------------------------------------------

    def replace_factor(self, factor, table: FactorTable):
        """Replace a factor's values; its scope must stay the same."""
        check_is_fitted(self)
        g = self.graph_
        if factor not in g.factors:
            raise UnknownVariableError(f"unknown factor {factor!r}")
        old = g.factors[factor]
        if table.scope != old.scope or table.domains != old.domains:
            raise ScopeError(
                f"replacement for {factor!r} must keep scope {old.scope}; "
                "use the edge operations to change it"
            )
        g.replace_table(factor, table)
        self._recompute_upward([Vertex(FACTOR, factor)])
        return self

    def _check_edge_edit(self, var, factor, table, inserting):
        g = self.graph_
        if var not in g.variables:
            raise UnknownVariableError(f"unknown variable {var!r}")
        if factor not in g.factors:
            raise UnknownVariableError(f"unknown factor {factor!r}")
        present = g.has_edge(var, factor)
        if inserting and present:
            raise GraphStructureError(f"edge {(var, factor)!r} already exists")
        if not inserting and not present:
            raise GraphStructureError(f"edge {(var, factor)!r} does not exist")
        check_replacement_scope(g, factor, table, var, inserting)

    def insert_nontree_edge(self, var, factor, table: FactorTable):
        """Add ``var`` to ``factor``'s scope as a non-tree edge."""
        check_is_fitted(self)
        self._check_edge_edit(var, factor, table, inserting=True)
        xv, fv = Vertex(VAR, var), Vertex(FACTOR, factor)
        if self.skeleton_.root_of(xv) != self.skeleton_.root_of(fv):
            raise GraphStructureError(
                f"{(var, factor)!r} joins two tree components; insert it as a tree edge"
            )
        self.graph_.replace_table(factor, table)
        self._recompute_upward([xv, fv])
        return self

    def delete_nontree_edge(self, var, factor, table: FactorTable):
        """Remove non-tree edge ``(var, factor)``; ``table`` drops ``var``."""
        check_is_fitted(self)
        self._check_edge_edit(var, factor, table, inserting=False)
        if self.graph_.is_tree_edge(var, factor):
            raise GraphStructureError(f"{(var, factor)!r} is a tree edge")
        self.graph_.replace_table(factor, table)
        self._recompute_upward([Vertex(VAR, var), Vertex(FACTOR, factor)])
        return self

    def insert_tree_edge(self, var, factor, table: FactorTable):
        """Join two tree components with edge ``(var, factor)``."""
        check_is_fitted(self)
        self._check_edge_edit(var, factor, table, inserting=True)
        xv, fv = Vertex(VAR, var), Vertex(FACTOR, factor)
        affected = propagate(self.state_, self.skeleton_, ("insert", xv, fv))
        self.graph_.replace_table(factor, table)
        self.graph_.tree_edges.add((var, factor))
        self._recompute_upward(affected | {xv, fv})
        return self

    def delete_tree_edge(self, var, factor, table: FactorTable):
        """Remove tree edge ``(var, factor)``, splitting its component."""
        check_is_fitted(self)
        self._check_edge_edit(var, factor, table, inserting=False)
        g = self.graph_
        if not g.is_tree_edge(var, factor):
            raise GraphStructureError(f"{(var, factor)!r} is not a tree edge")
        if self.check_cuts and not g.validate_tree_cut((var, factor)):
            raise CutViolationError(
                f"non-tree edges cross the cut of {(var, factor)!r}; "
                "swap in a replacement tree edge first"
            )
        xv, fv = Vertex(VAR, var), Vertex(FACTOR, factor)
        affected = propagate(self.state_, self.skeleton_, ("delete", xv, fv))
        g.replace_table(factor, table)
        self._recompute_upward(affected | {xv, fv})
        return self

    def swap_tree_edge(self, remove, add):
        """Demote tree edge ``remove`` and promote non-tree edge ``add``."""
        check_is_fitted(self)
        g = self.graph_
        remove, add = tuple(remove), tuple(add)
        if remove not in g.tree_edges:
            raise GraphStructureError(f"{remove!r} is not a tree edge")
        if not g.has_edge(*add) or add in g.tree_edges:
            raise GraphStructureError(f"{add!r} is not a non-tree edge")
        old = edge_vertices(remove)
        new = edge_vertices(add)
        affected = propagate(self.state_, self.skeleton_, ("delete",) + old)
        sk = self.skeleton_
        if sk.root_of(new[0]) == sk.root_of(new[1]):
            propagate(self.state_, self.skeleton_, ("insert",) + old)
            raise GraphStructureError(
                f"{add!r} does not reconnect the two sides of {remove!r}"
            )
        affected |= propagate(self.state_, self.skeleton_, ("insert",) + new)
        g.tree_edges.discard(remove)
        g.tree_edges.add(add)
        self._recompute_upward(affected | set(old) | set(new))
        return self
