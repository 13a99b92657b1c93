"""Input validation shared by the engine, the file parsers and the CLI."""
from __future__ import annotations

from .exceptions import GraphStructureError, ScopeError
from .factor_graph import VAR, FactorGraph, Vertex


def as_vertex(v):
    """Interpret a bare id as a variable vertex; pass vertices through."""
    if isinstance(v, Vertex):
        return v
    if isinstance(v, tuple) and len(v) == 2 and v[0] in ("var", "factor"):
        return Vertex(*v)
    return Vertex(VAR, v)


def check_factor_graph(graph):
    """Raise unless ``graph`` is a FactorGraph with a valid spanning forest."""
    if not isinstance(graph, FactorGraph):
        raise TypeError(f"expected a FactorGraph, got {type(graph).__name__}")
    for e in graph.tree_edges:
        if not graph.has_edge(*e):
            raise GraphStructureError(f"tree edge {e!r} is not an edge of the graph")
    graph.check_forest()
    return graph


def check_replacement_scope(graph, factor, table, var, inserting):
    """Check that ``table`` is ``factor``'s old scope with ``var`` added/removed."""
    old = set(graph.factors[factor].scope)
    want = old | {var} if inserting else old - {var}
    if set(table.scope) != want:
        raise ScopeError(
            f"new table for {factor!r} must have scope {sorted(want)!r}, "
            f"got {list(table.scope)!r}"
        )
    for x, d in zip(table.scope, table.domains):
        if graph.variables[x] != d:
            raise ScopeError(
                f"variable {x!r} has domain {graph.variables[x]}, table uses {d}"
            )
