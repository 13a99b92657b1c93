"""Adaptive exact inference for discrete factor graphs.

Fit an :class:`AdaptiveInference` estimator on a :class:`FactorGraph` whose
spanning forest has been designated, then query marginals and apply edits
(factor replacement, edge insertion/deletion, tree-edge swaps) in time
proportional to the depth of the cluster tree.
"""
from .contraction import ClusterSkeleton, ContractionState, contract, propagate
from .engine import AdaptiveInference, ClusterNode
from .exceptions import (
    CutViolationError,
    DomainMismatchError,
    FormatError,
    GraphStructureError,
    InferenceError,
    ScopeError,
    TreeCycleError,
    UnknownVariableError,
)
from .factor_graph import FactorGraph, Vertex
from .factor_table import (
    FactorTable,
    constant_table,
    marginalize,
    multiply,
    normalize,
    sum_product,
)
from .generators import gen_chain, ladder
from .io import parse_graph, parse_script, serialize_graph

__version__ = "0.1.0"

__all__ = [
    "AdaptiveInference",
    "ClusterNode",
    "ClusterSkeleton",
    "ContractionState",
    "CutViolationError",
    "DomainMismatchError",
    "FactorGraph",
    "FactorTable",
    "FormatError",
    "GraphStructureError",
    "InferenceError",
    "ScopeError",
    "TreeCycleError",
    "UnknownVariableError",
    "Vertex",
    "constant_table",
    "contract",
    "gen_chain",
    "ladder",
    "marginalize",
    "multiply",
    "normalize",
    "parse_graph",
    "parse_script",
    "propagate",
    "serialize_graph",
    "sum_product",
]
