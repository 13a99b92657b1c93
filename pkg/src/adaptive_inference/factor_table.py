"""Dense tables over discrete variables: product, marginalization, normalization.

A table is stored as an n-dimensional numpy array whose axes follow the
scope, which is always kept sorted by variable id. Flattening uses C order,
so the last scope variable varies fastest.
"""
from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import DomainMismatchError, ScopeError, UnknownVariableError

# np.einsum accepts at most 52 distinct subscripts.
_EINSUM_MAX_LABELS = 52
# Above this many entries in the joint index space, let einsum pick a
# contraction order instead of looping over everything at once.
_EINSUM_OPTIMIZE_ABOVE = 4096


class FactorTable:
    """Non-negative real function over an ordered tuple of discrete variables.

    Parameters
    ----------
    scope : sequence of variable ids
        Must be strictly increasing. An empty scope denotes a scalar.
    values : array_like
        Either an array of shape ``(d_1, ..., d_k)`` or, together with
        ``domains``, a flat sequence of length ``d_1 * ... * d_k``.
    domains : sequence of int, optional
        Domain sizes in scope order; required when ``values`` is flat.

    Tables are immutable once built.
    """

    __slots__ = ("scope", "values")

    def __init__(self, scope, values, domains=None):
        scope = tuple(scope)
        arr = np.array(values, dtype=float)
        if domains is not None:
            domains = tuple(int(d) for d in domains)
            if len(domains) != len(scope):
                raise ScopeError("domains and scope differ in length")
            expected = int(np.prod(domains, dtype=np.int64))
            if arr.size != expected:
                raise ScopeError(
                    f"expected {expected} values for scope {scope}, got {arr.size}"
                )
            arr = arr.reshape(domains)
        if arr.ndim != len(scope):
            raise ScopeError(
                f"array has {arr.ndim} axes but scope {scope} has {len(scope)}"
            )
        for a, b in zip(scope, scope[1:]):
            if not a < b:
                raise ScopeError(f"scope must be strictly increasing, got {scope}")
        if any(d < 1 for d in arr.shape):
            raise ScopeError("domain sizes must be positive")
        arr.flags.writeable = False
        self.scope = scope
        self.values = arr

    @classmethod
    def from_unsorted(cls, scope, values, domains=None):
        """Build a table whose scope is given in arbitrary order.

        Axes are permuted into canonical (sorted) order.
        """
        scope = list(scope)
        if len(set(scope)) != len(scope):
            raise ScopeError(f"duplicate variable in scope {scope}")
        arr = np.array(values, dtype=float)
        if domains is not None:
            domains = tuple(int(d) for d in domains)
            if arr.size != int(np.prod(domains, dtype=np.int64)):
                raise ScopeError(
                    f"expected {int(np.prod(domains))} values for scope "
                    f"{tuple(scope)}, got {arr.size}"
                )
            arr = arr.reshape(domains)
        order = sorted(range(len(scope)), key=lambda i: scope[i])
        return cls([scope[i] for i in order], np.transpose(arr, order))

    @property
    def domains(self):
        return self.values.shape

    @property
    def flat(self):
        return self.values.reshape(-1)

    @property
    def size(self):
        return self.values.size

    def domain_map(self):
        return dict(zip(self.scope, self.values.shape))

    def total(self):
        return float(self.values.sum())

    def scalar(self):
        if self.scope:
            raise ScopeError(f"table over {self.scope} is not a scalar")
        return float(self.values)

    def index_of(self, assignment):
        """Flat position of ``assignment`` (mapping or sequence in scope order)."""
        if isinstance(assignment, Mapping):
            assignment = [assignment[v] for v in self.scope]
        if not self.scope:
            return 0
        return int(np.ravel_multi_index(tuple(assignment), self.values.shape))

    def assignment_at(self, index):
        """Inverse of :meth:`index_of`; returns states in scope order."""
        if not self.scope:
            if index != 0:
                raise IndexError(index)
            return ()
        return tuple(int(i) for i in np.unravel_index(index, self.values.shape))

    def __getitem__(self, assignment):
        if isinstance(assignment, Mapping):
            assignment = tuple(assignment[v] for v in self.scope)
        return float(self.values[tuple(assignment)])

    def allclose(self, other, rtol=1e-9, atol=1e-12):
        return (
            isinstance(other, FactorTable)
            and self.scope == other.scope
            and self.values.shape == other.values.shape
            and bool(np.allclose(self.values, other.values, rtol=rtol, atol=atol))
        )

    def __eq__(self, other):
        if not isinstance(other, FactorTable):
            return NotImplemented
        return self.scope == other.scope and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.scope, self.values.tobytes()))

    def __repr__(self):
        return f"FactorTable(scope={self.scope!r}, values={self.values.tolist()!r})"


def constant_table(scope: Sequence, value: float, domains: Mapping) -> FactorTable:
    """Table over ``scope`` with every entry equal to ``value``.

    ``domains`` maps variable ids to domain sizes; ``scope`` may be unsorted.
    """
    scope = sorted(scope)
    try:
        shape = tuple(domains[v] for v in scope)
    except KeyError as exc:
        raise UnknownVariableError(f"unknown variable {exc.args[0]!r}") from None
    return FactorTable(scope, np.full(shape, float(value)))


def _union_domains(tables: Iterable[FactorTable]) -> dict:
    dom = {}
    for t in tables:
        for v, d in zip(t.scope, t.values.shape):
            seen = dom.setdefault(v, d)
            if seen != d:
                raise DomainMismatchError(
                    f"variable {v!r} has domain {seen} in one table and {d} in another"
                )
    return dom


def _broadcast(t: FactorTable, scope, dom) -> np.ndarray:
    shape = [dom[v] if v in t.scope else 1 for v in scope]
    return t.values.reshape(shape)


def multiply(a: FactorTable, b: FactorTable) -> FactorTable:
    """Pointwise product over the union of both scopes."""
    dom = _union_domains((a, b))
    scope = sorted(dom)
    return FactorTable(scope, _broadcast(a, scope, dom) * _broadcast(b, scope, dom))


def marginalize(t: FactorTable, keep) -> FactorTable:
    """Sum ``t`` over every variable not in ``keep``."""
    keep = set(keep)
    missing = keep.difference(t.scope)
    if missing:
        raise ScopeError(f"cannot keep {sorted(missing)!r}: not in scope {t.scope}")
    axes = tuple(i for i, v in enumerate(t.scope) if v not in keep)
    if not axes:
        return t
    return FactorTable([v for v in t.scope if v in keep], t.values.sum(axis=axes))


def normalize(t: FactorTable) -> FactorTable:
    """Rescale ``t`` so its entries sum to one."""
    z = t.values.sum()
    if not z > 0:
        raise ValueError("cannot normalize a table with zero total mass")
    return FactorTable(t.scope, t.values / z)


def sum_product(tables: Sequence[FactorTable], keep) -> FactorTable:
    """Multiply ``tables`` together and marginalize the product onto ``keep``.

    Every variable of ``keep`` must occur in some table. This is the
    workhorse for cluster functions and messages; it contracts in one
    einsum call so the full product is never materialized when avoidable.
    """
    dom = _union_domains(tables)
    keep = sorted(set(keep))
    missing = [v for v in keep if v not in dom]
    if missing:
        raise ScopeError(f"cannot keep {missing!r}: not in any table scope")
    if not tables:
        return FactorTable((), 1.0)
    if len(tables) == 1:
        return marginalize(tables[0], keep)
    if len(dom) > _EINSUM_MAX_LABELS:
        acc = tables[0]
        for t in tables[1:]:
            acc = multiply(acc, t)
        return marginalize(acc, keep)
    label = {v: i for i, v in enumerate(sorted(dom))}
    operands = []
    for t in tables:
        operands.append(t.values)
        operands.append([label[v] for v in t.scope])
    operands.append([label[v] for v in keep])
    joint = 1
    for d in dom.values():
        joint *= d
    out = np.einsum(*operands, optimize=joint > _EINSUM_OPTIMIZE_ABOVE)
    return FactorTable(keep, out)
