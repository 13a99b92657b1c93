"""Randomized rake/compress contraction of a spanning forest.

Contraction proceeds in synchronous rounds over the current contracted
forest. In each round:

* a vertex with no neighbours finalizes and becomes the root of its component;
* a degree-1 vertex rakes into its neighbour, except that of two adjacent
  degree-1 vertices only the larger one rakes (the smaller survives as root);
* a degree-2 vertex whose neighbours both have degree >= 2 compresses when
  its round bit is 1 and both neighbours' bits are 0;
* everything else waits.

A compressed vertex ``v`` between ``a`` and ``c`` is replaced by a contracted
edge ``(a, c)`` labelled ``v``. The cluster of a vertex consists of the vertex
itself, the clusters raked into it, and the clusters labelling the edges it
consumes when it is eliminated. Per-round adjacency is kept so that an edit
to the forest can be absorbed by replaying only the rounds and vertices whose
inputs changed.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .exceptions import GraphStructureError, TreeCycleError

_MASK64 = (1 << 64) - 1

STAY = "stay"
RAKE = "rake"
COMPRESS = "compress"
ROOT = "root"


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def vertex_key(v):
    """Stable 64-bit key for a vertex, independent of Python's hash seed."""
    digest = hashlib.blake2b(repr(v).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class Elimination:
    """How and when a vertex left the contracted forest.

    ``target`` is the vertex raked into (rakes only); ``consumed`` holds the
    labels of contracted edges swallowed by this vertex's cluster.
    """

    round: int
    kind: str
    target: object = None
    consumed: tuple = ()


@dataclass
class ClusterSkeleton:
    """Cluster tree: one cluster per vertex, identified by that vertex."""

    parent: dict = field(default_factory=dict)
    children: dict = field(default_factory=dict)
    roots: set = field(default_factory=set)

    def __contains__(self, v):
        return v in self.parent

    def __len__(self):
        return len(self.parent)

    def _require(self, v):
        if v not in self.parent:
            raise KeyError(f"unknown vertex {v!r}")

    def path_to_root(self, v):
        """Clusters from ``v``'s own cluster up to its root, inclusive."""
        self._require(v)
        path = [v]
        p = self.parent[v]
        while p is not None:
            path.append(p)
            p = self.parent[p]
        return path

    def root_of(self, v):
        return self.path_to_root(v)[-1]

    def contains(self, cluster, v):
        """True iff vertex ``v`` belongs to the cluster identified by ``cluster``."""
        while v is not None:
            if v == cluster:
                return True
            v = self.parent[v]
        return False

    def levels(self):
        """Depth of every cluster, counting the root as level 1."""
        level = {}
        for v in self.parent:
            chain = []
            u = v
            while u is not None and u not in level:
                chain.append(u)
                u = self.parent[u]
            base = 0 if u is None else level[u]
            for w in reversed(chain):
                base += 1
                level[w] = base
        return level

    def depth(self):
        """Number of clusters on the longest root-to-leaf chain."""
        return max(self.levels().values(), default=0)

    def members(self):
        """Vertex set of every cluster (cost proportional to n times depth)."""
        sets = {v: {v} for v in self.parent}
        for v, lvl in sorted(self.levels().items(), key=lambda kv: -kv[1]):
            p = self.parent[v]
            if p is not None:
                sets[p] |= sets[v]
        return sets

    def linking_edges(self, v, tree_neighbours):
        """Map each child of ``v`` to the tree neighbour of ``v`` inside it.

        When several neighbours fall in one child the smallest wins.
        """
        links = {}
        for w in sorted(tree_neighbours):
            u = w
            while u is not None and self.parent[u] != v:
                u = self.parent[u]
            if u is not None and u in self.children[v]:
                links.setdefault(u, w)
        return links


class ContractionState:
    """Round-by-round record of one contraction, enabling change propagation.

    ``rounds[r]`` maps every vertex alive at the start of round ``r`` to its
    contracted adjacency ``{neighbour: label}``, where ``label`` is ``None``
    for an original tree edge and the compressed vertex otherwise.
    """

    def __init__(self, seed=0):
        self.seed = int(seed) & _MASK64
        self.rounds: list = []
        self.elim: dict = {}
        self._keys: dict = {}
        self._seed_mix = _splitmix64(self.seed)

    def bit(self, v, r):
        """Deterministic coin for vertex ``v`` in round ``r``."""
        key = self._keys.get(v)
        if key is None:
            key = self._keys[v] = vertex_key(v)
        return _splitmix64(self._seed_mix ^ key ^ _splitmix64(r)) & 1

    def decide(self, r, adj, v):
        nbrs = adj[v]
        deg = len(nbrs)
        if deg == 0:
            return ROOT
        if deg == 1:
            (u,) = nbrs
            if len(adj[u]) == 1 and v < u:
                return STAY
            return RAKE
        if deg == 2:
            if not self.bit(v, r):
                return STAY
            for u in nbrs:
                if len(adj[u]) < 2 or self.bit(u, r):
                    return STAY
            return COMPRESS
        return STAY

    def _record(self, r, adj, v, kind):
        nbrs = adj[v]
        if kind == RAKE:
            (u,) = nbrs
            lab = nbrs[u]
            return Elimination(r, RAKE, u, () if lab is None else (lab,))
        if kind == COMPRESS:
            labs = sorted(lab for lab in nbrs.values() if lab is not None)
            return Elimination(r, COMPRESS, None, tuple(labs))
        return Elimination(r, ROOT)

    @staticmethod
    def _next_adjacency(adj, x, decision):
        out = {}
        for u, lab in adj[x].items():
            du = decision(u)
            if du == RAKE:
                continue
            if du == COMPRESS:
                for w in adj[u]:
                    if w != x:
                        out[w] = u
            else:
                out[u] = lab
        return out


def _initial_adjacency(vertices, tree_edges):
    adj = {v: {} for v in vertices}
    for u, w in tree_edges:
        if u not in adj or w not in adj:
            raise GraphStructureError(f"tree edge {(u, w)!r} has an unknown endpoint")
        if w in adj[u] or u == w:
            raise TreeCycleError(f"repeated tree edge {(u, w)!r}")
        adj[u][w] = None
        adj[w][u] = None
    return adj


def _check_acyclic(adj):
    seen = set()
    for s in adj:
        if s in seen:
            continue
        seen.add(s)
        stack = [(s, None)]
        while stack:
            a, via = stack.pop()
            for b in adj[a]:
                if b == via:
                    continue
                if b in seen:
                    raise TreeCycleError(f"tree edges contain a cycle through {b!r}")
                seen.add(b)
                stack.append((b, a))


def contract(tree_edges, vertices, seed=0):
    """Contract a forest given as vertex pairs.

    Returns ``(skeleton, state)``. The result depends only on the edge set,
    the vertex set and ``seed``.
    """
    vertices = list(vertices)
    adj = _initial_adjacency(vertices, tree_edges)
    _check_acyclic(adj)
    state = ContractionState(seed)
    r = 0
    while adj:
        state.rounds.append(adj)
        decisions = {v: state.decide(r, adj, v) for v in adj}
        nxt = {}
        for v, kind in decisions.items():
            if kind == STAY:
                nxt[v] = state._next_adjacency(adj, v, decisions.__getitem__)
            else:
                state.elim[v] = state._record(r, adj, v, kind)
        adj = nxt
        r += 1
    return build_skeleton(state), state


def build_skeleton(state):
    """Derive the cluster tree from a contraction record."""
    sk = ClusterSkeleton()
    for v in state.elim:
        sk.children[v] = set()
    for v, e in state.elim.items():
        if e.kind == RAKE:
            sk.children[e.target].add(v)
            sk.parent[v] = e.target
        elif e.kind == ROOT:
            sk.parent[v] = None
            sk.roots.add(v)
        for lab in e.consumed:
            sk.children[v].add(lab)
            sk.parent[lab] = v
    return sk


def propagate(state, skeleton, edit):
    """Insert or delete one tree edge, updating ``state`` and ``skeleton`` in place.

    ``edit`` is ``("insert" | "delete", u, w)`` with vertices ``u`` and ``w``.
    Only rounds and vertices whose inputs differ from the recorded run are
    recomputed. Returns the set of clusters whose parent or children changed;
    afterwards both objects equal a fresh :func:`contract` of the edited
    forest under the same seed.
    """
    op, u, w = edit
    base = state.rounds[0] if state.rounds else {}
    for a in (u, w):
        if a not in state.elim:
            raise GraphStructureError(f"unknown vertex {a!r}")
    if op == "delete":
        if w not in base.get(u, ()):
            raise GraphStructureError(f"{(u, w)!r} is not a tree edge")
        pending = {u: dict(base[u]), w: dict(base[w])}
        del pending[u][w]
        del pending[w][u]
    elif op == "insert":
        if skeleton.root_of(u) == skeleton.root_of(w):
            raise TreeCycleError(f"inserting {(u, w)!r} would close a tree cycle")
        pending = {u: dict(base[u]), w: dict(base[w])}
        pending[u][w] = None
        pending[w][u] = None
    else:
        raise ValueError(f"unknown edit {op!r}")
    before = _replay(state, pending)
    return _refresh_skeleton(state, skeleton, before)


def _replay(state, pending):
    # Re-run rounds starting from 0, touching only vertices whose adjacency
    # (pending) or neighbourhood changed. Returns old records of every vertex
    # whose elimination record was replaced.
    before = {}
    r = 0
    while pending:
        if r == len(state.rounds):
            state.rounds.append({})
        rnd = state.rounds[r]
        redo = set()
        for v, a in pending.items():
            prev = rnd.get(v)
            if prev:
                redo.update(u for u in prev if u in rnd)
            if a is None:
                rnd.pop(v, None)
            else:
                rnd[v] = a
        for v in pending:
            if v in rnd:
                redo.add(v)
                redo.update(rnd[v])
        redo = {v for v in redo if v in rnd}
        new_dec = {v: state.decide(r, rnd, v) for v in redo}

        def decision(u, _r=r):
            d = new_dec.get(u)
            if d is not None:
                return d
            e = state.elim[u]
            return e.kind if e.round == _r else STAY

        for v, kind in new_dec.items():
            if kind != STAY:
                new = state._record(r, rnd, v, kind)
                old = state.elim.get(v)
                if new != old:
                    before.setdefault(v, old)
                    state.elim[v] = new
        check = set(redo)
        for v in redo:
            check.update(rnd[v])
        old_next = state.rounds[r + 1] if r + 1 < len(state.rounds) else {}
        nxt = {}
        for x in check:
            alive = decision(x) == STAY
            new_adj = state._next_adjacency(rnd, x, decision) if alive else None
            if new_adj != old_next.get(x):
                nxt[x] = new_adj
        for v, a in pending.items():
            if a is None and v in old_next:
                nxt[v] = None
        pending = nxt
        r += 1
    while state.rounds and not state.rounds[-1]:
        state.rounds.pop()
    return before


def _refresh_skeleton(state, sk, before):
    changed = set()
    for v, old in before.items():
        new = state.elim[v]
        if old is not None and old.kind == RAKE:
            sk.children[old.target].discard(v)
            changed.add(old.target)
        if old is not None:
            sk.children[v].difference_update(old.consumed)
            changed.update(old.consumed)
        if old is not None and old.kind == ROOT:
            sk.roots.discard(v)
        changed.add(v)
    for v in before:
        new = state.elim[v]
        if new.kind == RAKE:
            sk.children[new.target].add(v)
            sk.parent[v] = new.target
            changed.add(new.target)
        elif new.kind == ROOT:
            sk.parent[v] = None
            sk.roots.add(v)
        for lab in new.consumed:
            sk.children[v].add(lab)
            sk.parent[lab] = v
            changed.add(lab)
    return changed
