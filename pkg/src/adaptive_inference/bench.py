"""Timing harness: adaptive updates versus rebuilding from scratch."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import astuple, dataclass, field, fields

import numpy as np

from .engine import AdaptiveInference
from .factor_table import marginalize
from .generators import gen_chain, random_table

OPS = ("build", "query", "replace_factor", "nontree_pair")


@dataclass(frozen=True)
class BenchRow:
    n: int
    op: str
    mean_time: float
    mean_touched: float
    rebuild_time: float
    depth: int


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    def header(self):
        return [f.name for f in fields(BenchRow)]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for row in self.rows:
            w.writerow(astuple(row))
        return buf.getvalue()

    def row(self, n, op):
        for r in self.rows:
            if r.n == n and r.op == op:
                return r
        raise KeyError((n, op))


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return time.perf_counter() - t0, out


def bench_size(n, trials, seed=0, k=2, length=2):
    """Per-operation mean wall times on one ``gen_chain(n, k, length)`` graph.

    Returns a dict ``op -> (mean seconds, mean touched clusters)`` plus the
    mean from-scratch rebuild time (build followed by one query) and the
    cluster-tree depth.
    """
    g = gen_chain(n, k, length, seed)
    rng = np.random.default_rng(seed)
    names = list(g.variables)
    factors = list(g.factors)
    sums = {op: [0.0, 0] for op in OPS}
    rebuild = 0.0
    engine = AdaptiveInference(seed=seed).fit(g)
    for _ in range(trials):
        x = names[rng.integers(len(names))]
        tb, fresh = _timed(AdaptiveInference(seed=seed).fit, g)
        tq, _ = _timed(fresh.query, x)
        rebuild += tb + tq
        sums["build"][0] += tb
        sums["build"][1] += fresh.touched_clusters()

        tq, _ = _timed(engine.query, x)
        sums["query"][0] += tq

        f = factors[rng.integers(len(factors))]
        table = random_table(rng, engine.graph_.factors[f].scope, engine.graph_.variables)
        t, _ = _timed(engine.replace_factor, f, table)
        sums["replace_factor"][0] += t
        sums["replace_factor"][1] += engine.touched_clusters()

        nontree = sorted(engine.graph_.nontree_edges())
        if nontree:
            vx, vf = nontree[rng.integers(len(nontree))]
            full = engine.graph_.factors[vf]
            reduced = marginalize(full, [y for y in full.scope if y != vx])
            t1, _ = _timed(engine.delete_nontree_edge, vx, vf, reduced)
            touched = engine.touched_clusters()
            t2, _ = _timed(engine.insert_nontree_edge, vx, vf, full)
            sums["nontree_pair"][0] += t1 + t2
            sums["nontree_pair"][1] += touched + engine.touched_clusters()
    means = {op: (s[0] / trials, s[1] / trials) for op, s in sums.items()}
    return means, rebuild / trials, engine.depth()


def run_bench(sizes, trials, seed=0, k=2, length=2) -> BenchReport:
    """One row per (size, operation); header only when ``trials == 0``."""
    report = BenchReport()
    if trials <= 0:
        return report
    for n in sizes:
        means, rebuild, depth = bench_size(n, trials, seed, k, length)
        for op in OPS:
            t, touched = means[op]
            report.rows.append(BenchRow(n, op, t, touched, rebuild, depth))
    return report
