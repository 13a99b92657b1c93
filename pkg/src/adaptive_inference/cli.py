"""Command-line interface.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors (unreadable
or invalid graph/script files, rejected edits).
"""
from __future__ import annotations

import argparse
import os
import sys

from .bench import run_bench
from .engine import AdaptiveInference
from .exceptions import InferenceError
from .factor_table import normalize
from .io import apply_op, format_table, parse_script, read_graph

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _default_seed():
    raw = os.environ.get("ADAPTIVE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"ADAPTIVE_SEED must be an integer, got {raw!r}") from None


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument(
        "--seed", type=int, default=None,
        help="contraction seed (default: $ADAPTIVE_SEED or 0)",
    )
    p = _Parser(
        prog="adaptive-inference",
        description="Adaptive exact inference on factor graphs.",
        parents=[common],
    )
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("build", parents=[common], help="print depth, measure, characteristic, cluster count")
    s.add_argument("graph")
    s = sub.add_parser("query", parents=[common], help="marginal of one variable")
    s.add_argument("graph")
    s.add_argument("var")
    s.add_argument("--normalize", action="store_true")
    s = sub.add_parser("oracle", parents=[common], help="brute-force marginal of one variable")
    s.add_argument("graph")
    s.add_argument("var")
    s.add_argument("--normalize", action="store_true")
    s = sub.add_parser("apply", parents=[common], help="replay an update script")
    s.add_argument("graph")
    s.add_argument("script")
    s.add_argument("--normalize", action="store_true")
    s = sub.add_parser("measure", parents=[common], help="print the spanning-tree measure")
    s.add_argument("graph")
    s = sub.add_parser("bench", parents=[common], help="time updates against rebuilds (CSV)")
    s.add_argument("--sizes", type=int, nargs="+", default=[128, 256, 512, 1024])
    s.add_argument("--trials", type=int, default=10)
    return p


def _fit(graph, seed):
    return AdaptiveInference(seed=seed).fit(graph)


def _show(label, table, norm):
    return format_table(label, normalize(table) if norm else table)


def run(args, out):
    seed = args.seed if args.seed is not None else _default_seed()
    cmd = args.command
    if cmd == "bench":
        if args.trials < 0 or any(n < 2 for n in args.sizes):
            raise _UsageError("bench: --trials must be >= 0 and every size >= 2")
        out.write(run_bench(args.sizes, args.trials, seed).to_csv())
        return EXIT_OK
    graph = read_graph(args.graph)
    if cmd == "measure":
        print(graph.measure_graph(), file=out)
    elif cmd == "oracle":
        if args.var not in graph.variables:
            raise InferenceError(f"unknown variable {args.var!r}")
        print(_show(args.var, graph.brute_force_marginal(args.var), args.normalize), file=out)
    elif cmd == "build":
        eng = _fit(graph, seed)
        print(f"depth {eng.depth()}", file=out)
        print(f"beta {graph.measure_graph()}", file=out)
        print(f"alpha {graph.characteristic()}", file=out)
        print(f"clusters {len(eng.skeleton_)}", file=out)
    elif cmd == "query":
        eng = _fit(graph, seed)
        if args.var not in graph.variables:
            raise InferenceError(f"unknown variable {args.var!r}")
        print(_show(args.var, eng.query(args.var), args.normalize), file=out)
    elif cmd == "apply":
        with open(args.script, encoding="utf-8") as fh:
            ops = parse_script(fh.read())
        eng = _fit(graph, seed)
        for op in ops:
            result = apply_op(eng, op)
            if result is not None:
                print(_show(op.args[0], result, args.normalize), file=out)
    return EXIT_OK


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return run(args, out)
    except _UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except (InferenceError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
