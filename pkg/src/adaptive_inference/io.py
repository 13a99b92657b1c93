"""Line-oriented text formats for factor graphs and update scripts.

Graph files::

    # comment
    var <id> <domain-size>
    factor <id> <var-id> ...
    table <factor-id> <value> ...
    tree <var-id> <factor-id>

``table`` values are row-major over the scope *as declared* on the
``factor`` line, last variable fastest. Edges not listed on a ``tree`` line
are non-tree edges.

Script files hold one edit or query per line::

    query <var-id>
    replace <factor-id> <value> ...
    insert_nontree <var-id> <factor-id> <value> ...
    delete_nontree <var-id> <factor-id> <value> ...
    insert_tree <var-id> <factor-id> <value> ...
    delete_tree <var-id> <factor-id> <value> ...
    swap_tree <remove-var> <remove-factor> <add-var> <add-factor>

Script values are laid out over the factor's resulting scope in canonical
(sorted) order.
"""
from __future__ import annotations

from dataclasses import dataclass

from .exceptions import FormatError, InferenceError
from .factor_graph import FactorGraph
from .factor_table import FactorTable


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _floats(tokens, lineno):
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise FormatError(f"bad number: {exc}", lineno) from None


def parse_graph(text) -> FactorGraph:
    """Parse the graph format; raises :class:`FormatError` on bad input."""
    g = FactorGraph()
    declared = {}
    tables = {}
    tree = []
    for lineno, tok in _lines(text):
        head, args = tok[0], tok[1:]
        if head == "var":
            if len(args) != 2:
                raise FormatError("expected 'var <id> <domain-size>'", lineno)
            try:
                size = int(args[1])
            except ValueError:
                raise FormatError(f"bad domain size {args[1]!r}", lineno) from None
            if size < 1:
                raise FormatError(f"domain size of {args[0]!r} must be positive", lineno)
            if args[0] in g.variables:
                raise FormatError(f"duplicate variable {args[0]!r}", lineno)
            g.add_variable(args[0], size)
        elif head == "factor":
            if not args:
                raise FormatError("expected 'factor <id> <var-id> ...'", lineno)
            fid, scope = args[0], args[1:]
            if fid in declared:
                raise FormatError(f"duplicate factor {fid!r}", lineno)
            for x in scope:
                if x not in g.variables:
                    raise FormatError(f"factor {fid!r} uses unknown variable {x!r}", lineno)
            if len(set(scope)) != len(scope):
                raise FormatError(f"factor {fid!r} repeats a variable", lineno)
            declared[fid] = (scope, lineno)
        elif head == "table":
            if not args:
                raise FormatError("expected 'table <factor-id> <value> ...'", lineno)
            fid = args[0]
            if fid not in declared:
                raise FormatError(f"table for undeclared factor {fid!r}", lineno)
            if fid in tables:
                raise FormatError(f"second table for factor {fid!r}", lineno)
            scope = declared[fid][0]
            values = _floats(args[1:], lineno)
            expected = 1
            for x in scope:
                expected *= g.variables[x]
            if len(values) != expected:
                raise FormatError(
                    f"factor {fid!r} needs {expected} values, got {len(values)}", lineno
                )
            if any(v < 0 for v in values):
                raise FormatError(f"factor {fid!r} has a negative value", lineno)
            tables[fid] = FactorTable.from_unsorted(
                scope, values, [g.variables[x] for x in scope]
            )
        elif head == "tree":
            if len(args) != 2:
                raise FormatError("expected 'tree <var-id> <factor-id>'", lineno)
            tree.append((tuple(args), lineno))
        else:
            raise FormatError(f"unknown directive {head!r}", lineno)
    for fid, (scope, lineno) in declared.items():
        if fid not in tables:
            raise FormatError(f"factor {fid!r} has no table", lineno)
        g.add_factor(fid, tables[fid])
    for (x, f), lineno in tree:
        if not g.has_edge(x, f):
            raise FormatError(f"tree edge ({x}, {f}) is not an edge of the graph", lineno)
    try:
        g.set_spanning_tree([e for e, _ in tree])
    except InferenceError as exc:
        raise FormatError(f"invalid spanning tree: {exc}") from None
    return g


def _num(v):
    return repr(float(v))


def serialize_graph(graph: FactorGraph) -> str:
    """Canonical text form: scopes sorted, tree edges sorted, exact floats."""
    out = [f"var {x} {d}" for x, d in graph.variables.items()]
    for f, t in graph.factors.items():
        out.append(" ".join(["factor", str(f), *map(str, t.scope)]))
        out.append(" ".join(["table", str(f), *map(_num, t.flat)]))
    for x, f in sorted(graph.tree_edges, key=lambda e: (str(e[0]), str(e[1]))):
        out.append(f"tree {x} {f}")
    return "\n".join(out) + "\n"


def read_graph(path) -> FactorGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(graph, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_graph(graph))


# -- update scripts ----------------------------------------------------------

EDGE_OPS = ("insert_nontree", "delete_nontree", "insert_tree", "delete_tree")


@dataclass(frozen=True)
class UpdateOp:
    """One replayable script entry."""

    kind: str
    args: tuple
    values: tuple = ()
    lineno: int | None = None

    def to_line(self):
        return " ".join([self.kind, *map(str, self.args), *map(_num, self.values)])


def parse_script(text):
    ops = []
    for lineno, tok in _lines(text):
        kind, rest = tok[0], tok[1:]
        if kind == "query":
            if len(rest) != 1:
                raise FormatError("expected 'query <var-id>'", lineno)
            ops.append(UpdateOp(kind, tuple(rest), lineno=lineno))
        elif kind == "replace":
            if len(rest) < 2:
                raise FormatError("expected 'replace <factor-id> <value> ...'", lineno)
            ops.append(UpdateOp(kind, (rest[0],), tuple(_floats(rest[1:], lineno)), lineno))
        elif kind in EDGE_OPS:
            if len(rest) < 3:
                raise FormatError(f"expected '{kind} <var-id> <factor-id> <value> ...'", lineno)
            ops.append(UpdateOp(kind, tuple(rest[:2]), tuple(_floats(rest[2:], lineno)), lineno))
        elif kind == "swap_tree":
            if len(rest) != 4:
                raise FormatError(
                    "expected 'swap_tree <var> <factor> <var> <factor>'", lineno
                )
            ops.append(UpdateOp(kind, tuple(rest), lineno=lineno))
        else:
            raise FormatError(f"unknown script operation {kind!r}", lineno)
    return ops


def _script_table(graph, scope, values, lineno):
    scope = sorted(scope)
    shape = [graph.variables[x] for x in scope]
    expected = 1
    for d in shape:
        expected *= d
    if len(values) != expected:
        raise FormatError(
            f"table over {scope} needs {expected} values, got {len(values)}", lineno
        )
    return FactorTable(scope, values, shape)


def apply_op(engine, op):
    """Apply one :class:`UpdateOp`; returns the marginal for ``query`` ops."""
    g = engine.graph_
    try:
        if op.kind == "query":
            return engine.query(op.args[0])
        if op.kind == "swap_tree":
            engine.swap_tree_edge(op.args[:2], op.args[2:])
            return None
        if op.kind == "replace":
            f = op.args[0]
            if f not in g.factors:
                raise FormatError(f"unknown factor {f!r}", op.lineno)
            engine.replace_factor(f, _script_table(g, g.factors[f].scope, op.values, op.lineno))
            return None
        x, f = op.args
        if f not in g.factors or x not in g.variables:
            raise FormatError(f"unknown edge endpoint in {(x, f)!r}", op.lineno)
        scope = set(g.factors[f].scope)
        scope = scope | {x} if op.kind.startswith("insert") else scope - {x}
        table = _script_table(g, scope, op.values, op.lineno)
        getattr(engine, f"{op.kind}_edge")(x, f, table)
        return None
    except FormatError:
        raise
    except InferenceError as exc:
        where = f"line {op.lineno}: " if op.lineno is not None else ""
        raise type(exc)(f"{where}{exc}") from None


def format_table(label, table, digits=12):
    """One-line rendering: ``label: v0 v1 ...`` with ``digits`` significant digits."""
    return f"{label}: " + " ".join(f"{v:.{digits}g}" for v in table.flat)
