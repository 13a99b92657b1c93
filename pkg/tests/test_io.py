import numpy as np
import pytest

from adaptive_inference import (
    AdaptiveInference,
    FormatError,
    gen_chain,
    ladder,
    parse_graph,
    parse_script,
    serialize_graph,
)
from adaptive_inference.generators import random_factor_graph
from adaptive_inference.io import apply_op, format_table, read_graph, write_graph


def test_minimal_file():
    g = parse_graph("var x 2\nfactor f x\ntable f 1.0 2.0\ntree x f\n")
    assert g.variables == {"x": 2}
    assert g.factors["f"].flat.tolist() == [1.0, 2.0]
    assert g.tree_edges == {("x", "f")}


def test_declared_order_is_transposed():
    # declared (b, a), so the second value is b=0, a=1
    g = parse_graph("var a 2\nvar b 3\nfactor f b a\ntable f 0 1 2 3 4 5\ntree a f\ntree b f\n")
    t = g.factors["f"]
    assert t.scope == ("a", "b")
    assert t[{"a": 1, "b": 0}] == 1.0
    assert t[{"a": 0, "b": 2}] == 4.0


def test_comments_and_blank_lines():
    text = "# header\n\nvar x 2  # trailing\nfactor f x\ntable f 1 1\ntree x f\n"
    assert parse_graph(text).variables == {"x": 2}


@pytest.mark.parametrize(
    "graph",
    [gen_chain(12, 3, 2, seed=1), ladder(6, "snake"), random_factor_graph(np.random.default_rng(2), 9)],
    ids=["chain", "ladder", "random"],
)
def test_round_trip(graph):
    text = serialize_graph(graph)
    again = parse_graph(text)
    assert serialize_graph(again) == text
    assert again.tree_edges == graph.tree_edges
    for f, t in graph.factors.items():
        assert np.array_equal(again.factors[f].values, t.values)


def test_file_round_trip(tmp_path):
    g = gen_chain(8, 2, 2)
    path = tmp_path / "g.fg"
    write_graph(g, path)
    assert serialize_graph(read_graph(path)) == serialize_graph(g)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("var x 2\nfactor f x\ntable f 1.0\ntree x f\n", "'f' needs 2 values, got 1"),
        ("var x 2\nvar x 2\n", "duplicate variable"),
        ("var x two\n", "bad domain size"),
        ("var x 2\nfactor f y\n", "unknown variable 'y'"),
        ("var x 2\nfactor f x x\n", "repeats a variable"),
        ("var x 2\nfactor f x\n", "has no table"),
        ("var x 2\nfactor f x\ntable f 1 -1\ntree x f\n", "negative"),
        ("var x 2\nfactor f x\ntable f 1 nan_ish\n", "bad number"),
        ("var x 2\nfactor f x\ntable f 1 1\n", "invalid spanning tree"),
        ("var x 2\nvar y 2\nfactor f x\ntable f 1 1\ntree y f\n", "not an edge"),
        ("frobnicate\n", "unknown directive"),
    ],
)
def test_format_errors(text, fragment):
    with pytest.raises(FormatError, match=fragment):
        parse_graph(text)


def test_error_carries_line_number():
    with pytest.raises(FormatError) as info:
        parse_graph("var x 2\n\nfactor f x\ntable f 1\n")
    assert info.value.lineno == 4
    assert str(info.value).startswith("line 4:")


def test_script_parse_and_apply():
    g = parse_graph("var x 2\nvar y 2\nfactor f x y\ntable f 1 2 3 4\ntree x f\ntree y f\n")
    ops = parse_script("query x\nreplace f 1 1 1 1\nquery x\n")
    assert [op.kind for op in ops] == ["query", "replace", "query"]
    eng = AdaptiveInference().fit(g)
    results = [apply_op(eng, op) for op in ops]
    assert results[0].flat.tolist() == [3.0, 7.0]
    assert results[1] is None
    assert results[2].flat.tolist() == [2.0, 2.0]


def test_script_value_count_checked():
    g = parse_graph("var x 2\nfactor f x\ntable f 1 2\ntree x f\n")
    eng = AdaptiveInference().fit(g)
    (op,) = parse_script("replace f 1 2 3\n")
    with pytest.raises(FormatError, match="line 1"):
        apply_op(eng, op)


@pytest.mark.parametrize(
    "text", ["query\n", "replace f\n", "insert_tree x f\n", "swap_tree a b c\n", "teleport x\n"]
)
def test_script_syntax_errors(text):
    with pytest.raises(FormatError):
        parse_script(text)


def test_to_line_round_trip():
    ops = parse_script("insert_nontree x f 0.5 1.25\nswap_tree a b c d\n")
    assert parse_script("\n".join(op.to_line() for op in ops)) == [
        type(op)(op.kind, op.args, op.values, i + 1) for i, op in enumerate(ops)
    ]


def test_format_table():
    g = parse_graph("var x 3\nfactor f x\ntable f 1 0.1 123456789.123\ntree x f\n")
    assert format_table("x", g.factors["f"]) == "x: 1 0.1 123456789.123"
