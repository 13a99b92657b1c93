import io

import pytest

from adaptive_inference import gen_chain, serialize_graph
from adaptive_inference.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def parse_lines(text):
    return {
        line.split(":")[0]: [float(v) for v in line.split(":")[1].split()]
        for line in text.splitlines()
    }


@pytest.mark.parametrize("name, beta", [("ladder_comb.fg", "3"), ("ladder_snake.fg", "8")])
def test_measure_ladder(fixture_path, name, beta):
    code, out, _ = run("measure", fixture_path(name))
    assert code == EXIT_OK
    assert out.strip() == beta


@pytest.mark.parametrize("name", ["chain.fg", "cycle4.fg", "ladder_comb.fg", "ladder_snake.fg"])
def test_query_matches_oracle(fixture_path, name):
    text = open(fixture_path(name)).read()
    names = [line.split()[1] for line in text.splitlines() if line.startswith("var ")]
    for var in names[:4]:
        q = parse_lines(run("query", fixture_path(name), var)[1])
        o = parse_lines(run("oracle", fixture_path(name), var)[1])
        assert q.keys() == o.keys() == {var}
        assert q[var] == pytest.approx(o[var], rel=1e-9)


def test_query_normalized(fixture_path):
    _, out, _ = run("query", fixture_path("chain.fg"), "x1", "--normalize")
    assert out == "x1: 0.3 0.7\n"


def test_apply_round_trip(fixture_path):
    code, out, _ = run("apply", fixture_path("cycle4.fg"), fixture_path("roundtrip.txt"))
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines == [
        "x1: 5.25 35",
        "x2: 6.5 9 24.75",
        "x1: 5.25 35",
        "x2: 6.5 9 24.75",
        "x1: 5.25 35",
        "x2: 6.5 9 24.75",
    ]


def test_apply_is_deterministic(fixture_path):
    args = ("apply", fixture_path("cycle4.fg"), fixture_path("roundtrip.txt"), "--seed", "17")
    assert run(*args)[1] == run(*args)[1]


def test_build_summary(fixture_path):
    code, out, _ = run("build", fixture_path("ladder_comb.fg"))
    assert code == EXIT_OK
    fields = dict(line.split() for line in out.splitlines())
    assert fields["beta"] == "3"
    assert fields["alpha"] == "16"
    assert fields["clusters"] == "38"
    assert int(fields["depth"]) >= 1


def test_bench_header_only():
    code, out, _ = run("bench", "--trials", "0")
    assert code == EXIT_OK
    assert out == "n,op,mean_time,mean_touched,rebuild_time,depth\n"


def test_bench_rows():
    code, out, _ = run("bench", "--sizes", "16", "--trials", "2")
    assert code == EXIT_OK
    rows = out.splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["build", "query", "replace_factor", "nontree_pair"]


def test_usage_errors(fixture_path):
    assert run()[0] == EXIT_USAGE
    assert run("frobnicate")[0] == EXIT_USAGE
    assert run("query", fixture_path("chain.fg"))[0] == EXIT_USAGE
    assert run("bench", "--trials", "-1")[0] == EXIT_USAGE


def test_data_errors(tmp_path, fixture_path):
    bad = tmp_path / "bad.fg"
    bad.write_text("var x 2\nfactor f x\ntable f 1\n")
    code, _, err = run("measure", str(bad))
    assert code == EXIT_DATA
    assert "line 3" in err
    assert run("measure", str(tmp_path / "missing.fg"))[0] == EXIT_DATA
    assert run("query", fixture_path("chain.fg"), "nope")[0] == EXIT_DATA
    script = tmp_path / "s.txt"
    script.write_text("delete_tree x1 f 1 1\n")
    code, _, err = run("apply", fixture_path("cycle4.fg"), str(script))
    assert code == EXIT_DATA
    assert "line 1" in err


def test_seed_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "chain.fg"
    path.write_text(serialize_graph(gen_chain(200, 3, 2)))
    depths = {}
    for seed in ("1", "2"):
        monkeypatch.setenv("ADAPTIVE_SEED", seed)
        depths[seed] = run("build", str(path))[1]
        assert run("build", str(path), "--seed", seed)[1] == depths[seed]
    assert run("build", str(path), "--seed", "1")[1] == depths["1"]
    monkeypatch.setenv("ADAPTIVE_SEED", "abc")
    assert run("build", str(path))[0] == EXIT_USAGE
