import io
import json
import math
import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nilmetric.cli import format_element, format_word, main, parse_element, parse_word
from nilmetric.core import GroupElement, Word, decreasing_generators, evaluate_word
from nilmetric.exact import MAGIC, read_ball


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def doc(dim, entries):
    return json.dumps({"dim": dim, "entries": [list(t) for t in entries]})


# ------------------------------------------------------------ text formats

def test_parse_word_tokens():
    w = parse_word("a[1,2]^3 a[2,3]^-1 a[1,3]")
    assert w == Word([((1, 2), 3), ((2, 3), -1), ((1, 3), 1)])
    h = parse_word("a_1^2 b_2 c^-4", heisenberg_k=2)
    assert h == Word([((1, 2), 2), ((3, 4), 1), ((1, 4), -4)])


@pytest.mark.parametrize("bad", ["a[1,2]^", "x^2", "a[1,2]^1.5", "a(1,2)"])
def test_parse_word_rejects(bad):
    with pytest.raises(ValueError):
        parse_word(bad)


def test_aliases_need_heisenberg_flag():
    with pytest.raises(ValueError):
        parse_word("c^2")


@st.composite
def words(draw):
    n = draw(st.integers(2, 6))
    gens = decreasing_generators(n)
    return Word(draw(st.lists(st.tuples(st.sampled_from(gens), st.integers(-10 ** 9, 10 ** 9)), max_size=12)))


@given(words())
def test_word_round_trip(w):
    assert parse_word(format_word(w)) == w


@given(st.integers(1, 4), st.data())
def test_heisenberg_word_round_trip(k, data):
    from nilmetric.quasimetric import heisenberg_generators
    gens = heisenberg_generators(k)
    w = Word(data.draw(st.lists(st.tuples(st.sampled_from(gens), st.integers(-50, 50)), max_size=10)))
    text = format_word(w, k)
    assert "[" not in text
    assert parse_word(text, k) == w


@given(st.integers(2, 6), st.data())
def test_element_round_trip(n, data):
    size = n * (n - 1) // 2
    x = GroupElement(n, data.draw(st.lists(st.integers(-10 ** 30, 10 ** 30), min_size=size, max_size=size)))
    assert parse_element(format_element(x)) == x


def test_element_document_shape():
    assert format_element(GroupElement(3, {(1, 3): 9})) == '{"dim":3,"entries":[[1,3,9]]}'


@pytest.mark.parametrize("bad", [
    "not json", '{"entries":[]}', '{"dim":3,"entries":[[1,4,1]]}', '{"dim":3,"entries":[[2,1,1]]}',
    '{"dim":3,"entries":[[1,2,1],[1,2,2]]}', '{"dim":3,"entries":[[1,2]]}', '{"dim":"3"}',
    '{"dim":3,"entries":[[1,2,1.5]]}',
])
def test_parse_element_rejects(bad):
    with pytest.raises(ValueError):
        parse_element(bad)


# ------------------------------------------------------------ subcommands

def test_nf_examples():
    assert run("nf", "--dim", "3", "--word", "a[1,2]^1 a[2,3]^1") == (0, "a[1,3]^1 a[2,3]^1 a[1,2]^1\n")
    assert run("nf", doc(3, [])) == (0, "\n")
    assert run("nf", "--heisenberg", "2", "--word", "c^3") == (0, "c^3\n")


def test_nf_output_reparses():
    code, text = run("nf", "--dim", "4", "--word", "a[1,3]^2 a[3,4]^-1 a[1,2]^5 a[2,4]^3")
    assert code == 0
    w = parse_word(text)
    assert evaluate_word(w, 4) == evaluate_word(parse_word("a[1,3]^2 a[3,4]^-1 a[1,2]^5 a[2,4]^3"), 4)


def test_heisenberg_nf_order():
    code, text = run("nf", "--heisenberg", "2", "--word", "a_1 b_1 a_2^2 b_2^3")
    assert code == 0
    assert text.split()[0].startswith("c^")
    assert [t.split("^")[0] for t in text.split()] == ["c", "b_2", "a_2", "b_1", "a_1"]


def test_metric_examples():
    code, text = run("metric", doc(3, [(1, 3, 9)]))
    assert code == 0
    assert text.splitlines()[0] == "E = 3"
    assert "a[1,3]: 3" in text
    assert run("metric", doc(4, []))[1].splitlines()[0] == "E = 0"


def test_metric_with_exact_radius():
    code, text = run("metric", "--exact-radius", "6", doc(3, [(1, 2, 1), (2, 3, 1), (1, 3, 1)]))
    assert code == 0
    assert "exact = 2" in text
    assert "holds" in text
    code, text = run("metric", "--exact-radius", "2", doc(3, [(1, 2, 10)]))
    assert "exact > 2" in text


def test_shortword_examples():
    code, text = run("shortword", doc(3, [(1, 3, 100)]))
    lines = text.splitlines()
    assert code == 0 and lines[1] == "length 40" and lines[-1] == "VERIFIED"
    assert evaluate_word(parse_word(lines[0][len("word "):]), 3) == GroupElement(3, {(1, 3): 100})
    code, text = run("shortword", doc(3, []))
    assert text.splitlines() == ["word", "length 0", "E = 0", "VERIFIED"]
    code, text = run("shortword", "--heisenberg", "1", "--word", "c^7")
    length = int(text.splitlines()[1].split()[1])
    assert code == 0 and length <= 16 * math.sqrt(7) and text.endswith("VERIFIED\n")


def test_shortword_failure_is_exit_4(monkeypatch):
    import nilmetric.cli as cli
    monkeypatch.setattr(cli, "short_word", lambda x: Word.single(1, 2))
    assert run("shortword", doc(3, [(1, 3, 5)]))[0] == 4


def test_collect_word_and_random():
    code, text = run("collect", "--dim", "3", "--word", "a[1,2] a[2,3]")
    assert code == 0
    assert "nf a[1,3]^1 a[2,3]^1 a[1,2]^1" in text and "swaps 3" in text
    a = run("--seed", "5", "collect", "--dim", "4", "--random-length", "30")
    b = run("collect", "--dim", "4", "--random-length", "30", "--seed", "5")
    c = run("collect", "--dim", "4", "--random-length", "30", "--seed", "6")
    assert a == b and a[1] != c[1]


def test_calibrate_examples():
    code, text = run("calibrate", "--dim", "3", "--radius", "1")
    assert code == 0 and text.splitlines()[-1] == "best C=1 D=0"
    code, text = run("calibrate", "--dim", "3", "--radius", "4")
    assert code == 0
    rows = [l.split("\t") for l in text.splitlines()[2:-1]]
    assert len(rows) == 9 and all(math.isfinite(float(r[1])) for r in rows)
    assert parse_element(rows[0][2]).dim == 3
    code, text = run("calibrate", "--heisenberg", "1", "--gens", "diag", "--radius", "8")
    assert code == 0 and "best C=" in text


def test_distort_examples():
    def fitted(*args):
        code, text = run("distort", *args)
        assert code == 0
        return float(text.splitlines()[-2].split()[-1]), text.splitlines()[-1]
    f, pred = fitted("--embedding", "heis-in-T", "--k", "2", "--nmax", "4096")
    assert abs(f - 2) <= 0.2 and pred == "predicted exponent 2"
    assert abs(fitted("--embedding", "corner", "--k", "3", "--l", "5")[0] - 1) <= 0.1
    assert abs(fitted("--embedding", "block", "--k", "3", "--l", "5", "--a", "1")[0] - 3) <= 0.3
    assert abs(fitted("--embedding", "composed", "--k", "3", "--l", "6", "--r", "2")[0] - 2) <= 0.2
    assert abs(fitted("--embedding", "heis-subset", "--k", "1", "--l", "2", "--K", "2")[0] - 1) <= 0.1


def test_distort_csv_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run("--seed", "3", "distort", "--embedding", "block", "--k", "3", "--l", "4",
                   "--nmax", "1024", "--csv", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text().splitlines()[1] == "n,max_inner_estimate,log_n,log_max"


@pytest.mark.parametrize("args", [
    ("distort", "--embedding", "block", "--k", "3", "--l", "3"),
    ("distort", "--embedding", "composed", "--k", "3", "--l", "6", "--r", "5"),
    ("distort", "--embedding", "corner", "--k", "3"),
    ("distort", "--embedding", "heis-subset", "--k", "2", "--l", "3", "--K", "1,1"),
    ("distort", "--embedding", "nope", "--k", "3"),
])
def test_invalid_embedding_is_exit_2(args):
    assert run(*args)[0] == 2


def test_ball_export(tmp_path):
    p = tmp_path / "ball.txt"
    code, text = run("ball", "--dim", "3", "--radius", "3", "--out", str(p))
    assert code == 0 and "spheres 1 6 22 54" in text
    assert p.read_text().startswith(MAGIC + "\n")
    t = read_ball(p)
    assert len(t) == 83 and t.radius == 3


# ------------------------------------------------------------ exit codes and I/O

@pytest.mark.parametrize("args", [
    ("nf",),
    ("nf", "--dim", "3", "--word", "a[1,4]"),
    ("nf", "not json"),
    ("nf", "--dim", "3", "--word", "zzz"),
    ("nf", doc(3, []), "--word", "a[1,2]"),
    ("metric", "--heisenberg", "1", doc(3, [(1, 2, 1)]), "--dim", "4"),
    ("nf", "--heisenberg", "2", doc(4, [(2, 3, 1)])),
    ("calibrate", "--radius", "2"),
    ("nf", "@/nonexistent/file.json"),
    ("frobnicate",),
])
def test_input_errors_exit_2(args):
    assert run(*args)[0] == 2


def test_budget_exit_3(monkeypatch):
    monkeypatch.setenv("NILMETRIC_BUDGET", "100")
    assert run("calibrate", "--dim", "3", "--radius", "8")[0] == 3
    assert run("ball", "--dim", "4", "--radius", "6")[0] == 3
    assert run("metric", "--exact-radius", "9", doc(3, [(1, 2, 1)]))[0] == 3
    monkeypatch.delenv("NILMETRIC_BUDGET")
    assert run("ball", "--dim", "3", "--radius", "8", "--budget", "50")[0] == 3


def test_help_exits_zero():
    assert run("--help")[0] == 0


def test_element_from_file(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(doc(3, [(1, 3, 9)]))
    assert run("metric", "@" + str(p))[1].startswith("E = 3")
    assert run("metric", "--element", "@" + str(p))[1].startswith("E = 3")


def test_module_entry_point_and_stdin():
    env = dict(os.environ, NILMETRIC_BUDGET="100")
    r = subprocess.run([sys.executable, "-m", "nilmetric", "shortword", "-"], input=doc(3, [(1, 3, 100)]),
                       capture_output=True, text=True, env=env)
    assert r.returncode == 0 and r.stdout.endswith("VERIFIED\n")
    r = subprocess.run([sys.executable, "-m", "nilmetric", "ball", "--dim", "3", "--radius", "9"],
                       capture_output=True, text=True, env=env)
    assert r.returncode == 3 and "budget" in r.stderr
    r = subprocess.run([sys.executable, "-m", "nilmetric", "nf", "garbage"], capture_output=True, text=True)
    assert r.returncode == 2
