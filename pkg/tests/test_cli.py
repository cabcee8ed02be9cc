import io
import json
import subprocess
import sys

import pytest
from conftest import A5, ARITH, BAA, SS_B, SS_B_EPS

from ocfg.cli import main


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_check(files):
    code, out, _ = run("check", "--grammar", files("arith.g", ARITH))
    assert code == 0 and "well-ordered = true" in out
    code, out, _ = run("check", "--grammar", files("eps.g", SS_B_EPS))
    assert code == 1
    assert "well-ordered = false" in out and "S -> S S (index 1 of 3)" in out
    code, _, _ = run("check", "--grammar", files("a5.g", A5))
    assert code == 0


def test_check_json(files):
    code, out, _ = run("check", "--grammar", files("eps.g", SS_B_EPS), "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["schema_version"] == 1
    assert doc["nullable"] == ["S"] and doc["well_ordered"] is False
    assert doc["cyclic_rules"] == ["S -> S S"]


def test_grammar_errors(files, tmp_path):
    code, _, err = run("check", "--grammar", files("bad.g", "%start S\nS -> 'ab' ;"))
    assert code == 2 and "line 2" in err
    code, _, err = run("check", "--grammar", str(tmp_path / "missing.g"))
    assert code == 2 and "cannot read" in err
    assert run("frobnicate")[0] == 2


def test_parse(files):
    code, out, _ = run("parse", "--grammar", files("ssb.g", SS_B), "--input", "bbb")
    assert code == 0
    assert "tree: S.1(S.1(S.2(b), S.2(b)), S.2(b))" in out
    assert "n(t) = 1 1 2 2 2" in out
    assert "S => S S => S S S => b S S => b b S => bbb" in out
    code, out, _ = run("parse", "--grammar", files("a5.g", A5), "--input", "aaaaa", "--mode", "full")
    assert code == 0 and "n(t) = 1 1 2" in out


def test_parse_outcomes(files):
    code, out, _ = run("parse", "--grammar", files("eps.g", SS_B_EPS), "--input", "b")
    assert code == 4 and "decreasing cycle: (S,0,1)" in out
    code, out, _ = run("parse", "--grammar", files("a5.g", A5), "--input", "aa")
    assert code == 3 and "no-parse" in out
    code, out, _ = run("parse", "--grammar", files("a5.g", A5), "--input", "aa", "--mode", "prefix")
    assert code == 0 and "matched prefix: a" in out
    code, _, err = run("parse", "--grammar", files("a5.g", A5), "--input", "ab")
    assert code == 2 and "not terminals" in err


def test_parse_input_sources(files):
    g = files("a5.g", A5)
    assert run("parse", "--grammar", g)[0] == 2
    assert run("parse", "--grammar", g, "--input", "a", "--input-file", files("w", "a"))[0] == 2
    code, out, _ = run("parse", "--grammar", g, "--input-file", files("w1", "aaa"))
    assert code == 0 and "n(t) = 1 2" in out


def test_parse_jobs_json(files):
    g = files("a5.g", A5)
    inputs = [files(f"w{n}", "a" * n) for n in range(1, 7)]
    argv = ["parse", "--grammar", g, "--format", "json", "--jobs", "3"]
    for path in inputs:
        argv += ["--input-file", path]
    code, out, _ = run(*argv)
    doc = json.loads(out)
    assert code == 3  # the even lengths have no parse
    assert [r["outcome"] for r in doc["results"]] == ["least-tree", "no-parse"] * 3
    serial = run(*[a if a != "3" else "1" for a in argv])[1]
    assert serial == out


def test_parse_annotate(files):
    code, out, _ = run("parse", "--grammar", files("a5.g", A5), "--input", "aaa", "--annotate")
    assert code == 0 and "=> a S a" in out and "^" in out


def test_forest(files):
    code, out, _ = run("forest", "--grammar", files("baa.g", BAA), "--input", "baa")
    assert code == 0 and out.startswith("digraph") and out.count('label="(Aa,1,3)"') == 1
    code, out, _ = run("forest", "--grammar", files("eps.g", SS_B_EPS), "--input", "b", "--format", "json")
    doc = json.loads(out)
    assert doc["has_cycle"] is True and doc["schema_version"] == 1
    code, out, _ = run("forest", "--grammar", files("a.g", "%start S\nS -> 'a' ;"), "--input", "aa")
    assert code == 0 and "no parse" in out


def test_peg(files):
    code, out, _ = run("peg", "--grammar", files("p.g", "%start S\nS -> 'a' S 'a' / 'a' ;"), "--input", "aaaaa")
    assert code == 3
    assert "matched: aaa (prefix; full match: no)" in out
    code, out, _ = run("peg", "--grammar", files("p.g", "%start S\nS -> 'a' S 'a' / 'a' ;"), "--input", "aaa")
    assert code == 0 and "full match: yes" in out
    code, _, err = run("peg", "--grammar", files("lr.g", "%start S\nS -> S 'a' / 'a' ;"), "--input", "aa")
    assert code == 6 and "left-recursive" in err


def test_compare(files):
    code, out, _ = run("compare", "--grammar", files("a5.g", A5), "--input", "aaaaa")
    assert code == 5 and "disagreement" in out
    code, out, _ = run("compare", "--grammar", files("a5.g", A5), "--input", "aaa", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["trees_equal"] and doc["agree"]
    assert run("compare", "--grammar", files("a5.g", A5), "--input", "aa")[0] == 0


def test_oracle(files):
    code, out, _ = run("oracle", "--grammar", files("ssb.g", SS_B), "--input", "bbb")
    assert code == 0 and out.startswith("2 trees")
    assert "1 1 2 2 2  S.1(S.1(S.2(b), S.2(b)), S.2(b))  <- least" in out
    code, out, _ = run("oracle", "--grammar", files("a.g", "%start S\nS -> 'a' ;"), "--input", "a")
    assert code == 0 and out.startswith("1 tree ")
    code, out, _ = run("oracle", "--grammar", files("eps.g", SS_B_EPS), "--input", "b", "--limit", "50")
    assert code in (4, 7) and "infinite family suspected" in out
    code, out, _ = run("oracle", "--grammar", files("eps.g", SS_B_EPS), "--input", "bb", "--limit", "50")
    assert code == 7


def test_parse_and_oracle_agree(files):
    g = files("arith.g", ARITH)
    for w in ("x+x", "x+x*x", "(x)^x"):
        parsed = json.loads(run("parse", "--grammar", g, "--input", w, "--format", "json")[1])
        oracle = json.loads(run("oracle", "--grammar", g, "--input", w, "--format", "json")[1])
        least = [t["tree"] for t in oracle["trees"] if t["least"]]
        assert least == [parsed["tree"]]


def test_output_is_deterministic(files):
    g = files("eps.g", SS_B_EPS)
    for argv in (["forest", "--format", "json"], ["forest"], ["parse"]):
        first = run(argv[0], "--grammar", g, "--input", "bb", *argv[1:])
        second = run(argv[0], "--grammar", g, "--input", "bb", *argv[1:])
        assert first == second


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "ocfg", "parse", "--grammar", files("a5.g", A5), "--input", "aaaaa"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "n(t) = 1 1 2" in proc.stdout
