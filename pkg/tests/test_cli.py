import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from pegrw.cli import main


@pytest.fixture
def gfile(tmp_path):
    def make(text, name="g.peg"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return make


def cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_success(capsys, gfile):
    g = gfile('%start A B\nA <- "a";\nB <- "b";')
    code, out, _ = cli(capsys, "parse", g, "abc")
    assert code == 0
    assert out.splitlines()[0] == 'outcome=success rest="c" consumed="ab"'
    assert cli(capsys, "parse", g, "abc", "--bigstep")[1] == 'outcome=success rest="c" consumed="ab"\n'


def test_parse_exit_codes(capsys, gfile):
    g = gfile('%start "a"')
    assert cli(capsys, "parse", g, "b")[0] == 1
    assert cli(capsys, "parse", g, "-e", "throw", "abc")[0] == 2
    assert cli(capsys, "parse", gfile("%start throw"), "abc")[0] == 2
    assert cli(capsys, "parse", g, "a", "--budget", "0")[0] == 3
    assert cli(capsys, "parse", g)[0] == 3
    assert cli(capsys, "parse", g, "a", "--trace", "--bigstep")[0] == 3
    assert cli(capsys, "parse", "/nonexistent.peg", "a")[0] == 3
    assert cli(capsys, "parse", g, "a" * 10, "-e", '"a"*', "--budget", "5")[0] == 5


def test_parse_grammar_problems(capsys, gfile):
    code, _, err = cli(capsys, "parse", gfile("%start A\nA <- A;"), "x")
    assert code == 4 and "left-recursion" in err
    code, _, err = cli(capsys, "parse", gfile('%start "a" ^'), "a")
    assert code == 4 and "ill-placed-cut" in err
    code, _, err = cli(capsys, "parse", gfile('%start A\nA <- ("a" ;'), "a")
    assert code == 4 and "2:" in err
    code, _, err = cli(capsys, "parse", gfile('%start "a" ^ "b" / "c"'), "ab", "--bigstep")
    assert code == 4


def test_parse_full_and_file(capsys, gfile, tmp_path):
    g = gfile('%start "a"')
    assert cli(capsys, "parse", g, "ab")[0] == 0
    assert cli(capsys, "parse", g, "ab", "--full")[0] == 1
    inp = tmp_path / "in.txt"
    inp.write_text("a")
    assert cli(capsys, "parse", g, "-f", str(inp), "--full")[0] == 0


def test_parse_trace_jsonl(capsys, gfile):
    g = gfile('%start A "b"\nA <- "a";')
    code, out, _ = cli(capsys, "parse", g, "ab", "--trace", "--jsonl")
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["rule"] for r in rows[:-1]] == ["Sequence", "NTerm", "Terminal12", "Seq1", "Terminal12"]
    assert rows[-1] == {"outcome": "success", "consumed": "ab", "rest": "", "entry_steps": 4,
                        "total_steps": 5, "max_depth": 1}


def test_bundled_grammar_refs(capsys):
    assert cli(capsys, "parse", "@anbncn", "aabbcc")[0] == 0
    assert cli(capsys, "parse", "@anbncn", "aabbc")[0] == 1
    assert cli(capsys, "parse", "@nope", "x")[0] == 3
    code, out, _ = cli(capsys, "fixtures")
    assert "@json_plain" in out.split()
    assert cli(capsys, "fixtures", "number")[1].startswith("#")


def test_gen(capsys, gfile):
    code, out, _ = cli(capsys, "gen", "@number", "--max-len", "3")
    assert code == 0
    lines = out.splitlines()
    i = lines.index("length 3: 7 solutions")
    assert len(lines[i + 1:]) == 7
    code, out, _ = cli(capsys, "gen", gfile('%start !"a" "a"'), "--max-len", "3")
    assert out.splitlines() == ["length 1: no solutions", "length 2: no solutions", "length 3: no solutions"]
    code, out, _ = cli(capsys, "gen", gfile('%start "b" "c"'), "--max-len", "3", "--min-len", "3",
                       "--alphabet", "abc")
    assert out.splitlines() == ["length 3: 1 solution", '  "b" . "c" :: tt', '    "bca" "bcb" "bcc"']


def test_gen_rejects_control_operators(capsys, gfile):
    code, _, err = cli(capsys, "gen", gfile('%start try("a")'), "--max-len", "2")
    assert code == 4 and "try" in err


def test_check(capsys, gfile):
    code, out, _ = cli(capsys, "check", gfile('%start T1\n%token T1 T2\nT1 <- "ab";\nT2 <- "a";'), "--utp", "2")
    assert code == 1 and "T1 and T2 both accept" in out
    code, out, _ = cli(capsys, "check", gfile('%start T1\n%token T1 T2\nT1 <- "a";\nT2 <- "b";'), "--utp", "3")
    assert code == 0 and "no violation up to length 3" in out
    code, out, _ = cli(capsys, "check", gfile("%start A\nA <- A;"))
    assert code == 1 and "left-recursion" in out


def test_mutate_and_diff(capsys, tmp_path):
    src = str(FIXTURES / "json" / "config.json")
    assert cli(capsys, "mutate", src, "--variants", "0")[0] == 3
    out_dir = tmp_path / "mut"
    code, out, _ = cli(capsys, "mutate", src, "--seed", "3", "--variants", "10", "--out-dir", str(out_dir))
    assert code == 0 and len(out.splitlines()) == 10
    code, out, _ = cli(capsys, "diff", "@json_plain", "@json_annotated", str(out_dir))
    assert code == 0
    assert "DISAGREE" not in out
    rejected = [l for l in out.splitlines() if l.startswith("rejected:")][0]
    assert float(rejected.split("reduction=")[1].rstrip("%")) > 0
    code, out, _ = cli(capsys, "mutate", src, "--seed", "3", "--variants", "2")
    assert all(isinstance(json.loads(l), str) for l in out.splitlines())
    assert cli(capsys, "mutate", src, "--symbols", "~")[0] == 3


def test_diff_disagreement_exit(capsys, gfile, tmp_path):
    (tmp_path / "c").mkdir()
    (tmp_path / "c" / "x").write_text("ac")
    plain = gfile('%start "a" "b" / "a" "c"', "p.peg")
    cut = gfile('%start "a" ^ "b" / "a" "c"', "c.peg")
    assert cli(capsys, "diff", plain, cut, str(tmp_path / "c"))[0] == 1


def test_bench_is_deterministic(capsys, tmp_path):
    corpus = str(FIXTURES / "json")
    first = cli(capsys, "bench", "@json_plain", corpus, "--jsonl", "-")[1]
    second = cli(capsys, "bench", "@json_plain", corpus, "--jsonl", "-")[1]
    assert first == second
    rows = [json.loads(l) for l in first.splitlines()]
    assert rows[-1]["aggregate"] is True and len(rows) == 6
    out_file = tmp_path / "r.jsonl"
    code, out, _ = cli(capsys, "bench", "@json_plain", corpus, "--jsonl", str(out_file))
    assert code == 0 and out.splitlines()[-1].startswith("total: files=5")
    assert out_file.read_text() == first


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "pegrw", "parse", "@anbncn", "abc"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("outcome=success")


def test_jsonl_everywhere(capsys, gfile):
    rows = lambda out: [json.loads(line) for line in out.splitlines()]  # noqa: E731
    code, out, _ = cli(capsys, "gen", "@number", "--max-len", "3", "--min-len", "3", "--jsonl")
    assert code == 0 and rows(out)[0] == {"length": 3, "solutions": 7, "capped": False}
    assert len(rows(out)) == 8
    code, out, _ = cli(capsys, "check", gfile('%start T1\n%token T1 T2\nT1 <- "ab";\nT2 <- "a";'),
                       "--utp", "2", "--jsonl")
    assert code == 1 and rows(out)[-1]["status"] == "violation"
    src = str(FIXTURES / "json" / "config.json")
    code, out, _ = cli(capsys, "mutate", src, "--variants", "3", "--jsonl")
    assert [r["variant"] for r in rows(out)] == [0, 1, 2]
    code, out, _ = cli(capsys, "diff", "@json_plain", "@json_annotated", src, "--jsonl")
    assert code == 0 and rows(out)[0]["agree"] and rows(out)[-1]["aggregate"]
