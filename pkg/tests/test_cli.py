import json
import subprocess
import sys

import pytest

from grsc.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_UNKNOWN, main
from grsc.corpus import gen_figure1
from grsc.graph_core import load_graph


@pytest.fixture
def fig1_file(tmp_path):
    path = tmp_path / "figure1.g"
    assert main(["gen", "figure1", "-o", str(path)]) == EXIT_OK
    return path


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_gen_round_trip(fig1_file):
    g = load_graph(fig1_file)
    ref = gen_figure1()
    assert g.num_vertices == ref.num_vertices
    assert sorted((e.source, e.target, e.letter) for e in g.edges) == \
        sorted((e.source, e.target, e.letter) for e in ref.edges)


def test_check_exit_codes(capsys, fig1_file):
    code, out = run(capsys, ["check", str(fig1_file), "--cond", "C7"])
    assert code == EXIT_OK and out["exit"] == 0
    assert set(out) == {"schema", "version", "config", "report", "exit"}
    assert out["report"]["holds"] is True
    code, out = run(capsys, ["check", str(fig1_file), "--cond", "C8"])
    assert code == EXIT_FAIL and out["report"]["holds"] is False


def test_word_and_diagram(capsys, tmp_path, fig1_file):
    code, out = run(capsys, ["word", str(fig1_file), "--cond", "Gr7", "--word", "a"])
    assert code == EXIT_FAIL and out["report"]["verdict"] == "Nontrivial"
    dia = tmp_path / "d.json"
    code, out = run(capsys, ["word", str(fig1_file), "--cond", "Gr7", "--word", "a a -c -b -b -a -b",
                             "--emit-diagram", str(dia)])
    assert code == EXIT_OK and out["report"]["verdict"] == "Trivial"
    code, out = run(capsys, ["diagram", "verify", str(dia), "--graph", str(fig1_file)])
    assert code == EXIT_OK and out["report"]["valid"] is True
    assert out["report"]["area"] == 1


def test_inconclusive_exit_code(capsys, tmp_path):
    hexagon = tmp_path / "hexagon.g"
    assert main(["gen", "classical", "--alphabet", "a,b,c", "--relators", "a b c -a -b -c", "-o", str(hexagon)]) == 0
    code, out = run(capsys, ["classify", str(hexagon)])
    assert code == EXIT_UNKNOWN and out["report"]["verdict"] == "Inconclusive"


def test_present_classify_pieces(capsys, fig1_file):
    code, out = run(capsys, ["present", str(fig1_file), "--mode", "pi1"])
    assert code == EXIT_OK and len(out["report"]["relators"]) == 2
    code, out = run(capsys, ["classify", str(fig1_file)])
    assert code == EXIT_OK and out["report"]["verdict"] == "ContainsFreeSubgroup"
    code, out = run(capsys, ["pieces", str(fig1_file)])
    assert code == EXIT_OK and out["report"]["pieces"]


def test_embed(capsys, fig1_file):
    code, out = run(capsys, ["embed", str(fig1_file), "--radius", "13", "--relators", "pi1"])
    assert code == EXIT_OK
    assert out["report"]["isometric"] is True


def test_lacunary_and_out_file(capsys, tmp_path):
    union = tmp_path / "f5.g"
    assert main(["gen", "figure5", "--n-max", "2", "-o", str(union)]) == EXIT_OK
    target = tmp_path / "report.json"
    code, out = run(capsys, ["lacunary", str(union), "--out", str(target)])
    assert code in (EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN)
    assert json.loads(target.read_text()) == out


def test_input_errors(capsys, tmp_path, fig1_file):
    code, out = run(capsys, ["check", str(tmp_path / "missing.g"), "--cond", "C7"])
    assert code == EXIT_INPUT and out["error"]["cause"] == "io"
    code, out = run(capsys, ["check", str(fig1_file), "--cond", "X9"])
    assert code == EXIT_INPUT
    bad = tmp_path / "bad.g"
    bad.write_text("this is not a graph\n")
    code, _ = run(capsys, ["check", str(bad), "--cond", "C7"])
    assert code == EXIT_INPUT
    assert main(["nonsense"]) == EXIT_INPUT
    assert main(["gen", "classical"]) == EXIT_INPUT


def test_gen_classical_to_stdout(capsys):
    assert main(["gen", "classical", "--alphabet", "a,b", "--relators", "a b -a -b; a a a"]) == EXIT_OK
    assert "a" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "grsc.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
