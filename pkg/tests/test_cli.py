import subprocess
import sys
from fractions import Fraction

import pytest
import yaml

from cvn_rigidity import formats
from cvn_rigidity.cli import RunConfig, main
from cvn_rigidity.formats import FormatError
from cvn_rigidity.freegroup import Word
from cvn_rigidity.outerspace import translation_length


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def body(text):
    lines = text.splitlines()
    assert lines[0].startswith("# generated: ")
    return "\n".join(lines[1:])


# -- file formats ----------------------------------------------------------------------

def test_automorphism_roundtrip(data_dir):
    phi = formats.load_automorphism(data_dir / "fib.auto")
    assert phi.is_certified()
    again = formats.parse_automorphism(yaml.safe_load(formats.dump_yaml(formats.automorphism_to_dict(phi))))
    assert again == phi


def test_automorphism_rejects_missing_generator():
    with pytest.raises(FormatError):
        formats.parse_automorphism({"rank": 2, "images": {"a": "a b"}})


def test_graph_requires_even_ids():
    with pytest.raises(FormatError):
        formats.parse_graph({"vertices": 1, "edges": [{"id": 1, "name": "x", "o": 0, "t": 0}]})


def test_toprep_filtration_by_name(data_dir):
    f, given = formats.load_toprep(data_dir / "identity.toprep")
    assert given
    assert [sorted(G) for G in f.filtration] == [[0], [0, 2]]


def test_marked_graph_file(data_dir):
    T = formats.load_marked_graph(data_dir / "hung3.marked")
    assert T.lengths[-1] == Fraction(1, 2)
    assert translation_length(T, Word.parse("c")) == 1
    back = formats.parse_marked_graph(formats.marked_graph_to_dict(T))
    assert back.same_marking(T) and back.lengths == T.lengths


def test_run_config_validation(data_dir):
    with pytest.raises(ValueError):
        RunConfig("analyze", data_dir / "fib.auto", horizon=0)
    with pytest.raises(ValueError):
        RunConfig("witness", data_dir / "fib.auto", graphs="spiral")


# -- analyze -------------------------------------------------------------------------------

def test_analyze_fibonacci(data_dir, capsys):
    code, out, _ = run(["analyze", data_dir / "fib.auto", "--g", "a", "--horizon", 12], capsys)
    assert code == 0
    rep = yaml.safe_load(out)
    assert rep["M_plus"] == 2
    assert rep["wstar"]["holds"]


def test_analyze_neg_letter_b(data_dir, capsys):
    code, out, _ = run(
        ["analyze", data_dir / "neg.auto", "--g", "b", "--letter", "b", "--horizon", 20], capsys
    )
    assert code == 0
    rep = yaml.safe_load(out)
    assert rep["M_plus"] == rep["M_minus"] == 1


def test_analyze_unstable_letter(data_dir, capsys):
    code, _, _ = run(["analyze", data_dir / "neg.auto", "--g", "b", "--letter", "a", "--horizon", 20], capsys)
    assert code == 2


def test_analyze_broken(data_dir, capsys):
    code, _, err = run(["analyze", data_dir / "broken.auto"], capsys)
    assert code == 1
    assert "error" in err


def test_analyze_missing_file(tmp_path, capsys):
    code, _, _ = run(["analyze", tmp_path / "nope.auto"], capsys)
    assert code == 1


def test_analyze_rank3_rewrites_basis(data_dir, capsys):
    code, out, _ = run(["analyze", data_dir / "reducible.auto", "--g", "b", "--horizon", 10], capsys)
    assert code == 0
    rep = yaml.safe_load(out)
    assert rep["letters"][0]["basis"] != "standard"
    assert "wstar" not in rep


def test_analyze_is_deterministic(data_dir, capsys):
    argv = ["analyze", data_dir / "fib.auto", "--g", "a", "--horizon", 12]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert body(first) == body(second)


# -- witness --------------------------------------------------------------------------------

def test_witness_neg_and_recheck(data_dir, tmp_path, capsys):
    code, out, _ = run(["witness", data_dir / "neg.auto", "--g", "b", "--horizon", 20, "--out", tmp_path], capsys)
    assert code == 0
    rep = yaml.safe_load(out)
    assert rep["delta"] == [0, 2, -1]
    assert rep["t"] == "1/4"
    assert len(rep["transcript"]) == 41
    path = tmp_path / "witness.yaml"
    assert path.exists()
    code, out, _ = run(["witness", "--recheck", path], capsys)
    assert code == 0
    assert yaml.safe_load(out)["valid"] is True


def test_recheck_catches_tampering(data_dir, tmp_path, capsys):
    run(["witness", data_dir / "neg.auto", "--g", "b", "--horizon", 6, "--out", tmp_path], capsys)
    path = tmp_path / "witness.yaml"
    data = yaml.safe_load(path.read_text())
    data["T2"]["lengths"]["y"] = "2"
    data["t"] = "1/2"
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump(data, sort_keys=False))
    code, out, _ = run(["witness", "--recheck", bad], capsys)
    assert code == 4
    assert yaml.safe_load(out)["failures"]


def test_witness_fibonacci_forward(data_dir, capsys):
    code, out, _ = run(["witness", data_dir / "fib.auto", "--g", "a", "--forward-only", "--horizon", 12], capsys)
    assert code == 0
    assert yaml.safe_load(out)["graph"].startswith("barbell")


def test_witness_none(data_dir, capsys):
    code, out, _ = run(["witness", data_dir / "fib.auto", "--g", "a", "--graphs", "rose-only"], capsys)
    assert code == 3
    assert yaml.safe_load(out)["found"] is False


def test_witness_is_deterministic(data_dir, capsys):
    argv = ["witness", data_dir / "neg.auto", "--g", "b", "--horizon", 10]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert body(first) == body(second)


# -- ttcheck -------------------------------------------------------------------------------------

@pytest.mark.parametrize("name,code", [
    ("fib.toprep", 0),
    ("xy-xbar.toprep", 4),
    ("identity.toprep", 0),
    ("neg.toprep", 0),
])
def test_ttcheck_exit_codes(data_dir, capsys, name, code):
    got, out, _ = run(["ttcheck", data_dir / name], capsys)
    assert got == code
    if code == 4:
        rep = yaml.safe_load(out)
        assert rep["illegal_turns"]
        assert rep["cancellation"].startswith("f^4(x)")


def test_ttcheck_malformed(tmp_path, capsys):
    p = tmp_path / "bad.toprep"
    p.write_text("graph: {vertices: 1, edges: [{id: 0, name: x, o: 0, t: 0}]}\nimages: {x: x x-}\n")
    code, _, _ = run(["ttcheck", p], capsys)
    assert code == 1


def test_module_entry_point(data_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "cvn_rigidity", "ttcheck", str(data_dir / "fib.toprep")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "train_track: true" in proc.stdout
