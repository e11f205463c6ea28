import json

import pytest

from cclab import io as cio
from cclab.cli import build_config, build_parser, main
from cclab.fcodes import PartialF, make_code, verify_fcode
from cclab.reductions import partition_tandem


def test_code_file_round_trip(tmp_path):
    code = make_code("repetition", 3)
    path = tmp_path / "rep.txt"
    cio.write_code(code, path)
    back = cio.read_code(path)
    assert [(x, w) for x, w in back.items()] == code.items()
    assert verify_fcode(back, PartialF({d: 2 * d for d in range(4)})) == []


@pytest.mark.parametrize("text,line,fragment", [
    ("", 1, "empty"),
    ("2 2\n", 1, "header"),
    ("2 2 2\n00 00\n", 1, "promises 2"),
    ("2 2 1\n0x 00\n", 2, "not 2 bits"),
    ("2 2 1\n00 001\n", 2, "not 2 bits"),
    ("2 2 2\n00 00\n00 11\n", 3, "duplicate"),
    ("2 2 1\n00\n", 2, "expected"),
])
def test_code_parse_errors_name_the_line(text, line, fragment):
    with pytest.raises(cio.ParseError) as exc:
        cio.parse_code(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_partial_f_file():
    assert cio.parse_partial_f("# f\n2:4\n4:6\n") == PartialF({2: 4, 4: 6})
    with pytest.raises(cio.ParseError):
        cio.parse_partial_f("")
    with pytest.raises(cio.ParseError):
        cio.parse_partial_f("2=4")


def test_tandem_round_trip():
    t = partition_tandem(5, 2, seed=4)
    assert cio.parse_tandem(cio.format_tandem(t)) == t
    with pytest.raises(cio.ParseError):
        cio.parse_tandem("q 1\nquery 0:1 2:1\nrho 0 1\n")
    with pytest.raises(cio.ParseError):
        cio.parse_tandem("q 1\nbogus 1\n")
    with pytest.raises(cio.ParseError):
        cio.parse_tandem("q 2\nquery 0:1\nrho 0 1 2 3\n")


def test_matrix_and_composition_config(tmp_path):
    (tmp_path / "xor.txt").write_text("2\n0 1\n1 0\n")
    (tmp_path / "spec.json").write_text(json.dumps(
        {"matrices": ["xor.txt"], "r": 1, "delta": "1/8", "g": {"name": "exists-one"}, "n": 4}))
    spec = cio.load_composition_spec(tmp_path / "spec.json")
    assert spec.n == 4 and spec.truth((0, 0, 0, 0), (0, 1, 0, 0)) == 1
    with pytest.raises(cio.ParseError):
        cio.parse_matrix("2\n0 1\n")
    with pytest.raises(cio.ParseError):
        cio.parse_matrix("2\n0 1\n1 x\n")
    (tmp_path / "bad.json").write_text(json.dumps({"r": 1}))
    with pytest.raises(cio.ParseError, match="matrices"):
        cio.load_composition_spec(tmp_path / "bad.json")


def test_report_round_trip():
    text = cio.format_report({"n": 4}, {"errors": 0, "rate": 0.5}, ("a", "b"), [(1, "x"), (2, "y")])
    config, summary, header, rows = cio.parse_report(text)
    assert config == {"n": "4"} and summary == {"errors": "0", "rate": "0.5"}
    assert header == ["a", "b"] and rows == [["1", "x"], ["2", "y"]]


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(cio.ParseError):
        cio.load_config(bad)
    bad.write_text("[1, 2]")
    with pytest.raises(cio.ParseError):
        cio.load_config(bad)


def _args(*argv):
    return build_parser().parse_args(["run", *argv])


def test_build_config_validates_fields(tmp_path):
    cfg = build_config(_args("--protocol", "hd_k", "--trials", "5"))
    assert cfg["n"] == 64 and cfg["delta"] == "1/8" and not cfg["exhaustive"]
    assert build_config(_args("--protocol", "hd22"))["exhaustive"]
    with pytest.raises(ValueError, match="delta"):
        build_config(_args("--protocol", "hd_k", "--delta", "3/2"))
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"protocol": "hd_k", "colour": 1}))
    with pytest.raises(ValueError, match="colour"):
        build_config(_args("--config", str(cfgfile)))
    cfgfile.write_text(json.dumps({"protocol": "hd_k", "n": -3}))
    with pytest.raises(ValueError, match="'n'"):
        build_config(_args("--config", str(cfgfile)))


def test_cli_randomized_run_writes_report(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["run", "--protocol", "equality", "--n", "16", "--b", "4", "--trials", "50", "--out", str(out)])
    assert code == 0
    config, summary, header, rows = cio.parse_report(out.read_text())
    assert config["protocol"] == "equality" and len(rows) == 50
    assert header[:3] == ["trial", "case", "truth"]
    assert "errors:" in capsys.readouterr().out


def test_cli_exhaustive_hd22(tmp_path, capsys):
    out = tmp_path / "hd22.csv"
    assert main(["run", "--protocol", "hd22", "--n", "3", "--out", str(out)]) == 0
    _, summary, header, rows = cio.parse_report(out.read_text())
    assert summary["errors"] == "0" and summary["queries_max"] == "3"
    assert header == ["case", "truth", "output", "error", "count", "queries"]


def test_cli_pad_and_gap_embedding(capsys):
    assert main(["run", "--protocol", "pad", "--n", "4", "--k", "2"]) == 0
    assert main(["run", "--protocol", "gap-embedding", "--n", "2", "--c", "2"]) == 0
    assert "embedding_L: " in capsys.readouterr().out


def test_cli_usage_errors(capsys):
    assert main(["run", "--protocol", "nope"]) == 2
    assert main(["run", "--protocol", "hd_k", "--delta", "abc"]) == 2
    assert main(["verify", "/does/not/exist", "--f", "1:1"]) == 2
    assert main([]) == 2


def test_cli_search_and_verify(tmp_path, capsys):
    outdir = tmp_path / "found"
    assert main(["search-codes", "--n", "3", "--m", "6", "--f", "0:0,1:2,2:4,3:6", "--out", str(outdir)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("exhausted, ")
    files = sorted(outdir.glob("code_*.txt"))
    assert files and (outdir / "search.log").exists()
    assert main(["verify", str(files[0]), "--f", "1:2,2:4,3:6"]) == 0
    assert main(["verify", str(files[0]), "--f", "1:1"]) == 1
    assert "fail:" in capsys.readouterr().out
    ffile = tmp_path / "f.txt"
    ffile.write_text("1:2\n")
    assert main(["verify", str(files[0]), str(ffile)]) == 0


def test_cli_search_none(capsys):
    assert main(["search-codes", "--n", "2", "--m", "3", "--f", "1:1,2:3"]) == 0
    assert capsys.readouterr().out.startswith("exhausted, none")
