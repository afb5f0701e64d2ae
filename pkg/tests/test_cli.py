import json

import pytest

from compop.cli import EXIT_INPUT, EXIT_IO, EXIT_OK, _build_parser, main
from compop.essnorm import report_from_json, reports_equal


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_monomial(capsys):
    code, out, _ = run(capsys, "analyze", "--map", "monomial(2)", "--kmax", "8")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["verdict"] == "NonCompactConsistent"
    assert abs(d["essnorm_sq_estimate"] - 1) < 1e-6


def test_analyze_compact(capsys):
    code, out, _ = run(capsys, "analyze", "--map", "scale(0.5, identity)", "--kmax", "8")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "CompactConsistent"


def test_identity_check_halfplane(capsys):
    code, out, _ = run(capsys, "identity-check", "--map", "halfplane", "--radius", "0.999")
    d = json.loads(out)
    assert code == EXIT_OK
    assert abs(d["counting_side"] - 2) < 2e-2 and abs(d["integral_side"] - 2) < 2e-2 and d["gap"] <= 2e-2


@pytest.mark.parametrize("argv", [
    ["analyze", "--map", "monomial(2)", "--radii", ","],
    ["analyze", "--map", "monomial(2)", "--kmax", "2"],
    ["analyze", "--map", "monomial(2)", "--kmax", "15"],
    ["analyze", "--map", "bogus(1)"],
    ["analyze", "--map", "poly(0, 2)"],
    ["analyze", "--map", "identity", "--abs-tol", "0"],
    ["analyze"],
    ["identity-check", "--map", "identity", "--radius", "1.5"],
])
def test_input_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_INPUT
    assert "expr" in err


def test_io_error(capsys, tmp_path):
    code, _, _ = run(capsys, "integral", "--map", "identity", "--kmax", "3", "--out", str(tmp_path / "no" / "x.json"))
    assert code == EXIT_IO


def test_byte_identical_and_round_trip(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["analyze", "--map", "halfplane", "--kmax", "5", "--carleson", "--out", str(p)]) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rep = report_from_json(paths[0].read_text())
    assert reports_equal(report_from_json(rep.to_json()), rep)


@pytest.mark.parametrize("cmd", ["validate", "counting", "integral", "carleson", "identity-check", "analyze", "catalog"])
def test_help_shows_grammar(capsys, cmd):
    with pytest.raises(SystemExit) as e:
        _build_parser().parse_args([cmd, "--help"])
    assert e.value.code == 0
    assert "map-spec grammar" in capsys.readouterr().out


def test_other_subcommands(capsys, tmp_path):
    assert main(["validate", "--map", "poly(0, 0.5, 0.5)"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["accepted"] is True
    assert main(["counting", "--map", "monomial(2)", "--radii", "0.5,0.9", "--format", "csv"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[0].startswith("radius,counting")
    mpath = tmp_path / "mu.csv"
    assert main(["carleson", "--map", "identity", "--kmax", "3", "--measure-out", str(mpath)]) == EXIT_OK
    assert mpath.read_text().startswith("re,im,weight")
    assert json.loads(capsys.readouterr().out)["atoms"] == 2**15
    assert main(["catalog"]) == EXIT_OK
    assert len(json.loads(capsys.readouterr().out)) == 13
