import json
from fractions import Fraction as F

import pytest

from carpetquant.cli import main
from carpetquant.distortion import distortion_bounds
from carpetquant.documents import CodebookDocument, fraction_str, parse_fraction
from carpetquant.errors import InputError
from carpetquant.geometry import Codebook
from carpetquant.optimal import optimal_set
from carpetquant.render import render_svg


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_optimal_three(capsys):
    code, out, _ = run(capsys, "optimal", "--n", "3", "--limit", "10")
    body = json.loads(out)
    assert code == 0 and len(body["documents"]) == 4 and body["family_count"] == 4


def test_optimal_four_csv(capsys):
    code, out, _ = run(capsys, "optimal", "--n", "4", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "set_index,n,point_index,x,y"
    assert lines[1] == "0,4,0,1/6,1/6"
    assert len(lines) == 5


def test_optimal_five_family(capsys):
    code, out, _ = run(capsys, "optimal", "--n", "5", "--t", "1")
    body = json.loads(out)
    assert body["family_count"] == 8 and len(body["documents"]) == 2
    code, out, _ = run(capsys, "optimal", "--n", "5", "--t", "1", "--variants", "1:1")
    docs = json.loads(out)["documents"]
    assert len(docs) == 1
    assert docs[0]["decomposition"] == {"level": 1, "m": 1, "k": 1, "t": ["1"]}


@pytest.mark.parametrize("argv", [["--t", "12"], ["--t", "1,2"], ["--t", "5"], ["--variants", "1:9", "--t", "1"]])
def test_optimal_bad_t(capsys, caplog, argv):
    code, out, _ = run(capsys, "optimal", "--n", "5", *argv)
    assert code == 2 and out == ""
    assert caplog.records[-1].levelname == "ERROR"


def test_error(capsys):
    code, out, _ = run(capsys, "error", "--n", "2", "3", "5")
    assert out.splitlines() == ["n,v_n,decimal", "2,5/36,0.138889", "3,1/12,0.0833333", "5,2/81,0.0246914"]


def test_dimension(capsys):
    code, out, _ = run(capsys, "dimension", "--levels", "1,1000")
    rows = [r.split(",") for r in out.splitlines()[1:]]
    assert abs(float(rows[0][1]) - 0.7737056) < 1e-7
    assert float(rows[1][3]) < 1e-3


def test_coefficient(capsys):
    code, out, _ = run(capsys, "coefficient", "--levels", "10", "--format", "json")
    body = json.loads(out)
    assert abs(body["inf_observed"] - 0.25) < 1e-4 and body["gap"] > 0.2
    assert body["dimension_estimates"][0]["ell"] == 10
    code, out, _ = run(capsys, "coefficient", "--levels", "2", "--grid", "8")
    assert out.splitlines()[0] == "ell,n,x,v_n_num,v_n_den,scaled,g_or_h,f_paper"


def test_lloyd(capsys):
    code, out, _ = run(capsys, "lloyd", "--n", "2", "--depth", "5", "--restarts", "16", "--seed", "42")
    body = json.loads(out)
    assert code == 0
    assert body["corrected_distortion"] == "5/36"
    assert body["best"]["document"]["provenance"] == "lloyd"


def test_round_trip(tmp_path, capsys):
    code, out, _ = run(capsys, "optimal", "--n", "7", "--limit", "1")
    path = tmp_path / "n7.json"
    path.write_text(out)
    doc = CodebookDocument.from_json(out)
    assert doc.provenance == "file"
    assert doc.codebook == optimal_set(7, doc.t, doc.variants)
    code, out, _ = run(capsys, "distortion", "--codebook", str(path), "--depth-cap", "4")
    body = json.loads(out)
    iv = distortion_bounds(doc.codebook, 4)
    assert (body["lo"], body["hi"]) == (fraction_str(iv.lo), fraction_str(iv.hi))
    assert body["exact"]


def test_document_round_trip():
    cb = Codebook([(F(1, 3), F(2, 7)), (0, 1)])
    doc = CodebookDocument(cb, provenance="lloyd")
    back = CodebookDocument.from_json(doc.to_json())
    assert back.codebook == cb and back.provenance == "file"
    assert doc.to_dict()["points"] == [["1/3", "2/7"], ["0/1", "1/1"]]


@pytest.mark.parametrize("text", ['{"points": [["1/0", "0"]]}', '{"points": [["a", "0"]]}', "not json", '{"n": 3, "points": [["0", "0"]]}', '{"points": [[0.5, 0]]}'])
def test_document_rejects_bad_input(text):
    with pytest.raises(InputError):
        CodebookDocument.from_json(text)


def test_parse_fraction():
    assert parse_fraction("5/6") == F(5, 6) and parse_fraction(3) == 3
    with pytest.raises(InputError):
        parse_fraction(True)


def test_render(tmp_path, capsys):
    out = tmp_path / "n16.svg"
    code, _, _ = run(capsys, "render", "--n", "16", "--carpet-depth", "3", "--out", str(out))
    svg = out.read_text()
    assert code == 0 and svg.count("<circle") == 16 and svg.count("<rect") == 1 + 64
    assert 'viewBox="0 0 900 900"' in svg
    # level-2 centroid (1/18, 1/18) sits near the bottom-left corner
    assert '<circle cx="50" cy="850"' in svg
    run(capsys, "render", "--n", "16", "--carpet-depth", "3", "--out", str(tmp_path / "again.svg"))
    assert (tmp_path / "again.svg").read_text() == svg


def test_render_stdout_and_errors(tmp_path, capsys):
    code, out, _ = run(capsys, "render", "--n", "1", "--carpet-depth", "2")
    assert code == 0 and out.count("<circle") == 1 and 'cx="450" cy="450"' in out
    code, out, _ = run(capsys, "render", "--n", "3")
    assert out.count("<circle") == 3
    code, _, _ = run(capsys, "render", "--n", "3", "--out", str(tmp_path / "missing" / "x.svg"))
    assert code == 3
    code, _, _ = run(capsys, "render", "--n", "3", "--carpet-depth", "8")
    assert code == 2
    code, _, _ = run(capsys, "render", "--codebook", str(tmp_path / "nope.json"))
    assert code == 3


def test_render_codebook_file(tmp_path, capsys):
    path = tmp_path / "cb.json"
    path.write_text(CodebookDocument(Codebook([(F(1, 2), F(1, 6))])).to_json())
    code, out, _ = run(capsys, "render", "--codebook", str(path), "--carpet-depth", "1")
    assert code == 0 and 'cy="750"' in out


def test_render_svg_escapes_title():
    svg = render_svg(Codebook([(0, 0)]), 0, title="a<b")
    assert "<title>a&lt;b</title>" in svg


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["optimal"])
    assert info.value.code == 2
