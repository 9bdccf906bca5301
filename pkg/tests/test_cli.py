import csv
import io
import json
import xml.etree.ElementTree as ET

import pytest

from horostar import Horofunction, enumerate_classes, export_report, render_boundary_svg, run_suite
from horostar.cli import main, parse_horofunction
from horostar.suites import ANCHORS, SUITES, SuiteSpec, UnknownSuite, report_json

SVG_NS = "{http://www.w3.org/2000/svg}"


# suites ----------------------------------------------------------------------


def test_every_suite_has_an_anchor():
    assert set(SUITES) == set(ANCHORS)
    assert len(SUITES) == 9


def test_unknown_suite_is_an_error():
    with pytest.raises(UnknownSuite):
        SuiteSpec("thm-z")


def test_thm_e_suite_report():
    rep = run_suite(SuiteSpec("thm-e", seed=3))
    assert rep["passed"] and rep["anchor"] == "Theorem E" and rep["seed"] == 3
    table = next(c for c in rep["cases"] if "table" in c)["table"]
    assert len(table) == 8 and all(len(r) == 8 for r in table)


def test_curve_case_suite_margins_are_zero():
    rep = run_suite(SuiteSpec("prop-curve-case", params={"horizon": 30}))
    assert rep["passed"]
    assert rep["cases"][0]["max_equality_error"] == 0.0


@pytest.mark.parametrize("suite", ["thm-e", "semicontinuity", "sticky-halfplane"])
def test_reports_are_byte_identical(suite):
    a = report_json(run_suite(SuiteSpec(suite, seed=17)))
    b = report_json(run_suite(SuiteSpec(suite, seed=17)))
    assert a == b


# reports ---------------------------------------------------------------------


def test_export_json_and_csv(tmp_path):
    e = run_suite(SuiteSpec("thm-e"))
    c = run_suite(SuiteSpec("prop-curve-case"))
    out = tmp_path / "r.json"
    export_report([e], "json", out)
    data = json.loads(out.read_text())
    assert data["reports"][0]["anchor"] == "Theorem E"
    text = export_report([e, c], "csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert {r["suite"] for r in rows} == {"thm-e", "prop-curve-case"}
    assert len(rows) == len(e["cases"]) + len(c["cases"])


def test_export_errors(tmp_path):
    with pytest.raises(ValueError):
        export_report([], "json")
    with pytest.raises(ValueError):
        export_report([run_suite(SuiteSpec("prop-curve-case"))], "xml")
    with pytest.raises(OSError):
        export_report([run_suite(SuiteSpec("prop-curve-case"))], "json", tmp_path / "missing" / "r.json")


# svg -------------------------------------------------------------------------


def _texts(svg):
    root = ET.fromstring(svg)
    return [t.text for t in root.iter(SVG_NS + "text")]


def test_circle_with_star_of_east():
    svg = render_boundary_svg(2, Horofunction.compass("E"))
    texts = _texts(svg)
    assert any("5 classes" in t for t in texts)
    assert "max(-x - m, -y)" in texts
    assert svg.count('fill="#f4a259"') == 5


def test_plain_circle_has_eight_labelled_sectors():
    texts = _texts(render_boundary_svg(2))
    for label in ("NE", "NW", "SW", "SE"):
        assert label in texts
    for label in ("E", "N", "W", "S"):
        assert any(t.startswith(label + ":") for t in texts)


def test_octahedron_has_26_labels(tmp_path):
    out = tmp_path / "oct.svg"
    svg = render_boundary_svg(3, out=out)
    texts = " | ".join(_texts(out.read_text()))
    for c in enumerate_classes(3):
        assert c.label in texts
    assert svg == out.read_text()


def test_svg_errors(tmp_path):
    with pytest.raises(ValueError):
        render_boundary_svg(4)
    with pytest.raises(OSError):
        render_boundary_svg(2, out=tmp_path / "no" / "x.svg")


# command line ----------------------------------------------------------------


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_horofunction_forms():
    assert parse_horofunction("NE:5/2", 2) == Horofunction.compass("NE", "5/2")
    assert parse_horofunction("+e1:0,-e3:2", 3) == Horofunction(3, (1, 3), (-1, 1), (0, 2))
    h = Horofunction.compass("EN", 3)
    assert parse_horofunction(h.to_json(), 2) == h


def test_cli_limit(capsys):
    code, out, _ = run_cli(capsys, "limit", "--direction", "1,1", "--offset", "0,-3")
    assert code == 0
    assert json.loads(out)["expression"] == "max(-x, -y-3)"


def test_cli_limit_numeric(capsys, tmp_path):
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps([[k - 2 + 1 / k, k] for k in range(1, 2001)]))
    code, out, _ = run_cli(capsys, "limit", "--points", str(pts), "--tol", "0.01")
    assert code == 0 and json.loads(out)["outcome"] == "converges"


def test_cli_star_and_member(capsys):
    code, out, _ = run_cli(capsys, "star", "E")
    assert code == 0 and json.loads(out)["star"] == ["E", "N", "NE", "S", "SE"]
    code, out, _ = run_cli(capsys, "star", "E", "--member", "NW:2", "--horizon", "10000")
    assert code == 0 and json.loads(out)["member"]["in_star"] is False


def test_cli_star_dist(capsys):
    code, out, _ = run_cli(capsys, "star-dist", "NE", "SW")
    assert code == 0 and json.loads(out)["distance"] == 3
    code, out, _ = run_cli(capsys, "star-dist", "--dim", "3", "--", "+e1", "-e1")
    assert json.loads(out)["distance"] == 2


def test_cli_halfspace(capsys):
    code, out, _ = run_cli(capsys, "halfspace", "--witness", "4,0", "--point", "5,1", "--point=-1,0")
    assert code == 0
    assert [r["inside"] for r in json.loads(out)["results"]] == [True, False]


def test_cli_verify_pass_and_exit_codes(capsys, tmp_path):
    out = tmp_path / "e.json"
    code, _, err = run_cli(capsys, "verify", "thm-e", "--seed", "1", "--out", str(out))
    assert code == 0 and "PASS" in err
    assert json.loads(out.read_text())["reports"][0]["seed"] == 1
    code, _, err = run_cli(capsys, "verify", "thm-zz")
    assert code == 2 and "unknown suite" in err
    code, _, _ = run_cli(capsys, "frobnicate")
    assert code == 2


def test_cli_verify_failure_exit_code(capsys):
    # a tolerance far below float resolution makes the numeric case fail
    code, _, _ = run_cli(capsys, "verify", "thm-d", "--tol", "1e-12", "--horizon", "200")
    assert code == 1


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[verify]\nseed = 5\nhorizon = 25\n')
    code, out, _ = run_cli(capsys, "verify", "prop-curve-case", "--config", str(cfg))
    rep = json.loads(out)["reports"][0]
    assert rep["seed"] == 5 and rep["params"]["horizon"] == 25
    code, out, _ = run_cli(capsys, "verify", "prop-curve-case", "--config", str(cfg), "--seed", "9")
    rep = json.loads(out)["reports"][0]
    assert rep["seed"] == 9 and rep["params"]["horizon"] == 25
    code, out, _ = run_cli(capsys, "verify", "prop-curve-case")
    rep = json.loads(out)["reports"][0]
    assert rep["seed"] == 0 and rep["params"]["horizon"] == 30


def test_cli_bad_config(capsys, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("seed = [")
    code, _, err = run_cli(capsys, "verify", "thm-e", "--config", str(bad))
    assert code == 2 and "TOML" in err
    code, _, _ = run_cli(capsys, "verify", "thm-e", "--config", str(tmp_path / "absent.toml"))
    assert code == 2


def test_cli_plot(capsys, tmp_path):
    out = tmp_path / "e.svg"
    code, _, _ = run_cli(capsys, "plot", "--target", "E", "--out", str(out))
    assert code == 0 and out.read_text().startswith("<svg")
    code, _, _ = run_cli(capsys, "plot", "--dim", "4")
    assert code == 2


def test_cli_probe_sticky_sweep(capsys):
    code, out, _ = run_cli(capsys, "probe-sticky", "--space", "sup", "--radii", "1,10", "--pairs", "5")
    data = json.loads(out)
    assert code == 0 and [s["radius"] for s in data["sweep"]] == [1.0, 10.0]
    assert all(s["sg1"]["verdict"] == "refuted at scale" for s in data["sweep"])


def test_cli_prod_verify(capsys, tmp_path):
    cfg = tmp_path / "m.toml"
    cfg.write_text('[multicurve]\ngamma = ["a", "b", "c"]\nA = ["a"]\nB = ["b", "c"]\nlog_k = 2\n')
    code, out, _ = run_cli(capsys, "prod-verify", "--config", str(cfg))
    data = json.loads(out)
    assert code == 0 and data["passed"] and data["certificate"]["C"] == "2c"
    assert data["assumptions"]
    code, _, err = run_cli(capsys, "prod-verify", "--config", str(cfg), "--B", "a")
    assert code == 2 and "disjoint" in err
    code, _, _ = run_cli(capsys, "prod-verify")
    assert code == 2
