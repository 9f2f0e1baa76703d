import csv
import json

import pytest

from quadwalks import cli
from quadwalks.continuation import POLE_CSV_HEADER

SIMPLE_DESC = "1,0;-1,0;0,1;0,-1"
WORKED = "-1,0;-1,1;0,1;1,-1"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_periods_simple_walk(capsys):
    code, out, _ = run(capsys, "periods", "--model", SIMPLE_DESC, "--z", "0.2")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "quadwalks-report/1"
    assert f"{rep['ratio']:.9f}" == "2.000000000"
    assert rep["route_agreement"] < 1e-9


def test_output_is_deterministic_and_sorted(capsys):
    a = run(capsys, "periods", "--model", WORKED, "--z", "0.1")[1]
    b = run(capsys, "periods", "--model", WORKED, "--z", "0.1")[1]
    assert a == b
    assert a == json.dumps(json.loads(a), sort_keys=True, indent=2) + "\n"


def test_infinity_is_a_string(capsys):
    code, out, _ = run(capsys, "periods", "--model", WORKED, "--z", "0.1")
    assert code == 0
    assert json.loads(out)["branch_points"]["x"][3] == "inf"


@pytest.mark.parametrize(
    "argv",
    [
        ("count", "--model", SIMPLE_DESC, "--N", "-1"),
        ("periods", "--model", SIMPLE_DESC, "--z", "0.3"),
        ("periods", "--model", "2,0", "--z", "0.1"),
        ("group", "--model", "1,1;-1,-1", "--z", "0.1"),
        ("scan", "--model", WORKED, "--zmin", "1e-3", "--zmax", "1e-4"),
        ("classify", "--jobs", "0"),
    ],
)
def test_domain_and_validation_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and err.startswith("error: ")


def test_internal_failure_exits_1(capsys, monkeypatch):
    def boom(args, cfg):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.COMMANDS, "count", boom)
    code, _, err = run(capsys, "count", "--model", SIMPLE_DESC)
    assert code == 1 and "RuntimeError" in err


def test_classify_summary(capsys):
    code, out, _ = run(capsys, "classify", "--jobs", "1")
    assert code == 0
    s = json.loads(out)["summary"]
    assert (s["probed"], s["singular"], s["finite_group"], s["infinite_group"]) == (79, 5, 23, 51)
    assert s["by_order"] == {"4": 16, "6": 5, "8": 2, "Infinite": 51}


def test_classify_parallel_matches_serial(capsys):
    a = run(capsys, "classify", "--jobs", "1", "--model", SIMPLE_DESC, "--model", WORKED)[1]
    b = run(capsys, "classify", "--jobs", "2", "--model", SIMPLE_DESC, "--model", WORKED)[1]
    assert a == b


def test_count_csv_and_out(tmp_path, capsys):
    out_json, out_csv = tmp_path / "r.json", tmp_path / "c.csv"
    code, out, _ = run(capsys, "count", "--model", "1,1;-1,0;0,-1", "--N", "6", "--out", str(out_json),
                       "--csv", str(out_csv))
    assert code == 0 and out == ""
    rep = json.loads(out_json.read_text())
    # Kreweras excursions: 1, 0, 0, 2, 0, 0, 16
    assert rep["excursions"] == ["1", "0", "0", "2", "0", "0", "16"]
    rows = list(csv.reader(out_csv.open()))
    assert len(rows) > 1


def test_classify_csv_columns(tmp_path, capsys):
    p = tmp_path / "c.csv"
    assert run(capsys, "classify", "--jobs", "1", "--model", SIMPLE_DESC, "--csv", str(p))[0] == 0
    rows = list(csv.DictReader(p.open()))
    assert rows[0]["group_order"] == "4" and abs(float(rows[0]["ratio"]) - 2) < 1e-12


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "q.cfg"
    cfg.write_text("# loose settings\nDmax = 120\ntol = 1e-6\n")
    # with Dmax 120 the ratio at this weight might snap; either way the run succeeds
    code, out, _ = run(capsys, "group", "--model", WORKED, "--z", "0.1", "--config", str(cfg))
    assert code == 0
    r = json.loads(out)["rationality"]
    assert r["Dmax"] == 120 and r["tol"] == 1e-6


@pytest.mark.parametrize("text", ["bogus = 3\n", "Dmax = many\n", "tol = -1\n", "not a pair\n"])
def test_bad_config_exits_2(tmp_path, capsys, text):
    cfg = tmp_path / "q.cfg"
    cfg.write_text(text)
    code, _, err = run(capsys, "count", "--model", SIMPLE_DESC, "--config", str(cfg))
    assert code == 2 and "--config" in err


def test_missing_config_exits_2(tmp_path, capsys):
    code, _, _ = run(capsys, "count", "--model", SIMPLE_DESC, "--config", str(tmp_path / "none.cfg"))
    assert code == 2


def test_group_on_finite_model(capsys):
    code, out, _ = run(capsys, "group", "--model", "1,1;-1,0;0,-1", "--z", "0.2")
    rep = json.loads(out)
    assert code == 0
    assert rep["group_order"] == 6 and rep["rationality"]["value"] == "3/2"
    assert rep["verdict"] == "Algebraic"


def test_scan_worked_model(capsys, tmp_path):
    p = tmp_path / "s.csv"
    code, out, _ = run(capsys, "scan", "--model", WORKED, "--csv", str(p))
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["L"] - 4) < 0.08 and rep["L_snap"] == "4/1"
    assert len(p.read_text().strip().split("\n")) == 1 + rep["npts"]


def test_continue_refuses_rational_ratio(capsys):
    code, _, err = run(capsys, "continue", "--model", SIMPLE_DESC, "--z", "0.2")
    assert code == 2 and "RationalRatio" in err


def test_continue_worked_model(capsys, tmp_path):
    p = tmp_path / "poles.csv"
    code, out, _ = run(capsys, "continue", "--model", WORKED, "--z", "0.1", "--n-max", "40", "--grid", "20",
                       "--csv", str(p))
    assert code == 0
    rep = json.loads(out)
    assert rep["subcase"] == "II.D"
    assert rep["functional_equation_residual"] < 1e-6
    assert not rep["first_branch"]["off_cut_pole"]
    assert rep["second_branch_poles"] == {"10": 3, "20": 3}
    assert p.read_text().startswith(",".join(POLE_CSV_HEADER))
