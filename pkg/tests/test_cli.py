import csv
import io
import json

import pytest

from csgerbe import checks as K
from csgerbe import cli

FAST = ["--points", "1", "--tangent-sets", "1"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_text_exit_zero(capsys):
    code, out, _ = run(capsys, "check", "--checks", "delta_epsilon_eq_nu,simplicial_identities", *FAST)
    assert code == 0
    assert out.strip().endswith("2/2 checks passed")


def test_failing_check_exits_one(capsys):
    code, out, _ = run(capsys, "check", "--checks", "delta_B", "--tol", "delta_B=1e-30", *FAST)
    assert code == 1 and "FAIL" in out


@pytest.mark.parametrize("argv", [
    ["check", "--checks", "nonexistent"],
    ["check", "--group", "g2"],
    ["check", "--tol", "delta_B"],
    ["check", "--tol", "nope=1e-3"],
    ["check", "--N", "15"],
    ["check", "--h", "1.0"],
    ["convergence", "--Ns", "64,x"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_json_schema(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "check", "--checks", "delta_h_alpha_zero,delta_nu_zero", "--json", str(out), *FAST)
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"version", "config", "reports"}
    assert doc["version"] == cli.SCHEMA_VERSION
    assert [r["name"] for r in doc["reports"]] == ["delta_h_alpha_zero", "delta_nu_zero"]
    fields = {"name", "group", "N", "h", "samples", "max_abs_err", "max_rel_err", "observed_order",
              "tolerance", "passed", "seed"}
    assert all(fields <= set(r) for r in doc["reports"])


def test_json_is_reproducible(capsys):
    argv = ["check", "--checks", "delta_B", "--format", "json", "--seed", "3", *FAST]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    strip = lambda d: [{k: v for k, v in r.items() if k != "elapsed"} for r in json.loads(d)["reports"]]
    assert strip(a) == strip(b)


def test_csv_columns(capsys):
    code, out, _ = run(capsys, "check", "--checks", "delta_epsilon_eq_nu", "--format", "csv", *FAST)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == cli.CSV_COLUMNS
    assert rows[0]["check"] == "delta_epsilon_eq_nu" and rows[0]["pass"] in ("true", "True", "1")


def test_config_precedence(tmp_path, monkeypatch):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"seed": 7, "N": 64, "group": "su3"}))
    monkeypatch.setenv(cli.SEED_ENV, "5")
    args = cli.build_parser().parse_args(["check", "--config", str(conf), "--N", "256"])
    cfg = cli.resolve_config(args)
    assert cfg["N"] == 256 and cfg["seed"] == 7 and cfg["group"] == "su3"
    args = cli.build_parser().parse_args(["check"])
    assert cli.resolve_config(args)["seed"] == 5
    args = cli.build_parser().parse_args(["check", "--seed", "9"])
    assert cli.resolve_config(args)["seed"] == 9


def test_config_file_errors(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "check", "--config", str(conf))[0] == 2
    assert run(capsys, "check", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_bad_env_seed(monkeypatch, capsys):
    monkeypatch.setenv(cli.SEED_ENV, "abc")
    assert run(capsys, "check", "--checks", "delta_nu_zero")[0] == 2


def test_catalog_json(capsys):
    code, out, _ = run(capsys, "catalog", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 16
    assert all(set(r) == {"name", "space", "degree", "location", "status"} for r in rows)
    _, out, _ = run(capsys, "catalog", "--format", "json", "--extras")
    assert "ω" in [r["name"] for r in json.loads(out)]


def test_demo(capsys):
    code, out, _ = run(capsys, "demo", "--format", "json", "--seed", "1")
    vals = json.loads(out)
    assert code == 0 and vals == cli.demo_values(1)
    assert vals["p1_difference"] <= 1e-12 * max(abs(vals["half_p1"]), 1e-300)
    _, out, _ = run(capsys, "demo", "--format", "json", "--flat")
    flat = json.loads(out)
    assert flat["four_curvature_over_2pi"] == 0.0 and flat["half_p1"] == 0.0 and flat["beta_A"] != 0.0


def test_demo_agrees_with_checks():
    # the demo's 4-curvature identity is the same one the check harness measures
    rep = K.run_check("four_curvature", K.CheckConfig(points=1, tangent_sets=1))
    vals = cli.demo_values(0)
    assert rep.details["c"]["passed"]
    assert vals["p1_difference"] <= 1e-12 * abs(vals["half_p1"])


def test_convergence_rows(capsys):
    code, out, _ = run(capsys, "convergence", "--checks", "delta_B,delta_epsilon_eq_nu")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == cli.CSV_COLUMNS + ["quadrature_order", "probe"]
    for name in ("delta_B", "delta_epsilon_eq_nu"):
        mine = [r for r in rows if r["check"] == name]
        assert len(mine) == 9
        assert {int(r["N"]) for r in mine} == {64, 128, 256}
    fd = [r for r in rows if r["check"] == "delta_B"]
    # at the smallest step the h-signal sinks under round-off and no order is reported
    assert all(r["observed_order"] for r in fd if float(r["h"]) >= 1e-4)
    assert all(1.8 <= float(r["observed_order"]) <= 2.2 for r in fd if r["observed_order"])


def test_fit():
    assert cli._fit([1.0, 1.0 + 1e-3, 1.0 + 1.25e-3]) == pytest.approx(2.0)
    assert cli._fit([1.0, 1.0, 1.0]) == float("inf")
    assert cli._fit([0.0, 0.0, 0.0]) is None


def test_output_file(tmp_path, capsys):
    out = tmp_path / "cat.txt"
    assert run(capsys, "catalog", "--output", str(out))[0] == 0
    assert "B" in out.read_text()
