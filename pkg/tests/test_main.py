import io
import json

import pandas as pd
import pytest

from src.main import SMALL_PROBLEM, main
from src.services.config import CONFIG_ENV_VAR


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def formula_config(tmp_path):
    path = tmp_path / "formula.json"
    path.write_text(json.dumps({"trotter": {"r_override": None}}))
    return str(path)


def test_estimate_table(capsys):
    assert main(["estimate"]) == 0
    out = capsys.readouterr().out
    assert "QLSA logical resources" in out
    assert "excl. oracles" in out
    assert "hs_calls" in out


def test_estimate_json(capsys):
    assert main(["estimate", "--format", "json", "--exclude-oracles"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["excl_oracles"]["width"] == "341"
    assert "incl_oracles" not in payload
    assert payload["anchors"]["hs_calls"] == "196596"


def test_estimate_small_problem(capsys):
    assert SMALL_PROBLEM.exists()
    assert main(["estimate", "--small", "--format", "csv"]) == 0
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(df["N"]) == [24, 24]
    assert list(df["n2"]) == [6, 6]


def test_estimate_to_file(capsys, tmp_path):
    target = tmp_path / "out" / "report.json"
    assert main(["estimate", "--format", "json", "-o", str(target)]) == 0
    assert "Saved report" in capsys.readouterr().out
    assert json.loads(target.read_text())["registers"] == "287"


def test_config_from_environment(capsys, monkeypatch, tmp_path):
    path = tmp_path / "env.json"
    path.write_text(json.dumps({"output": {"format": "json"}}))
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    assert main(["estimate", "--include-oracles"]) == 0
    assert "incl_oracles" in json.loads(capsys.readouterr().out)


def test_sweep_epsilon(capsys, formula_config):
    assert main(["sweep", "epsilon", "0.1", "0.01", "--config", formula_config, "--exclude-oracles"]) == 0
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(df["epsilon"]) == [0.1, 0.01]
    assert list(df["n0"]) == [7, 14]
    assert df["r"].iloc[1] > df["r"].iloc[0]


def test_single_value_sweep_matches_estimate(capsys):
    assert main(["sweep", "N", "332020680", "--format", "json"]) == 0
    swept = json.loads(capsys.readouterr().out)
    assert main(["estimate", "--format", "json"]) == 0
    single = json.loads(capsys.readouterr().out)
    assert len(swept) == 1
    assert swept[0]["N"] == 332020680
    assert swept[0]["excl_oracles"] == single["excl_oracles"]
    assert swept[0]["incl_oracles"] == single["incl_oracles"]


def test_sweep_r_override_is_linear(capsys):
    assert main(["sweep", "r_override", "2500000000000", "5000000000000", "--exclude-oracles", "--format", "json"]) == 0
    a, b = json.loads(capsys.readouterr().out)
    ratio = int(b["excl_oracles"]["depth"]) / int(a["excl_oracles"]["depth"])
    assert ratio == pytest.approx(2.0, rel=1e-3)


def test_sweep_unknown_parameter(capsys):
    assert main(["sweep", "temperature", "1"]) == 2
    assert capsys.readouterr().err.startswith("error: Parameter temperature is not sweepable")


def test_template_library_entry(capsys):
    assert main(["template", "mcnot", "--n", "3"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("mcnot: ")
    row = next(line for line in out.splitlines() if line.split()[:1] == ["t"])
    assert row.split()[1] == "21"


def test_template_toffoli(capsys):
    assert main(["template", "toffoli", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["resources"]["t"] == "7"
    assert payload["resources"]["cnot"] == "6"


def test_template_tree_block(capsys):
    assert main(["template", "controlled_hmag", "--exclude-oracles"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("[template controlled_hmag]")
    assert "child = crz : n4" in out


@pytest.mark.parametrize(
    "argv, message",
    [
        (["template", "nope"], "Unknown template"),
        (["template", "cphase", "--n", "3"], "--f"),
        (["template", "qft", "--b", "0"], "qft needs b >= 1"),
        (["estimate", "--config", "missing.json"], "Config file not found"),
    ],
)
def test_errors_exit_2(capsys, argv, message):
    assert main(argv) == 2
    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert message in err


def test_bad_config_value_names_the_key(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"problem": {"kappa": -1}}))
    assert main(["estimate", "--config", str(path)]) == 2
    assert "problem.kappa" in capsys.readouterr().err


def test_verify_tables(capsys):
    assert main(["verify", "--suite", "tables"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] tables/toffoli" in out
    assert "[FAIL]" not in out
    assert out.rstrip().endswith("all checks passed")


def test_reversibilize(capsys, tmp_path):
    path = tmp_path / "and.bool"
    path.write_text("w0 = INPUT 0\nw1 = INPUT 1\nw2 = AND w0 w1\nOUTPUT w2\n")
    assert main(["reversibilize", str(path), "--uf"]) == 0
    out = capsys.readouterr().out
    assert out.count("Toffoli w0 w1 -> w2") == 2
    assert "CNOT w2 -> w3" in out
    assert "U_f" in out


def test_reversibilize_parse_error(capsys, tmp_path):
    path = tmp_path / "bad.bool"
    path.write_text("w0 = INPUT 0\nw1 = NAND w0 w0\nOUTPUT w1\n")
    assert main(["reversibilize", str(path)]) == 2
    assert "line 2" in capsys.readouterr().err
