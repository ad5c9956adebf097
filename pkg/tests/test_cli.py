import csv
import io
import json

import pytest

from caperc.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, EXIT_VERDICT, main, parse_int
from caperc.experiments import exp_regime_scaling


def run(argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_theory_rate():
    code, out, _ = run(["theory", "rate-I", "--t", "1"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["value"] == 0.0
    assert set(doc) >= {"name", "inputs", "value", "log_value", "validity_warnings"}


def test_theory_tree_count_log_value():
    _, out, _ = run(["theory", "expected-tree-count", "--n", "4", "--lam", "1", "--s", "2"])
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.474609375)


def test_theory_warning_reported():
    _, out, _ = run(["theory", "giant", "--n", "100", "--lam", "1.0000001"])
    assert json.loads(out)["validity_warnings"]


def test_theory_classify():
    _, out, _ = run(["theory", "classify", "--lambda", "0.4,0.4"])
    assert json.loads(out)["value"] == "subcritical"


def test_sample_pipe_ca(monkeypatch):
    code, edges, _ = run(["sample", "--n", "4", "--k", "2", "--lambda", "1.0,0.5", "--seed", "7"])
    assert code == EXIT_OK and edges.startswith("caperc-v1 n=4 k=2\n")
    code, part, _ = run(["ca"], stdin=edges, monkeypatch=monkeypatch)
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(part)))
    assert rows[0][:2] == ["vertex", "ca_comp_id"]
    assert len(rows) == 5


def test_ca_census_file(tmp_path, monkeypatch):
    _, edges, _ = run(["sample", "--n", "50", "--k", "3", "--lambda", "2,1,1", "--seed", "1"])
    f = tmp_path / "g.txt"
    f.write_text(edges)
    code, _, _ = run(["ca", str(f), "--census-out", str(tmp_path / "c.csv")])
    assert code == EXIT_OK
    assert (tmp_path / "c.csv").read_text().startswith("stat_kind,key,value\n")


def test_sample_is_deterministic():
    a = run(["sample", "--n", "1e3", "--k", "2", "--lambda", "1,1", "--seed", "3"])[1]
    b = run(["sample", "--n", "1000", "--k", "2", "--lambda", "1,1", "--seed", "3"])[1]
    assert a == b


def test_bad_edge_list(monkeypatch):
    code, _, err = run(["ca"], stdin="caperc-v1 n=4 k=2\n1 5 2\n", monkeypatch=monkeypatch)
    assert code == EXIT_DATA
    assert "vertex out of range, line 2" in err


def test_usage_errors():
    assert run(["bogus"])[0] == EXIT_USAGE
    assert run(["sample", "--n", "4"])[0] == EXIT_USAGE
    assert run(["theory", "rate-I"])[0] == EXIT_USAGE


def test_invalid_params_are_data_errors():
    assert run(["sample", "--n", "4", "--k", "2", "--lambda", "0,1", "--seed", "1"])[0] == EXIT_DATA


def test_verify():
    code, out, _ = run(["verify", "--instances", "50"])
    assert code == EXIT_OK
    assert json.loads(out)["mismatches"] == 0


def test_parse_int_scientific():
    assert parse_int("1e6") == 10**6
    assert parse_int("4e6") == 4 * 10**6


def test_run_matches_library(tmp_path):
    out_dir = tmp_path / "rs"
    code, out, _ = run(["run", "regime-scaling", "--lambda", "1.3,0.4", "--n", "2e3,4e3", "--trials", "4",
                        "--seed", "42", "--out", str(out_dir)])
    assert code in (EXIT_OK, EXIT_VERDICT)
    lib = exp_regime_scaling((1.3, 0.4), (2000, 4000), 4, 42)
    lib.write(tmp_path / "lib")
    for name in ("results.csv", "verdicts.csv"):
        assert (out_dir / name).read_bytes() == (tmp_path / "lib" / name).read_bytes()
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["config"]["effective_cli_config"]["seed"] == 42
    assert (out_dir / "plot.svg").exists()


def test_run_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lambda": [0.4, 0.4], "n": "1e3,2e3", "trials": 3, "seed": 5}))
    code, _, _ = run(["run", "regime-scaling", "--config", str(cfg), "--trials", "2", "--out", str(tmp_path / "o")])
    assert code in (EXIT_OK, EXIT_VERDICT)
    eff = json.loads((tmp_path / "o" / "manifest.json").read_text())["config"]["effective_cli_config"]
    assert eff["trials"] == 2 and eff["seed"] == 5 and eff["n"] == [1000, 2000]


def test_run_critical_window_small(tmp_path):
    code, out, _ = run(["run", "critical-window", "--zeta", "inv-log", "--lambda-rest", "0.5",
                        "--n", "1e3,1e4", "--trials", "3", "--seed", "42", "--out", str(tmp_path / "cw")])
    assert code in (EXIT_OK, EXIT_VERDICT)
    for name in ("results.csv", "verdicts.csv", "manifest.json"):
        assert (tmp_path / "cw" / name).exists()
    assert "ratio_in_band" in out


def test_run_bad_zeta(tmp_path):
    assert run(["run", "critical-window", "--zeta", "nope", "--out", str(tmp_path)])[0] == EXIT_DATA
