"""CLI behavior: schema strictness, exit codes, outputs, reproducibility."""

import json
import math

import numpy as np
import pytest

from coulomblab import cli


def run(args):
    return cli.main(args)


def _write_config(tmp_path, payload):
    p = tmp_path / "config.json"
    p.write_text(json.dumps(payload))
    return str(p)


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_missing_config_file(tmp_path, capsys):
    code = run(["--config", str(tmp_path / "absent.json"), "--out", str(tmp_path),
                "partition"])
    assert code == 5


def test_unknown_key_rejected(tmp_path):
    cfg = _write_config(tmp_path, {"schema_version": 1, "spin": 3})
    assert run(["--config", cfg, "--out", str(tmp_path), "partition"]) == 2


def test_wrong_schema_version(tmp_path):
    cfg = _write_config(tmp_path, {"schema_version": 99})
    assert run(["--config", cfg, "--out", str(tmp_path), "partition"]) == 2


def test_malformed_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert run(["--config", str(p), "--out", str(tmp_path), "partition"]) == 2


def test_constraint_violation_exit_code(tmp_path):
    cfg = _write_config(tmp_path, {"schema_version": 1,
                                   "ensemble": {"N": 16, "s": 16.5, "beta": 1.0,
                                                "c0": 1.0}})
    assert run(["--config", cfg, "--out", str(tmp_path), "partition"]) == 3


def test_unknown_nested_key(tmp_path):
    cfg = _write_config(tmp_path, {"schema_version": 1, "sample": {"stepz": 10}})
    assert run(["--config", cfg, "--out", str(tmp_path), "sample"]) == 2


# ---------------------------------------------------------------------------
# subcommand outputs
# ---------------------------------------------------------------------------

def test_partition_override_exact_value(tmp_path, capsys):
    code = run(["--out", str(tmp_path), "partition", "--N", "2", "--s", "8"])
    assert code == 0
    out = json.loads(next(tmp_path.glob("partition_*.json")).read_text())
    exact = out["reports"][0]["exact"]
    assert exact == pytest.approx(math.log(math.pi**2 * 64 / 42), abs=1e-12)
    assert "config_sha256_12" in out and "seed" in out


def test_partition_s_inf_sentinel(tmp_path):
    cfg = _write_config(tmp_path, {"schema_version": 1,
                                   "ensemble": {"N": 4, "s": "inf", "beta": 2.0,
                                                "c0": 0.1}})
    assert run(["--config", cfg, "--out", str(tmp_path), "partition"]) == 0
    out = json.loads(next(tmp_path.glob("partition_*.json")).read_text())
    assert out["reports"][0]["exact"] == pytest.approx(4 * math.log(math.pi))


def test_fekete_pair_log_delta(tmp_path):
    code = run(["--out", str(tmp_path), "fekete", "--N", "2"])
    assert code == 0
    summary = json.loads(next(tmp_path.glob("fekete_*_summary.json")).read_text())
    assert summary["log_delta"] == pytest.approx(math.log(2), abs=1e-9)
    assert summary["max_green_violation"] <= 1e-8


def test_sample_and_reproducibility(tmp_path):
    cfg = _write_config(tmp_path, {
        "schema_version": 1,
        "ensemble": {"N": 6, "s": 12.0, "beta": 2.0, "c0": 0.1},
        "sample": {"steps": 2000, "burn_in": 400, "thin": 10},
        "seed": 5,
    })
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    assert run(["--config", cfg, "--out", str(out1), "sample"]) == 0
    assert run(["--config", cfg, "--out", str(out2), "sample"]) == 0
    csv1 = next(out1.glob("chain_*.csv")).read_bytes()
    csv2 = next(out2.glob("chain_*.csv")).read_bytes()
    assert csv1 == csv2  # bit-identical with the same config and seed
    name = next(out1.glob("chain_*.csv")).name
    assert "seed5" in name


def test_discretize_outputs(tmp_path):
    cfg = _write_config(tmp_path, {
        "schema_version": 1,
        "discretize": {"N": 32, "epsilon": 0.1, "base_atoms": 64,
                       "bl_nodes_per_block": 6},
    })
    assert run(["--config", cfg, "--out", str(tmp_path), "discretize"]) == 0
    report = json.loads(next(tmp_path.glob("discretize_*.json")).read_text())
    assert report["N"] == 32
    assert report["separation_constant"] > 0.2
    assert report["bl_distance"] < 0.5
    csv = next(tmp_path.glob("discretize_*.csv"))
    assert csv.read_text().splitlines()[0] == "re,im"


def test_rate_table(tmp_path):
    assert run(["--out", str(tmp_path), "rate"]) == 0
    rows = json.loads(next(tmp_path.glob("rate_*.json")).read_text())["rows"]
    assert len(rows) == 12
    assert all(r["rate"] > 0 for r in rows)


def test_verify_subset(tmp_path):
    code = run(["--out", str(tmp_path), "verify", "--criteria", "2,11"])
    assert code == 0
    payload = json.loads(next(tmp_path.glob("verify_*.json")).read_text())
    assert payload["all_pass"] is True
    assert [c["number"] for c in payload["criteria"]] == [2, 11]
    assert all(c["passed"] for c in payload["criteria"])


def test_linstat_outputs(tmp_path):
    cfg = _write_config(tmp_path, {
        "schema_version": 1,
        "ensemble": {"N": 6, "s": 12.0, "beta": 2.0, "c0": 0.1},
        "sample": {"steps": 12000, "burn_in": 1000, "thin": 10},
        "linstat": {"statistics": ["z"], "moments": [[1, 1]], "bins": 16},
    })
    assert run(["--config", cfg, "--out", str(tmp_path), "linstat"]) == 0
    payload = json.loads(next(tmp_path.glob("linstat_*.json")).read_text())
    labels = [r["label"] for r in payload["reports"]]
    assert labels == ["z", "moment_abs2_1_1"]
    hist = next(tmp_path.glob("linstat_*.hist.csv"))
    data = np.loadtxt(hist, delimiter=",", skiprows=1)
    xs, ys = np.unique(data[:, 0]), np.unique(data[:, 1])
    cell = (xs[1] - xs[0]) * (ys[1] - ys[0])
    assert np.sum(data[:, 2]) * cell == pytest.approx(1.0, abs=1e-9)


def test_unknown_statistic_rejected(tmp_path):
    cfg = _write_config(tmp_path, {
        "schema_version": 1,
        "sample": {"steps": 11000, "burn_in": 500, "thin": 10},
        "linstat": {"statistics": ["nope"], "moments": []},
    })
    assert run(["--config", cfg, "--out", str(tmp_path), "linstat"]) == 2


def test_nonconvergence_exit_code(tmp_path):
    cfg = _write_config(tmp_path, {
        "schema_version": 1,
        "fekete": {"N": 12, "max_iterations": 1},
    })
    assert run(["--config", cfg, "--out", str(tmp_path), "fekete"]) == 4
