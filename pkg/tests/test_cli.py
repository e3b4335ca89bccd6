from __future__ import annotations

import json

import pytest

from erwmx.cli import main


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def classical_config(p=0.6, extra_experiment=None):
    doc = {
        "model": {
            "p": p,
            "q": 0.5,
            "sampling": "with",
            "k": {"type": "constant", "value": 1},
            "f": {"type": "linear", "c": 1.0},
        }
    }
    if extra_experiment:
        doc["experiment"] = extra_experiment
    return doc


def test_analyze_iid(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {
            "model": {
                "p": 0.7,
                "q": 0.7,
                "sampling": "with",
                "k": {"type": "constant", "value": 5},
                "f": {"type": "constant", "c": 1.0},
            }
        },
    )
    assert main(["analyze", "--config", cfg]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["regime"] == "diffusive"
    assert doc["x_star"] == pytest.approx(0.4, abs=1e-9)
    assert doc["tau"] == pytest.approx(1.0)
    assert doc["predicted_variance"] == pytest.approx(0.84, abs=1e-9)


def test_analyze_non_unique_exit_2(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {
            "model": {
                "p": 0.9,
                "q": 0.5,
                "sampling": "with",
                "k": {"type": "constant", "value": 3},
                "f": {"type": "majority"},
            }
        },
    )
    assert main(["analyze", "--config", cfg]) == 2
    doc = json.loads(capsys.readouterr().out)
    assert [round(r, 7) for r in doc["roots"]] == [-0.7071068, 0.0, 0.7071068]


def test_analyze_critical(tmp_path, capsys):
    cfg = write_config(tmp_path, classical_config(p=0.75))
    assert main(["analyze", "--config", cfg]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["regime"] == "critical"
    assert doc["predicted_variance"] == pytest.approx(1.0, abs=1e-9)


def test_check_command(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {
            "model": {
                "p": 0.7,
                "q": 0.5,
                "sampling": "with",
                "k": {"type": "constant", "value": 3},
                "f": {"type": "linear", "c": 1.2, "extended_range": True},
            }
        },
    )
    assert main(["check", "--config", cfg]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["A1"]["status"] == "holds"
    assert doc["C1"]["status"] == "fails"
    assert doc["E1"]["status"] == "fails"
    assert set(doc) == {
        "A1", "A2", "B1", "B2", "B3", "C1", "C2", "D1", "D2", "E1", "E2",
        "F1", "F2", "F3", "F4", "G1", "G2", "G3", "S5", "S6", "S7", "S8", "Cor1",
    }


def test_config_error_exit_1(tmp_path, capsys):
    cfg = write_config(tmp_path, {"model": {"p": 0.6, "bogus": 1}})
    assert main(["analyze", "--config", cfg]) == 1


def test_unknown_key_rejected(tmp_path):
    doc = classical_config()
    doc["model"]["surprise"] = True
    cfg = write_config(tmp_path, doc)
    assert main(["analyze", "--config", cfg]) == 1


def test_simulate_degenerate_row(tmp_path, capsys):
    doc = classical_config(extra_experiment={"replicates": 1, "horizon": 1, "seed": 3})
    doc["model"]["q"] = 1.0
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "traj.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines == ["replicate,n,s_n", "1,1,1"]


def test_simulate_byte_deterministic(tmp_path, capsys):
    doc = classical_config(extra_experiment={"replicates": 3, "horizon": 64, "seed": 17})
    cfg = write_config(tmp_path, doc)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_oracle_command(tmp_path, capsys):
    doc = classical_config(p=0.75, extra_experiment={"replicates": 1, "horizon": 4, "seed": 1})
    cfg = write_config(tmp_path, doc)
    out = tmp_path / "pmf.csv"
    assert main(["oracle", "--config", cfg, "--n-max", "2", "--out", str(out)]) == 0
    rows = out.read_text().strip().splitlines()[1:]
    probs = {(r.split(",")[0], r.split(",")[1]): float(r.split(",")[2]) for r in rows}
    assert probs[("2", "-2")] == pytest.approx(0.375)
    assert probs[("2", "0")] == pytest.approx(0.25)
    assert probs[("2", "2")] == pytest.approx(0.375)


def test_experiment_assert_iid_control(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        {
            "model": {
                "p": 0.7,
                "q": 0.7,
                "sampling": "with",
                "k": {"type": "constant", "value": 5},
                "f": {"type": "constant", "c": 1.0},
            },
            "experiment": {"replicates": 200, "horizon": 1024, "seed": 5},
            "output": {"dir": str(tmp_path / "res"), "formats": ["csv"]},
        },
    )
    assert main(["experiment", "--config", cfg, "--assert"]) == 0
    summary = json.loads((tmp_path / "res" / "summary.json").read_text())
    assert summary["verdicts"]["clt_ks"] is True
    assert summary["verdicts"]["lln"] is True
    first = (tmp_path / "res" / "checkpoints.jsonl").read_text().splitlines()[0]
    assert json.loads(first) == {"n": 1, "replicate": 1, "s": json.loads(first)["s"]}
    assert (tmp_path / "res" / "samples.csv").exists()


def test_experiment_assert_failure_exit_3(tmp_path, capsys):
    # an intentionally wrong alpha=0.99999 forces the KS verdict to fail
    cfg = write_config(
        tmp_path,
        classical_config(
            extra_experiment={
                "replicates": 150,
                "horizon": 256,
                "seed": 5,
                "alpha": 0.99999,
            }
        ),
    )
    code = main(["experiment", "--config", cfg, "--assert", "--out", str(tmp_path / "r2")])
    assert code == 3
