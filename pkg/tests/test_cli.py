import json

import pytest

from gg1lab.cli import main, parse_distribution
from gg1lab.metrics import MetricsReport


def test_parse_distribution():
    spec = parse_distribution("uniform:0,2")
    assert spec.kind == "uniform"
    assert spec.params == (0.0, 2.0)
    with pytest.raises(ValueError):
        parse_distribution("exponential")
    with pytest.raises(ValueError):
        parse_distribution("weird:1.0")


def test_simulate_verb(tmp_path, capsys):
    rc = main([
        "simulate", "--arrival", "exponential:0.5", "--service", "exponential:1.0",
        "--horizon", "500", "--seed", "3", "--out", str(tmp_path),
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "customers=" in out
    report = MetricsReport.from_json((tmp_path / "report.json").read_text())
    assert report.N_total > 100
    assert (tmp_path / "customer.csv").read_text().startswith("id,t_A,svc_start,t_mu,t_D,pre_window")
    assert (tmp_path / "path.csv").read_text().startswith("tau,n")


def test_sweep_verb(tmp_path, capsys):
    cfg = {
        "version": 1,
        "arrival": {"kind": "exponential", "params": [0.4]},
        "service_shape": {"kind": "exponential", "params": [1.0]},
        "rate_grid": [0.6, 0.9, 1.3],
        "seeds": [1, 2],
        "horizon": 800.0,
        "warmup": 20.0,
    }
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(cfg))
    out_dir = tmp_path / "out"
    rc = main(["sweep", "--config", str(cfg_file), "--out", str(out_dir)])
    assert rc == 0
    for name in ("surface.csv", "reports.jsonl", "config.echo.json", "equivalence.json"):
        assert (out_dir / name).exists()
    verdicts = json.loads((out_dir / "equivalence.json").read_text())
    # no penalty in this config: raw surfaces are compared pairwise
    assert "H_bar_t|H_bar_n" in verdicts
    assert "argmin mu=" in capsys.readouterr().out


def test_sweep_overrides(tmp_path):
    cfg = {
        "version": 1,
        "arrival": {"kind": "exponential", "params": [0.4]},
        "service_shape": {"kind": "exponential", "params": [1.0]},
        "rate_grid": [0.8, 1.2],
        "seeds": [1, 2, 3, 4],
        "horizon": 5000.0,
    }
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps(cfg))
    out_dir = tmp_path / "out"
    rc = main(["sweep", "--config", str(cfg_file), "--out", str(out_dir),
               "--seeds", "7,8", "--horizon", "300"])
    assert rc == 0
    echoed = json.loads((out_dir / "config.echo.json").read_text())
    assert echoed["seeds"] == [7, 8]
    assert echoed["horizon"] == 300.0


def test_inspect_verb(tmp_path, capsys):
    rc = main([
        "inspect", "--arrival", "exponential:0.5", "--service", "deterministic:1.0",
        "--horizon", "2000", "--epoch-rate", "0.2", "--seed", "5",
        "--out", str(tmp_path),
    ])
    assert rc == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["expected_age"] == pytest.approx(0.5)
    assert summary["bias"] == pytest.approx(0.0)
    assert 0.0 < summary["busy_fraction"] < 1.0
    assert (tmp_path / "inspections.csv").exists()
    assert (tmp_path / "pdf_curves.csv").exists()


def test_mdp_solve_verb(tmp_path, capsys):
    cfg = {
        "arrival_rate": 0.1,
        "action_grid": [0.15, 0.2, 0.25, 0.3, 0.35, 0.4],
        "n_states": 60,
        "cost_weight": 1.0,
        "penalty": [0.1, -8.0],
    }
    cfg_file = tmp_path / "mdp.json"
    cfg_file.write_text(json.dumps(cfg))
    out_dir = tmp_path / "out"
    rc = main(["mdp", "solve", "--config", str(cfg_file), "--out", str(out_dir)])
    assert rc == 0
    payload = json.loads((out_dir / "solution.json").read_text())
    assert payload["instance"]["n_states"] == 60
    assert len(payload["solution"]["policy"]) == 61
    assert payload["H_bar_t"] > 0
    assert payload["implied_R_bar_n"] > 0
    assert "rho_bar=" in capsys.readouterr().out


def test_errors_exit_2_with_json(tmp_path, capsys):
    rc = main(["sweep", "--config", str(tmp_path / "missing.json")])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "FileNotFoundError"

    rc = main(["simulate", "--arrival", "exponential:-1", "--service",
               "exponential:1", "--out", str(tmp_path)])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ValueError"
    assert "rate" in err["message"]
