import json
import os

import pytest
import yaml

from hadronvqe import experiments
from hadronvqe.errors import ConfigError, ParameterError
from hadronvqe.experiments import ExperimentConfig, collect_rows, run_experiment
from hadronvqe.main import main
from hadronvqe.model import LatticeParams, build_hamiltonian
from hadronvqe.utils.utils import atomic_write, format_float, parse_assignments, parse_grid, write_table


def test_model_count_follows_formula(capsys):
    assert main(["model", "count", "--n-max", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["N,actual,formula,merged", "2,11,11,10", "4,61,61,60"]


def test_model_dump_json(capsys):
    assert main(["model", "dump", "--n", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n_qubits"] == 4
    assert len(payload["terms"]) == len(build_hamiltonian(LatticeParams(2, 1.0, 1.0)))


def test_ed_solve_prints_sector(capsys):
    assert main(["ed", "solve", "--n", "2", "--sector", "B=1", "--singlet"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["sector_dim"] == 1
    assert len(payload["energies"]) == 1


def test_known_errors_exit_with_two(capsys):
    assert main(["ed", "solve", "--n", "3"]) == 2
    assert capsys.readouterr().err.startswith("Invalid parameter:")


def test_unexpected_errors_exit_with_one(monkeypatch):
    def broken(n_sites):
        raise RuntimeError("boom")

    monkeypatch.setattr("hadronvqe.commands.model.pauli_term_count", broken)
    assert main(["model", "count"]) == 1


def test_bad_arguments_exit_through_argparse():
    with pytest.raises(SystemExit):
        main(["vqe", "baryon", "--mode", "analog"])


def test_experiment_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig("unknown", "out.csv")
    with pytest.raises(ConfigError):
        ExperimentConfig("baryon_mass", "out.csv", mode="sampled")
    with pytest.raises(ConfigError):
        ExperimentConfig("baryon_mass", "out.csv", x=())
    with pytest.raises(ConfigError):
        ExperimentConfig("baryon_mass", "")


def test_noise_study_keeps_the_given_depolarizing(monkeypatch, capsys):
    with pytest.raises(ConfigError):
        ExperimentConfig("noise_study", "out.csv")
    with pytest.raises(ConfigError):
        ExperimentConfig("noise_study", "out.csv", depolarizing=0.0)
    with pytest.raises(ConfigError):
        ExperimentConfig("baryon_mass", "out.csv", depolarizing=1.0)

    seen = []

    class Study:
        def row(self):
            return {"x": 1.0}

    def fake_study(n, m_tilde, x, depolarizing, *args):
        seen.append(depolarizing)
        return Study()

    monkeypatch.setattr(experiments, "noise_study", fake_study)
    collect_rows(ExperimentConfig("noise_study", "out.csv", n_sites=(2,), depolarizing=0.002))
    assert seen == [0.002]

    assert main(["noise", "study", "--n", "2", "--p", "0"]) == 2
    assert "depolarizing" in capsys.readouterr().err


def test_experiment_config_from_mapping():
    config = ExperimentConfig.from_mapping({
        "experiment": "ed_scan",
        "output": "scan.csv",
        "n_sites": [2, 4],
        "x": "0.5:1:0.25",
        "m_tilde": 2,
    })
    assert config.n_sites == (2, 4)
    assert config.x == (0.5, 0.75, 1.0)
    assert config.m_tilde == (2.0,)
    assert config.to_dict()["x"] == [0.5, 0.75, 1.0]

    for bad in ({"experiment": "ed_scan", "output": "a", "solver": {"k": 1}},
                {"experiment": "ed_scan", "output": "a", "colour": 3},
                {"experiment": "ed_scan", "output": "a", "n_sites": "two"},
                {"output": "a"}):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_mapping(bad)


def test_experiment_config_from_file(tmp_path):
    path = tmp_path / "baryon.yml"
    path.write_text(yaml.safe_dump({"experiment": "baryon_mass", "output": "b.csv", "n_sites": 2, "x": [1, 2]}))
    config = ExperimentConfig.from_file(path, {"mode": "sampled", "seed": 3, "shots": 100})
    assert config.n_sites == (2,)
    assert config.shot_count() == 100
    assert config.optimizer().seed == 3
    assert config.noise(4) is None

    path.write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.from_file(path)


def test_exact_mode_needs_no_shots():
    config = ExperimentConfig("baryon_mass", "b.csv", shots=10)
    assert config.shot_count() is None
    assert config.seed_value == 0
    noise = ExperimentConfig("baryon_mass", "b.csv", depolarizing=0.01).noise(4)
    assert noise.depolarizing == 0.01


def test_run_experiment_writes_table_mirror_and_manifest(tmp_path):
    config = ExperimentConfig("ed_scan", str(tmp_path / "out" / "scan.csv"), n_sites=(2,), x=(1.0, 2.0))
    table, mirror, manifest = run_experiment(config)

    assert table.read_text().splitlines()[0] == "N,m_tilde,x,E_v,E_b,E_m,M_b,M_m,r,flagged"
    rows = json.loads(mirror.read_text())
    assert [r["x"] for r in rows] == [1.0, 2.0]
    assert manifest.name == "scan.manifest.json"
    data = json.loads(manifest.read_text())
    assert data["experiment"] == "ed_scan"
    assert data["rows"] == 2
    assert data["files"] == ["scan.csv", "scan.json"]


def test_rerun_is_byte_identical(tmp_path):
    config = ExperimentConfig("baryon_mass", str(tmp_path / "b.csv"), n_sites=(2,), x=(1.0,), reduce=False, seed=7)
    first = [p.read_bytes() for p in run_experiment(config)]
    second = [p.read_bytes() for p in run_experiment(config)]
    assert first == second


def test_cli_run_matches_direct_run(tmp_path, capsys):
    path = tmp_path / "scan.yml"
    path.write_text(yaml.safe_dump({"experiment": "ratio_contour", "output": str(tmp_path / "r.csv"), "n_sites": 2}))
    assert main(["run", str(path), "--set", "x=[0.5, 1.0]"]) == 0
    printed = capsys.readouterr().out.split()
    assert printed[0] == str(tmp_path / "r.csv")
    assert len(json.loads((tmp_path / "r.json").read_text())) == 2


def test_failed_run_writes_nothing(tmp_path, monkeypatch):
    def failing(config, point):
        raise ParameterError("no rows today")

    monkeypatch.setitem(experiments.TASKS, "ed_scan", failing)
    config = ExperimentConfig("ed_scan", str(tmp_path / "scan.csv"), n_sites=(2,))
    with pytest.raises(ParameterError):
        run_experiment(config)
    assert os.listdir(tmp_path) == []


def test_rows_keep_grid_order_with_workers():
    serial = ExperimentConfig("ed_scan", "-", n_sites=(2,), m_tilde=(0.5, 1.0, 2.0), workers=1)
    parallel = ExperimentConfig("ed_scan", "-", n_sites=(2,), m_tilde=(0.5, 1.0, 2.0), workers=2)
    assert collect_rows(serial) == collect_rows(parallel)


def test_parse_grid():
    assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("0.5,1,2") == [0.5, 1.0, 2.0]
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    for bad in ("1:0:0.5", "0:1:0", "a:b", ""):
        with pytest.raises(ParameterError):
            parse_grid(bad)


def test_parse_assignments():
    assert parse_assignments(["n_sites=4", "mode=sampled", "x=[1, 2]", "beta="]) == {
        "n_sites": 4,
        "mode": "sampled",
        "x": [1, 2],
        "beta": None,
    }
    with pytest.raises(ParameterError):
        parse_assignments(["oops"])


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(True) == "true"
    assert format_float(None) == ""
    assert format_float(3) == "3"


def test_table_and_mirror_agree(tmp_path):
    table, mirror = write_table(tmp_path / "t.csv", [{"a": 1, "b": 0.5}, {"a": 2, "b": float("nan")}])
    assert table.read_text() == "a,b\n1,0.5\n2,nan\n"
    assert json.loads(mirror.read_text()) == [{"a": 1, "b": 0.5}, {"a": 2, "b": None}]


def test_atomic_write_leaves_nothing_on_failure(tmp_path, monkeypatch):
    def refuse(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", refuse)
    with pytest.raises(OSError):
        atomic_write(tmp_path / "t.csv", "a\n")
    assert os.listdir(tmp_path) == []
