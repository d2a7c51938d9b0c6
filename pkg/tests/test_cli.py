# File: tests/test_cli.py
# End-to-end runs of the command-line entry point

import json
import os

import pytest

import main
from src.core.config import ScenarioConfig
from src.scenarios import run_scenario


def read_json(path):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def test_parse_arguments_strips_run_word():
    args = main.parse_arguments(["run", "volume", "--modes", "2", "--t", "0.5", "--traj", "10"])
    assert args.scenario == "volume"
    assert args.modes == 2
    assert args.t_final == 0.5
    assert args.n_traj == 10
    assert args.k is None


def test_parse_arguments_rejects_two_scenarios():
    with pytest.raises(SystemExit):
        main.parse_arguments(["volume", "qfunc"])


def test_volume_run_writes_json(output_dir):
    code = main.main(["run", "volume", "--modes", "1", "--k", "0", "--samples", "2000",
                      "--output", output_dir, "--quiet"])
    assert code == main.EXIT_OK
    document = read_json(os.path.join(output_dir, "volume.json"))
    assert document["scenario"] == "volume"
    assert document["passed"] is True
    assert document["config"]["samples"] == 2000
    assert document["checks"]["volume_vs_gamma_formula"]["passed"]


def test_bosonic_run_writes_table(output_dir):
    code = main.main(["bosonic-compare", "--modes", "2", "--omega", "1, 0.3; 0.3, -0.5",
                      "--alpha0", "0.5+0.2j, -0.1", "--t-final", "2", "--output", output_dir, "--quiet"])
    assert code == main.EXIT_OK
    with open(os.path.join(output_dir, "bosonic-compare_alpha.csv"), encoding="utf-8") as handle:
        lines = handle.read().splitlines()
    assert lines[0].startswith("t,re_alpha_1,re_alpha_2,im_alpha_1,im_alpha_2")
    assert len(lines) == 12


def test_config_file_and_flag_precedence(tmp_path, output_dir):
    config = tmp_path / "volume.cfg"
    config.write_text("scenario = volume\nmodes = 2\nk = 0\nsamples = 1000\n", encoding="utf-8")
    code = main.main(["--config", str(config), "--modes", "1", "--output", output_dir, "--quiet"])
    assert code == main.EXIT_OK
    assert read_json(os.path.join(output_dir, "volume.json"))["config"]["modes"] == 1


@pytest.mark.parametrize("argv", [
    ["teleport"],
    ["volume", "--modes", "0"],
    ["volume", "--sampler", "metropolis"],
])
def test_configuration_errors_exit_with_code_2(argv, output_dir):
    assert main.main(argv + ["--output", output_dir, "--quiet"]) == main.EXIT_CONFIG_ERROR


def test_unreadable_config_file(tmp_path, output_dir):
    code = main.main(["volume", "--config", str(tmp_path / "absent.cfg"), "--output", output_dir, "--quiet"])
    assert code == main.EXIT_CONFIG_ERROR


def test_library_error_exit_code(output_dir):
    # a non-symmetric omega is rejected by the bosonic comparator, not by the configuration
    code = main.main(["bosonic-compare", "--modes", "2", "--omega", "0, 1; 0, 0", "--output", output_dir, "--quiet"])
    assert code == main.EXIT_LIBRARY_ERROR


@pytest.mark.parametrize("scenario,overrides", [
    ("resolution", {"modes": 1, "k": 1.0}),
    ("qfunc", {"modes": 1, "n0": 0.4, "samples": 4000}),
    ("evolve-unitary", {"modes": 2, "h": "0.5, 0.2; 0.2, -0.3", "delta": "0, 0.1; -0.1, 0", "t_final": 1.0}),
    ("verify-identities", {"modes": 1, "trials": 2}),
])
def test_deterministic_scenarios_pass(scenario, overrides):
    result = run_scenario(ScenarioConfig(scenario=scenario, **overrides).validate())
    failed = [name for name, check in result.checks.items() if not check["passed"]]
    assert not failed
    assert result.passed


@pytest.mark.slow
def test_single_mode_dissipative_scenario():
    cfg = ScenarioConfig(scenario="evolve-dissipative", modes=1, n0=0.9, gamma="1", t_final=1.0,
                         n_traj=40000, dt=0.01, record_every=20).validate()
    result = run_scenario(cfg)
    assert result.passed
    assert "ensemble" in result.tables
    assert "pde" in result.tables


def _reject_constant(name):
    raise ValueError(f"non-finite JSON constant {name}")


@pytest.mark.slow
def test_dissipative_run_writes_finite_json(output_dir):
    code = main.main(["run", "evolve-dissipative", "--modes", "1", "--n0", "1", "--gamma", "1", "--t", "3",
                      "--traj", "8000", "--output", output_dir, "--quiet"])
    assert code == main.EXIT_OK
    with open(os.path.join(output_dir, "evolve-dissipative.json"), encoding="utf-8") as handle:
        document = json.load(handle, parse_constant=_reject_constant)
    assert document["passed"] is True
    assert document["checks"]["ensemble_vs_master_equation"]["passed"]
    assert 0.0 < document["metrics"]["final_surviving_fraction"] < 1.0


@pytest.mark.slow
def test_two_mode_dissipative_scenario():
    cfg = ScenarioConfig(scenario="evolve-dissipative", modes=2, n0=0.7, gamma="1, 0; 0, 0.5", t_final=1.0,
                         n_traj=20000, dt=0.01, record_every=20).validate()
    result = run_scenario(cfg)
    assert result.checks["ensemble_vs_master_equation"]["passed"]
    assert "pde" not in result.tables
