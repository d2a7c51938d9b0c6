# File: tests/test_config.py
# Configuration file parsing, merging and validation

import numpy as np
import pytest

from src.core.config import (DEFAULT_K, ScenarioConfig, load_config_file, merge_config, parse_matrix,
                             parse_vector)
from src.core.errors import ConfigParse, UnknownConfigKey, UnknownScenario


def write_config(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_config_file(tmp_path):
    path = write_config(tmp_path, "# loss run\nmodes = 2\nk = 0.5   # scaling\nt-final = 1.5\n\nn_traj = 1e4\n")
    values = load_config_file(path)
    assert values == {"modes": 2, "k": 0.5, "t_final": 1.5, "n_traj": 10000}


def test_load_config_file_errors(tmp_path):
    with pytest.raises(UnknownConfigKey):
        load_config_file(write_config(tmp_path, "colour = blue\n"))
    with pytest.raises(ConfigParse):
        load_config_file(write_config(tmp_path, "modes 2\n"))
    with pytest.raises(ConfigParse):
        load_config_file(write_config(tmp_path, "modes = two\n"))
    with pytest.raises(ConfigParse):
        load_config_file(str(tmp_path / "missing.cfg"))


def test_flags_override_file_values():
    cfg = merge_config({"scenario": "volume", "modes": 2, "k": 2.0}, {"modes": 1, "k": None})
    assert cfg.scenario == "volume"
    assert cfg.modes == 1
    assert cfg.k == 2.0
    assert merge_config({}, {}).k == DEFAULT_K


def test_merge_rejects_unknown_keys():
    with pytest.raises(UnknownConfigKey):
        merge_config({"colour": "blue"})


@pytest.mark.parametrize("overrides,error", [
    ({"scenario": "teleport"}, UnknownScenario),
    ({"modes": 0}, ConfigParse),
    ({"k": -1.0}, ConfigParse),
    ({"n0": 1.5}, ConfigParse),
    ({"dt": 0.0}, ConfigParse),
    ({"sampler": "metropolis"}, ConfigParse),
    ({"modes": 2, "delta": "1"}, ConfigParse),
    ({"modes": 2, "h": "1, 0, 0"}, ConfigParse),
    ({"modes": 2, "alpha0": "1, 2, 3"}, ConfigParse),
])
def test_validation_errors(overrides, error):
    with pytest.raises(error):
        ScenarioConfig(**overrides).validate()


def test_matrix_fields():
    cfg = ScenarioConfig(modes=2, h="0.5", omega="1, 0.2; 0.2, -1", alpha0="1+1j")
    assert np.allclose(cfg.matrix("h"), 0.5 * np.eye(2))
    assert np.allclose(cfg.matrix("omega", dtype=float), [[1.0, 0.2], [0.2, -1.0]])
    assert np.allclose(cfg.matrix("delta"), np.zeros((2, 2)))
    assert np.allclose(cfg.alpha_vector(), [1 + 1j, 1 + 1j])


def test_parse_literals():
    assert parse_matrix("2").shape == (1, 1)
    assert np.allclose(parse_vector("1, -0.5j"), [1, -0.5j])
    with pytest.raises(ConfigParse):
        parse_matrix("1, 2; 3")
    with pytest.raises(ConfigParse):
        parse_matrix("1j", dtype=float)
    with pytest.raises(ConfigParse):
        parse_matrix(" ; ")


def test_as_dict_is_complete():
    data = ScenarioConfig().as_dict()
    assert data["scenario"] == "verify-identities"
    assert set(data) >= {"modes", "k", "seed", "t_final", "n_traj", "sampler"}
