"""Tests of the configuration manager."""

import json

import pytest

from whichslit.config import ConfigManager
from whichslit.config.config_manager import DEFAULT_CONFIG_PATH


def test_defaults_are_loaded():
    manager = ConfigManager(str(DEFAULT_CONFIG_PATH))
    assert manager.tolerance("equality") == 1e-10
    assert manager.tolerance("hermiticity") == 1e-12
    assert manager.max_dimension() == 4096
    assert manager.get_service_config("solver")["restarts"] == 200
    assert manager.get_service_config("sampler")["seed"] == 7
    assert manager.schema_version == "1.0"


def test_user_file_is_merged_over_defaults(tmp_path):
    user = tmp_path / "user.json"
    user.write_text(json.dumps({"tolerances": {"equality": 1e-8}, "services": {"solver": {"restarts": 5}}}))
    manager = ConfigManager(str(user))
    assert manager.tolerance("equality") == 1e-8
    assert manager.tolerance("nonzero") == 1e-6
    solver = manager.get_service_config("solver")
    assert solver["restarts"] == 5
    assert solver["max_iterations"] == 300


def test_broken_user_file_falls_back_to_defaults(tmp_path):
    user = tmp_path / "broken.json"
    user.write_text("{not json")
    assert ConfigManager(str(user)).tolerance("equality") == 1e-10


def test_environment_overrides(monkeypatch):
    manager = ConfigManager(str(DEFAULT_CONFIG_PATH))
    monkeypatch.setenv("WHICHSLIT_TOL", "1e-6")
    monkeypatch.setenv("WHICHSLIT_MAX_DIM", "64")
    assert manager.tolerance("equality") == 1e-6
    assert manager.tolerance("idempotence") == 1e-10
    assert manager.max_dimension() == 64


def test_unknown_tolerance_raises():
    with pytest.raises(KeyError):
        ConfigManager(str(DEFAULT_CONFIG_PATH)).tolerance("nonsense")


def test_service_config_is_a_copy():
    manager = ConfigManager(str(DEFAULT_CONFIG_PATH))
    manager.get_service_config("solver")["restarts"] = 1
    assert manager.get_service_config("solver")["restarts"] == 200
    manager.set_service_config("solver", {"restarts": 3})
    assert manager.get_service_config("solver")["restarts"] == 3


def test_save_config_round_trip(tmp_path):
    manager = ConfigManager(str(DEFAULT_CONFIG_PATH))
    manager.set_tolerance("equality", 1e-9)
    target = tmp_path / "saved.json"
    manager.save_config(str(target))
    assert ConfigManager(str(target)).tolerance("equality") == 1e-9
