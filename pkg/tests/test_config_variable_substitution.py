"""
Tests for variable substitution in configuration management.
"""

import os

import pytest

from ratnet.config import EnvironmentConfig, load_config
from ratnet.config.config import _get_builtin_variable, _substitute_config_values, substitute_variables
from ratnet.exceptions import ConfigError


def test_builtin_variables():
    """Test built-in variable functionality."""
    today_value = _get_builtin_variable('today')
    assert isinstance(today_value, str)
    # YYYY-MM-DD
    assert len(today_value) == 10
    assert today_value.count('-') == 2

    assert _get_builtin_variable('cwd') == os.getcwd()
    assert _get_builtin_variable('nonexistent') is None


def test_substitute_variables_environment(monkeypatch):
    monkeypatch.setenv('RATNET_TEST_VAR', 'test_value')
    assert substitute_variables("Value is ${RATNET_TEST_VAR}") == "Value is test_value"
    assert substitute_variables("Prefix ${RATNET_TEST_VAR} suffix") == "Prefix test_value suffix"


def test_substitute_variables_priority(monkeypatch):
    """Environment variables win over built-ins."""
    monkeypatch.setenv('today', '2023-01-01')
    assert substitute_variables("Date: ${today}") == "Date: 2023-01-01"


def test_substitute_variables_missing():
    assert substitute_variables("Missing: ${RATNET_MISSING_VAR}") == "Missing: "
    assert substitute_variables("Missing: ${RATNET_MISSING1} and ${RATNET_MISSING2}") == "Missing:  and "


def test_substitute_variables_default_value(monkeypatch):
    monkeypatch.delenv('RATNET_LR', raising=False)
    assert substitute_variables("${RATNET_LR|0.001}") == "0.001"
    monkeypatch.setenv('RATNET_LR', '0.5')
    assert substitute_variables("${RATNET_LR|0.001}") == "0.5"


def test_default_value_may_contain_pipes():
    assert substitute_variables("${RATNET_MISSING_VAR|a|b}") == "a|b"


def test_substitute_variables_non_string():
    assert substitute_variables(123) == 123
    assert substitute_variables(None) is None
    assert substitute_variables(1.5) == 1.5


def test_empty_substitution_is_dropped():
    """Values that substitute to nothing are removed so model defaults apply."""
    assert substitute_variables("${RATNET_MISSING_VAR}") is None
    assert substitute_variables("${}") is None
    assert _substitute_config_values({"training": {"lr": "${RATNET_MISSING_VAR}", "batch": 8}}) == {"training": {"batch": 8}}


def test_substitute_nested_values(monkeypatch):
    monkeypatch.setenv('RATNET_MODEL', 'rbf:16')
    data = {"model": "${RATNET_MODEL}", "sweep": ["${RATNET_MODEL}", "mlp:[64,tanh]"], "training": {"seed": 7}}
    assert _substitute_config_values(data) == {
        "model": "rbf:16",
        "sweep": ["rbf:16", "mlp:[64,tanh]"],
        "training": {"seed": 7},
    }


def test_env_file_values(tmp_path, monkeypatch):
    monkeypatch.delenv('RATNET_FROM_DOTENV', raising=False)
    env_file = tmp_path / ".env"
    env_file.write_text("RATNET_FROM_DOTENV=loaded\n")
    env_config = EnvironmentConfig(str(env_file))
    try:
        assert env_config.get('RATNET_FROM_DOTENV') == "loaded"
        assert substitute_variables("${RATNET_FROM_DOTENV}", env_config) == "loaded"
    finally:
        os.environ.pop('RATNET_FROM_DOTENV', None)


def test_config_path_from_environment(monkeypatch):
    monkeypatch.setenv('RATNET_CONFIG', '/tmp/other.yaml')
    assert EnvironmentConfig("absent.env").get_config_path() == '/tmp/other.yaml'
    monkeypatch.delenv('RATNET_CONFIG')
    assert EnvironmentConfig("absent.env").get_config_path() == 'config.yaml'


class TestLoadConfigSubstitution:
    """Substitution applied while loading YAML."""

    def test_numbers_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv('RATNET_BATCH', '128')
        path = tmp_path / "config.yaml"
        path.write_text("training:\n  batch: ${RATNET_BATCH|64}\n  lr: ${RATNET_UNSET_LR|0.01}\n")
        config = load_config(str(path))
        assert config.training.batch == 128
        assert config.training.lr == 0.01

    def test_unset_values_fall_back_to_defaults(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text('model: "${RATNET_UNSET_MODEL}"\ndata:\n  train: "${RATNET_UNSET_TRAIN}"\n')
        config = load_config(str(path))
        assert config.model is None
        assert config.data.train is None

    def test_cwd_builtin(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        path = tmp_path / "config.yaml"
        path.write_text('data:\n  train: "${cwd}/train.csv"\n')
        assert load_config(str(path)).data.train == f"{tmp_path}/train.csv"

    def test_invalid_substituted_value(self, tmp_path, monkeypatch):
        monkeypatch.setenv('RATNET_BATCH', 'many')
        path = tmp_path / "config.yaml"
        path.write_text("training:\n  batch: ${RATNET_BATCH|64}\n")
        with pytest.raises(ConfigError) as excinfo:
            load_config(str(path))
        assert excinfo.value.exit_code == 2
