"""
test_settings.py - Tests for config.yaml loading and scenario assembly
"""

import json
import logging
import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from models import ConfigError
from settings import (
    DEFAULT_CONFIG,
    build_system_config,
    load_config,
    load_system_config,
    read_scenario_document,
    setup_logging,
)


# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture
def scenario_json(tmp_path: Path) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(
        json.dumps({"n_irs": 25, "sinr_user_db": 15, "cross_corr_limit": None}),
        encoding="utf-8",
    )
    return path


# =============================================================================
# CONFIG LOADER TESTS
# =============================================================================


class TestLoadConfig:
    """Tests for load_config."""

    def test_repository_config(self):
        config = load_config()

        assert config["conic"]["backend"] == "interior_point"
        assert config["harness"]["sweep_trials"] == 20
        assert config["harness"]["outage_trials"] == 200
        assert math.isinf(config["harness"]["beampattern_eps"][-1])
        assert "outage" in config["presets"]

    def test_missing_file_uses_defaults(self, tmp_path):
        config = load_config(tmp_path / "missing.yaml")
        assert config["conic"] == DEFAULT_CONFIG["conic"]

    def test_partial_file_is_merged(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("conic:\n  max_iters: 50\n", encoding="utf-8")

        config = load_config(path)

        assert config["conic"]["max_iters"] == 50
        assert config["conic"]["feastol"] == 1e-8
        assert config["harness"]["max_restarts"] == 3

    def test_defaults_not_mutated(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("harness:\n  sweep_trials: 2\n", encoding="utf-8")
        load_config(path)
        assert DEFAULT_CONFIG["harness"]["sweep_trials"] == 20

    def test_setup_logging_verbose(self):
        setup_logging({"logging": {"level": "WARNING"}}, verbose=True)
        assert logging.getLogger().level == logging.DEBUG
        setup_logging({"logging": {"level": "WARNING"}})
        assert logging.getLogger().level == logging.WARNING


# =============================================================================
# SCENARIO TESTS
# =============================================================================


class TestScenarioLoading:
    """Tests for scenario documents and presets."""

    def test_read_json_document(self, scenario_json):
        data = read_scenario_document(scenario_json)
        assert data["n_irs"] == 25

    def test_read_yaml_document(self, tmp_path):
        path = tmp_path / "scenario.yaml"
        path.write_text("n_irs: 30\ncross_corr_limit: inf\n", encoding="utf-8")
        data = read_scenario_document(path)
        assert data["n_irs"] == 30

    def test_missing_document(self, tmp_path):
        with pytest.raises(ConfigError):
            read_scenario_document(tmp_path / "nope.json")

    def test_non_mapping_document(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_scenario_document(path)

    def test_empty_document(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("", encoding="utf-8")
        assert read_scenario_document(path) == {}

    def test_load_system_config(self, scenario_json):
        cfg = load_system_config(scenario_json, config=DEFAULT_CONFIG, seed=11)

        assert cfg.n_irs == 25
        assert cfg.sinr_user_db == [15.0] * 5
        assert not cfg.xcorr_active
        assert cfg.seed == 11

    def test_preset_applied_before_overrides(self):
        cfg = build_system_config({"irs_x": 35.0}, config=DEFAULT_CONFIG, preset="outage")
        assert cfg.irs_x == 35.0
        assert cfg.cross_corr_limit == 1.0

    def test_outage_preset(self):
        cfg = build_system_config(config=DEFAULT_CONFIG, preset="outage")
        assert cfg.irs_x == 20.0
        assert cfg.xcorr_active

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            build_system_config(config=DEFAULT_CONFIG, preset="figure99")

    def test_invalid_scenario_wrapped(self):
        with pytest.raises(ConfigError):
            build_system_config({"n_users": 0}, config=DEFAULT_CONFIG)

    def test_algorithm_sections_merged(self):
        config = {**DEFAULT_CONFIG, "penalty": {"rho0": 50.0}}
        cfg = build_system_config({"penalty": {"max_outer": 10}}, config=config)
        assert cfg.penalty.rho0 == 50.0
        assert cfg.penalty.max_outer == 10
