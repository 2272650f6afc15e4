"""
settings.py - Configuration Loading for IRS Radcom Beamforming

Two layers of configuration:
- config.yaml (application settings): logging, algorithm defaults, conic
  solver options, harness defaults and named scenario presets
- scenario documents (JSON or YAML) validated into a SystemConfig

Usage:
    config = load_config()
    setup_logging(config)
    cfg = load_system_config(Path("scenario.json"), config=config, preset="outage")
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import ValidationError

from models import ConfigError, SystemConfig

logger = logging.getLogger(__name__)


DEFAULT_CONFIG: Dict[str, Any] = {
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    },
    "penalty": {},
    "sdr": {},
    "conic": {
        "backend": "interior_point",
        "max_iters": 200,
        "feastol": 1e-8,
        "abstol": 1e-10,
        "reltol": 1e-8,
        "step_fraction": 0.99,
    },
    "harness": {
        "threads": None,
        "sweep_trials": 20,
        "outage_trials": 200,
        "max_restarts": 3,
        "out_dir": "results",
        "beampattern_eps": [0.1, 10.0, float("inf")],
        "grid_step_deg": 1.0,
    },
    "presets": {
        "default": {},
        "outage": {"irs_x": 20.0, "cross_corr_limit": 1.0},
    },
}


# =============================================================================
# CONFIG LOADER
# =============================================================================


def load_config(config_path: Optional[Path] = None) -> Dict[str, Any]:
    """
    Load application settings from config.yaml.

    Args:
        config_path: Path to config file (default: config.yaml next to this module)

    Returns:
        Configuration dictionary; sections missing from the file fall back
        to DEFAULT_CONFIG
    """
    if config_path is None:
        config_path = Path(__file__).parent / "config.yaml"

    if not config_path.exists():
        logger.warning(f"Config file not found at {config_path}, using defaults")
        return {key: dict(value) for key, value in DEFAULT_CONFIG.items()}

    with open(config_path, encoding="utf-8") as f:
        loaded = yaml.safe_load(f) or {}

    merged = {key: dict(value) for key, value in DEFAULT_CONFIG.items()}
    for key, value in loaded.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key].update(value)
        else:
            merged[key] = value
    return merged


def setup_logging(config: Optional[Dict[str, Any]] = None, verbose: bool = False) -> None:
    """Configure the root logger from the `logging` section."""
    if config is None:
        config = load_config()
    log_config = config.get("logging", {})
    level_name = "DEBUG" if verbose else str(log_config.get("level", "INFO")).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=log_config.get("format", DEFAULT_CONFIG["logging"]["format"]),
        force=True,
    )


# =============================================================================
# SCENARIO LOADING
# =============================================================================


def read_scenario_document(path: Path) -> Dict[str, Any]:
    """Read a JSON or YAML scenario document into a dict."""
    if not path.exists():
        raise ConfigError(f"Scenario file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Cannot parse scenario file {path}: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"Scenario file {path} must contain a mapping")
    return data


def build_system_config(
    overrides: Optional[Dict[str, Any]] = None,
    config: Optional[Dict[str, Any]] = None,
    preset: Optional[str] = None,
) -> SystemConfig:
    """
    Assemble a SystemConfig from algorithm defaults, a preset and overrides.

    Precedence (lowest to highest): config.yaml `penalty`/`sdr` sections,
    the named preset, the explicit overrides.
    """
    if config is None:
        config = load_config()

    data: Dict[str, Any] = {}
    if config.get("penalty"):
        data["penalty"] = dict(config["penalty"])
    if config.get("sdr"):
        data["sdr"] = dict(config["sdr"])

    if preset is not None:
        presets = config.get("presets", {})
        if preset not in presets:
            raise ConfigError(f"Unknown preset: {preset}. Available: {list(presets.keys())}")
        data.update(presets[preset] or {})

    for key, value in (overrides or {}).items():
        if key in ("penalty", "sdr") and isinstance(value, dict):
            data[key] = {**data.get(key, {}), **value}
        else:
            data[key] = value

    try:
        return SystemConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario configuration:\n{e}") from e


def load_system_config(
    path: Optional[Path] = None,
    config: Optional[Dict[str, Any]] = None,
    preset: Optional[str] = None,
    seed: Optional[int] = None,
) -> SystemConfig:
    """Load a scenario file (optional) on top of defaults and a preset."""
    overrides = read_scenario_document(path) if path is not None else {}
    if seed is not None:
        overrides["seed"] = seed
    cfg = build_system_config(overrides, config=config, preset=preset)
    logger.debug(f"Scenario loaded: M={cfg.n_irs}, K={cfg.n_users}, d_x={cfg.irs_x}")
    return cfg
