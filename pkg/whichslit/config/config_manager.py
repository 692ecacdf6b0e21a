"""
Configuration manager for whichslit.
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import dotenv

# Load environment variables from .env file
dotenv.load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).parent / "default_config.json"

# Environment variables that override single settings
TOLERANCE_ENV_VAR = "WHICHSLIT_TOL"
MAX_DIM_ENV_VAR = "WHICHSLIT_MAX_DIM"


def _update_nested_dict(base: Dict[str, Any], updates: Dict[str, Any]) -> Dict[str, Any]:
    """Merge ``updates`` into ``base`` recursively and return ``base``."""
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _update_nested_dict(base[key], value)
        else:
            base[key] = value
    return base


class ConfigManager:
    """Configuration manager for whichslit."""

    def __init__(self, config_file: Optional[str] = None):
        """
        Initialize the configuration manager.

        Args:
            config_file: Path to the configuration file. If None, the file is looked up
                in the current directory, then in ``~/.whichslit``, and finally the
                packaged defaults are used.
        """
        if config_file:
            self.config_file = Path(config_file)
        elif os.path.exists("whichslit_config.json"):
            self.config_file = Path("whichslit_config.json")
        elif os.path.exists(os.path.expanduser("~/.whichslit/config.json")):
            self.config_file = Path(os.path.expanduser("~/.whichslit/config.json"))
        else:
            self.config_file = DEFAULT_CONFIG_PATH

        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """
        Load the packaged defaults and merge the user file over them.

        Returns:
            Configuration dictionary.
        """
        with open(DEFAULT_CONFIG_PATH, "r", encoding="utf-8") as f:
            merged = json.load(f)

        if self.config_file == DEFAULT_CONFIG_PATH:
            return merged

        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                user_config = json.load(f)
        except FileNotFoundError:
            logger.warning("Config file %s not found, using defaults", self.config_file)
            return merged
        except json.JSONDecodeError as e:
            logger.warning("Config file %s is not valid JSON (%s), using defaults", self.config_file, e)
            return merged

        return _update_nested_dict(merged, user_config)

    def save_config(self, path: Optional[str] = None):
        """Save configuration to ``path`` (or the file it was loaded from)."""
        target = Path(path) if path else self.config_file
        if target == DEFAULT_CONFIG_PATH:
            target = Path(os.path.expanduser("~/.whichslit/config.json"))
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(self.config, f, indent=2)
        self.config_file = target

    def get_service_config(self, service: str) -> Dict[str, Any]:
        """
        Get configuration for a service.

        Args:
            service: Service name (``solver``, ``screen``, ``sampler`` or ``cache``).

        Returns:
            A copy of the service configuration dictionary.
        """
        return copy.deepcopy(self.config.get("services", {}).get(service, {}))

    def set_service_config(self, service: str, values: Dict[str, Any]):
        """
        Update configuration for a service in memory.

        Args:
            service: Service name.
            values: Keys to override.
        """
        self.config.setdefault("services", {}).setdefault(service, {}).update(values)

    def tolerance(self, name: str) -> float:
        """
        Get a numeric tolerance.

        The equality tolerance can be overridden through ``WHICHSLIT_TOL``.

        Args:
            name: Tolerance name, e.g. ``"idempotence"`` or ``"nonzero"``.

        Returns:
            The tolerance value.
        """
        if name == "equality":
            override = os.environ.get(TOLERANCE_ENV_VAR)
            if override:
                try:
                    return float(override)
                except ValueError:
                    logger.warning("Ignoring non-numeric %s=%r", TOLERANCE_ENV_VAR, override)
        tolerances = self.config.get("tolerances", {})
        if name not in tolerances:
            raise KeyError(f"Unknown tolerance: {name}")
        return float(tolerances[name])

    def set_tolerance(self, name: str, value: float):
        """Override a tolerance for the rest of the process."""
        self.config.setdefault("tolerances", {})[name] = float(value)

    def max_dimension(self) -> int:
        """Largest matrix side that dense algebra is allowed to build."""
        override = os.environ.get(MAX_DIM_ENV_VAR)
        if override and override.isdigit():
            return int(override)
        return int(self.config.get("limits", {}).get("max_dimension", 4096))

    @property
    def schema_version(self) -> str:
        return str(self.config.get("schema_version", "1.0"))
