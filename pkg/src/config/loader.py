"""
Configuration loader for YAML-based numerical settings.

This module loads config/numerics.yaml and validates it into LabSettings.
Errors are reported as ConfigLoadError with the offending file attached.

Configuration files expected:
    - config/numerics.yaml: numerical defaults per module

Environment variables override:
    - CONFIG_PATH: configuration directory (default: config)
    - LOG_LEVEL: application log level
    - SYMBRANCH_CACHE_DIR: return-curve cache directory

Example:
    >>> from src.config.loader import load_settings
    >>> settings = load_settings("config")
    >>> settings.volterra.max_kappa_step
    0.01
"""

import os
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError
import structlog
import yaml

from src.config.models import LabSettings

logger = structlog.get_logger(__name__)

SETTINGS_FILE = "numerics.yaml"


class ConfigLoadError(Exception):
    """
    Raised when configuration loading fails.

    Attributes:
        message: Error message describing what went wrong.
        file_path: Path to the file that caused the error, if applicable.
        cause: Original exception that caused the error, if any.
    """

    def __init__(
        self,
        message: str,
        file_path: Optional[Path] = None,
        cause: Optional[Exception] = None,
    ):
        self.message = message
        self.file_path = file_path
        self.cause = cause
        super().__init__(message)


class ConfigLoader:
    """
    Loads and validates numerical settings from YAML files.

    Expects the following directory structure:
        config/
        └── numerics.yaml  - quadrature, solver, sampling and logging defaults

    Example:
        >>> loader = ConfigLoader("config")
        >>> settings = loader.load()
        >>> settings.aging.exact_crossover
        10000.0
    """

    def __init__(self, config_dir: Path | str = "config"):
        """
        Initialize config loader.

        Args:
            config_dir: Path to configuration directory (default: 'config').

        Raises:
            ConfigLoadError: If config directory does not exist.
        """
        self.config_dir = Path(config_dir)
        if not self.config_dir.exists():
            raise ConfigLoadError(
                f"Configuration directory not found: {self.config_dir}",
                file_path=self.config_dir,
            )
        if not self.config_dir.is_dir():
            raise ConfigLoadError(
                f"Configuration path is not a directory: {self.config_dir}",
                file_path=self.config_dir,
            )

    def _load_yaml(self, filename: str) -> Dict[str, Any]:
        """
        Load a YAML file from the config directory.

        Raises:
            ConfigLoadError: If file not found, empty, or invalid YAML.
        """
        file_path = self.config_dir / filename
        if not file_path.exists():
            raise ConfigLoadError(
                f"Configuration file not found: {file_path}",
                file_path=file_path,
            )

        try:
            with file_path.open("r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigLoadError(
                f"Invalid YAML syntax in {file_path}: {e}",
                file_path=file_path,
                cause=e,
            ) from e
        except OSError as e:
            raise ConfigLoadError(
                f"Error reading {file_path}: {e}",
                file_path=file_path,
                cause=e,
            ) from e

        if data is None:
            raise ConfigLoadError(
                f"Configuration file is empty: {file_path}",
                file_path=file_path,
            )
        if not isinstance(data, dict):
            raise ConfigLoadError(
                f"Configuration root must be a mapping: {file_path}",
                file_path=file_path,
            )
        return data

    @staticmethod
    def _apply_env_overrides(data: Dict[str, Any]) -> Dict[str, Any]:
        """Overlay LOG_LEVEL and SYMBRANCH_CACHE_DIR onto raw settings."""
        merged = {
            key: dict(value) if isinstance(value, dict) else value for key, value in data.items()
        }

        log_level = os.getenv("LOG_LEVEL")
        if log_level:
            merged.setdefault("logging", {})["level"] = log_level.upper()

        cache_dir = os.getenv("SYMBRANCH_CACHE_DIR")
        if cache_dir:
            merged.setdefault("cache", {})["directory"] = cache_dir

        return merged

    def load(self) -> LabSettings:
        """
        Load and validate all settings.

        Returns:
            LabSettings: Validated settings with environment overrides applied.

        Raises:
            ConfigLoadError: If the file is missing or fails validation.
        """
        data = self._apply_env_overrides(self._load_yaml(SETTINGS_FILE))
        try:
            settings = LabSettings.model_validate(data)
        except ValidationError as e:
            raise ConfigLoadError(
                f"Invalid numerical configuration: {e}",
                file_path=self.config_dir / SETTINGS_FILE,
                cause=e,
            ) from e

        logger.debug("settings_loaded", config_dir=str(self.config_dir))
        return settings


def load_settings(config_dir: Optional[Path | str] = None) -> LabSettings:
    """
    Convenience function to load numerical settings.

    Falls back to built-in defaults (with environment overrides) when the
    configuration directory does not exist, so the CLI works outside a
    checkout.

    Args:
        config_dir: Configuration directory (default: $CONFIG_PATH or 'config').

    Returns:
        LabSettings: Validated settings.

    Raises:
        ConfigLoadError: If an existing configuration is invalid.
    """
    directory = Path(config_dir if config_dir is not None else os.getenv("CONFIG_PATH", "config"))
    if not directory.exists():
        logger.debug("settings_defaults_used", config_dir=str(directory))
        try:
            return LabSettings.model_validate(ConfigLoader._apply_env_overrides({}))
        except ValidationError as e:
            raise ConfigLoadError(
                f"Invalid environment override: {e}",
                cause=e,
            ) from e
    return ConfigLoader(directory).load()
