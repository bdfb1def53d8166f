"""
Configuration management for the symbiotic branching lab.

Numerical defaults live in config/numerics.yaml and are validated by
Pydantic models. Each numerical component accepts its own settings section,
so library code never reads files implicitly; only the CLI loads YAML.

Environment variables can override:
    - CONFIG_PATH: configuration directory
    - LOG_LEVEL: application log level
    - SYMBRANCH_CACHE_DIR: return-curve cache directory

Example:
    >>> from src.config import load_settings
    >>> settings = load_settings()
    >>> settings.lyapunov.rel_tol
    1e-10

Modules:
    loader: Configuration file loading utilities
    models: Pydantic models for configuration validation
"""

from src.config.loader import ConfigLoadError, ConfigLoader, load_settings
from src.config.models import (
    AgingSettings,
    CacheSettings,
    LabSettings,
    LogFormat,
    LoggingConfig,
    LogLevel,
    LyapunovSettings,
    MonteCarloSettings,
    QuadratureSettings,
    VolterraSettings,
)

__all__: list[str] = [
    # Loader
    "load_settings",
    "ConfigLoader",
    "ConfigLoadError",
    # Enums
    "LogFormat",
    "LogLevel",
    # Sections
    "QuadratureSettings",
    "VolterraSettings",
    "LyapunovSettings",
    "AgingSettings",
    "MonteCarloSettings",
    "CacheSettings",
    "LoggingConfig",
    # Root config
    "LabSettings",
]
