"""
Unit tests for configuration loading.

Tests cover:
- Loading config/numerics.yaml into LabSettings
- Environment overrides (LOG_LEVEL, SYMBRANCH_CACHE_DIR, CONFIG_PATH)
- ConfigLoadError for missing, empty and invalid files
- Cross-field validation of LabSettings
"""

from pathlib import Path

from pydantic import ValidationError
import pytest
import yaml

from src.config.loader import ConfigLoader, ConfigLoadError, load_settings
from src.config.models import LabSettings, LogFormat, LogLevel, QuadratureSettings

REPO_CONFIG = Path(__file__).resolve().parents[2] / "config"


def write_settings(directory: Path, data: object) -> Path:
    """Write numerics.yaml into ``directory``."""
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "numerics.yaml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


# =============================================================================
# LOADER
# =============================================================================


class TestConfigLoader:
    """Tests for ConfigLoader."""

    def test_repository_settings_load(self):
        """The shipped numerics.yaml validates and matches the model defaults."""
        settings = ConfigLoader(REPO_CONFIG).load()
        defaults = LabSettings()
        assert settings.quadrature == defaults.quadrature
        assert settings.volterra == defaults.volterra
        assert settings.aging.exact_crossover == 1e4
        assert settings.montecarlo.batch_size == 500

    def test_missing_directory(self, tmp_path: Path):
        """A missing directory raises ConfigLoadError."""
        with pytest.raises(ConfigLoadError, match="not found"):
            ConfigLoader(tmp_path / "absent")

    def test_path_is_not_a_directory(self, tmp_path: Path):
        """A file in place of the directory is rejected."""
        path = tmp_path / "file"
        path.write_text("x")
        with pytest.raises(ConfigLoadError, match="not a directory"):
            ConfigLoader(path)

    def test_missing_file(self, tmp_path: Path):
        """A directory without numerics.yaml raises on load."""
        with pytest.raises(ConfigLoadError, match="not found") as excinfo:
            ConfigLoader(tmp_path).load()
        assert excinfo.value.file_path == tmp_path / "numerics.yaml"

    def test_empty_file(self, tmp_path: Path):
        """An empty file is reported."""
        (tmp_path / "numerics.yaml").write_text("")
        with pytest.raises(ConfigLoadError, match="empty"):
            ConfigLoader(tmp_path).load()

    def test_invalid_yaml(self, tmp_path: Path):
        """YAML syntax errors carry their cause."""
        (tmp_path / "numerics.yaml").write_text("quadrature: [unclosed\n")
        with pytest.raises(ConfigLoadError, match="Invalid YAML") as excinfo:
            ConfigLoader(tmp_path).load()
        assert isinstance(excinfo.value.cause, yaml.YAMLError)

    def test_non_mapping_root(self, tmp_path: Path):
        """The root must be a mapping."""
        write_settings(tmp_path, [1, 2, 3])
        with pytest.raises(ConfigLoadError, match="mapping"):
            ConfigLoader(tmp_path).load()

    def test_unknown_key_rejected(self, tmp_path: Path):
        """Misspelt keys fail validation."""
        write_settings(tmp_path, {"quadrature": {"abs_tol_lowdim": 1e-9}})
        with pytest.raises(ConfigLoadError, match="Invalid numerical configuration"):
            ConfigLoader(tmp_path).load()

    def test_partial_file_uses_defaults(self, tmp_path: Path):
        """Omitted sections fall back to defaults."""
        write_settings(tmp_path, {"volterra": {"richardson": False}})
        settings = ConfigLoader(tmp_path).load()
        assert settings.volterra.richardson is False
        assert settings.lyapunov.rel_tol == 1e-10


# =============================================================================
# ENVIRONMENT
# =============================================================================


class TestEnvironmentOverrides:
    """Tests for environment variable overrides."""

    def test_log_level_override(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
        """LOG_LEVEL wins over the file and is upper-cased."""
        write_settings(tmp_path, {"logging": {"level": "ERROR", "format": "text"}})
        monkeypatch.setenv("LOG_LEVEL", "debug")
        settings = ConfigLoader(tmp_path).load()
        assert settings.logging.level == LogLevel.DEBUG
        assert settings.logging.format == LogFormat.TEXT

    def test_cache_dir_override(self, tmp_path: Path):
        """SYMBRANCH_CACHE_DIR replaces the cache directory."""
        write_settings(tmp_path / "cfg", {"cache": {"directory": "elsewhere"}})
        settings = ConfigLoader(tmp_path / "cfg").load()
        assert settings.cache.directory == str(tmp_path / "cache")

    def test_invalid_log_level(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
        """Unknown levels from the environment fail validation."""
        write_settings(tmp_path, {"volterra": {"richardson": True}})
        monkeypatch.setenv("LOG_LEVEL", "chatty")
        with pytest.raises(ConfigLoadError):
            ConfigLoader(tmp_path).load()

    def test_defaults_when_directory_missing(self, tmp_path: Path):
        """load_settings falls back to defaults outside a checkout."""
        settings = load_settings(tmp_path / "absent")
        assert settings.volterra == LabSettings().volterra
        assert settings.cache.directory == str(tmp_path / "cache")

    def test_config_path_variable(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch):
        """CONFIG_PATH selects the directory when none is given."""
        write_settings(tmp_path / "cfg", {"aging": {"gauss_order": 8}})
        monkeypatch.setenv("CONFIG_PATH", str(tmp_path / "cfg"))
        assert load_settings().aging.gauss_order == 8


# =============================================================================
# MODELS
# =============================================================================


class TestLabSettings:
    """Tests for settings models."""

    def test_tolerance_by_dimension(self):
        """Low-dimensional kernels use the tighter tolerance."""
        quadrature = QuadratureSettings()
        assert quadrature.tolerance_for(1) == 1e-10
        assert quadrature.tolerance_for(2) == 1e-10
        assert quadrature.tolerance_for(3) == 1e-8

    def test_tolerance_ordering(self):
        """The 3-d tolerance may not be tighter than the low-dimensional one."""
        with pytest.raises(ValidationError, match="abs_tol_3d"):
            LabSettings(quadrature=QuadratureSettings(abs_tol_low_dim=1e-6, abs_tol_3d=1e-9))

    def test_frozen(self):
        """Settings are immutable."""
        settings = LabSettings()
        with pytest.raises(ValidationError):
            settings.volterra.min_steps = 5
