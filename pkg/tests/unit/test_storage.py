"""
Unit tests for result files and the return-curve cache.

Tests cover:
- Atomic writes
- CSV dialect with comment lines and exact float round trip
- JSON encoding of non-finite values
- Provenance blocks
- CurveCache hits, misses, corruption and clearing
- Cache headers, version invalidation and profile read-through
"""

import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src import __version__
from src.config.models import CacheSettings
from src.kernels.fourier import FourierQuadrature
from src.kernels.profiles import KernelProfile
from src.storage.artifacts import (
    atomic_write_bytes,
    csv_body,
    csv_text,
    jsonable,
    provenance,
    read_csv,
    read_json,
    write_csv,
    write_json,
)
from src.storage.curve_cache import CurveCache, cache_key


@pytest.fixture
def small_grid() -> np.ndarray:
    """Short linear grid."""
    return np.linspace(0.0, 5.0, 11)


# =============================================================================
# ARTIFACTS
# =============================================================================


class TestAtomicWrite:
    """Tests for atomic_write_bytes."""

    def test_creates_parents(self, tmp_path: Path):
        """Missing parent directories are created."""
        path = atomic_write_bytes(tmp_path / "a" / "b" / "out.bin", b"payload")
        assert path.read_bytes() == b"payload"

    def test_replaces_without_leftovers(self, output_dir: Path):
        """Overwriting leaves only the final file behind."""
        target = output_dir / "out.txt"
        atomic_write_bytes(target, b"first")
        atomic_write_bytes(target, b"second")
        assert target.read_bytes() == b"second"
        assert [p.name for p in output_dir.iterdir()] == ["out.txt"]


class TestCsv:
    """Tests for the CSV dialect."""

    def test_comments_sorted_before_header(self):
        """Comment lines are sorted by key and precede the header."""
        frame = pd.DataFrame({"t": [0.0, 1.0], "p": [1.0, 0.5]})
        text = csv_text(frame, comments={"kappa": 1.5, "kernel": "laplacian:d=1"}, timestamp=False)
        lines = text.splitlines()
        assert lines[0] == "# kappa: 1.5"
        assert lines[1] == "# kernel: laplacian:d=1"
        assert lines[2] == "t,p"

    def test_timestamp_line(self):
        """A written_at comment is added by default."""
        text = csv_text(pd.DataFrame({"x": [1.0]}))
        assert text.startswith("# written_at: ")

    def test_float_round_trip(self, output_dir: Path):
        """Floats survive a write and read exactly."""
        values = [1.0 / 3.0, math.pi * 1e-300, 2.0**0.5 * 1e12, -7.25]
        frame = pd.DataFrame({"x": values})
        path = write_csv(output_dir / "values.csv", frame, comments={"note": "exact"})
        loaded = read_csv(path)
        assert loaded["x"].tolist() == values

    def test_body_identical_across_writes(self, output_dir: Path):
        """Only comment lines differ between two writes of the same table."""
        frame = pd.DataFrame({"t": np.linspace(0.0, 1.0, 5), "p": np.exp(-np.linspace(0, 1, 5))})
        first = write_csv(output_dir / "first.csv", frame)
        second = write_csv(output_dir / "second.csv", frame)
        assert csv_body(first) == csv_body(second)
        assert not csv_body(first).startswith("#")


class TestJson:
    """Tests for JSON documents."""

    def test_jsonable_replaces_non_finite(self):
        """inf, -inf and nan become strings, also inside arrays."""
        data = {
            1: math.inf,
            "array": np.array([1.0, np.nan]),
            "scalar": np.float64(-np.inf),
            "pair": (0.5, 2),
        }
        assert jsonable(data) == {
            "1": "inf",
            "array": [1.0, "nan"],
            "scalar": "-inf",
            "pair": [0.5, 2],
        }

    def test_round_trip(self, output_dir: Path):
        """write_json output parses back with strings for non-finite values."""
        path = write_json(output_dir / "doc.json", {"b": 1.5, "a": [math.inf, 2]})
        assert read_json(path) == {"a": ["inf", 2], "b": 1.5}
        text = path.read_text()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')


class TestProvenance:
    """Tests for the provenance block."""

    def test_fields(self):
        """Provenance echoes the configuration with versions and outputs."""
        block = provenance("lyapunov", {"kappa": 1.0}, 0.25, {"table": "out.csv"})
        assert block["command"] == "lyapunov"
        assert block["config"] == {"kappa": 1.0}
        assert block["version"] == __version__
        assert block["wall_time"] == 0.25
        assert block["outputs"] == {"table": "out.csv"}
        for key in ("written_at", "python", "numpy", "scipy", "pandas"):
            assert block[key]


# =============================================================================
# CURVE CACHE
# =============================================================================


class TestCurveCache:
    """Tests for CurveCache."""

    def test_directory_from_environment(self, tmp_path: Path):
        """SYMBRANCH_CACHE_DIR is used when no directory is given."""
        assert CurveCache().directory == tmp_path / "cache"

    def test_explicit_directory_wins(self, output_dir: Path):
        """An explicit directory overrides the environment."""
        assert CurveCache(output_dir).directory == output_dir

    def test_miss_then_hit(self, output_dir: Path, laplacian_1d, small_grid):
        """The second request is served from disk with identical values."""
        cache = CurveCache(output_dir)
        computed = cache.get_or_compute(laplacian_1d, small_grid)
        loaded = cache.get_or_compute(laplacian_1d, small_grid)
        assert (cache.misses, cache.hits) == (1, 1)
        np.testing.assert_array_equal(loaded.times, computed.times)
        np.testing.assert_array_equal(loaded.values, computed.values)
        assert loaded.tail == computed.tail
        assert loaded.provenance == computed.provenance
        assert loaded.kernel_label == computed.kernel_label

    def test_key_depends_on_request(self, laplacian_1d, laplacian_2d, small_grid):
        """Kernel, grid, tolerance and rate all enter the key."""
        base = cache_key(laplacian_1d, small_grid, 1e-10, 1.0)
        assert base == cache_key(laplacian_1d, small_grid.copy(), 1e-10, 1.0)
        assert base != cache_key(laplacian_2d, small_grid, 1e-10, 1.0)
        assert base != cache_key(laplacian_1d, small_grid * 2.0, 1e-10, 1.0)
        assert base != cache_key(laplacian_1d, small_grid, 1e-8, 1.0)
        assert base != cache_key(laplacian_1d, small_grid, 1e-10, 2.0)

    def test_rate_override_is_a_separate_entry(self, output_dir: Path, laplacian_1d, small_grid):
        """Curves at different total rates do not share an entry."""
        cache = CurveCache(output_dir)
        cache.get_or_compute(laplacian_1d, small_grid)
        doubled = cache.get_or_compute(laplacian_1d, small_grid, total_rate=2.0)
        assert cache.misses == 2
        assert doubled.total_rate == 2.0

    def test_unreadable_entry_is_a_miss(self, output_dir: Path):
        """Corrupt files are ignored."""
        cache = CurveCache(output_dir)
        cache.path_for("broken").write_text("# not json\n1,2\n")
        assert cache.load("broken") is None

    def test_absent_entry(self, output_dir: Path):
        """Unknown keys load as None."""
        assert CurveCache(output_dir).load("missing") is None

    def test_disabled_cache(self, output_dir: Path, laplacian_1d, small_grid):
        """A disabled cache never stores or hits."""
        cache = CurveCache(output_dir, settings=CacheSettings(enabled=False))
        cache.get_or_compute(laplacian_1d, small_grid)
        cache.get_or_compute(laplacian_1d, small_grid)
        assert (cache.misses, cache.hits) == (2, 0)
        assert list(output_dir.iterdir()) == []

    def test_clear(self, output_dir: Path, laplacian_1d, small_grid):
        """clear removes every entry and reports the count."""
        cache = CurveCache(output_dir / "curves")
        assert cache.clear() == 0
        cache.get_or_compute(laplacian_1d, small_grid)
        cache.get_or_compute(laplacian_1d, small_grid, total_rate=2.0)
        assert cache.clear() == 2
        assert list((output_dir / "curves").glob("*.csv")) == []

    def test_header_describes_entry(self, output_dir: Path, laplacian_1d, small_grid):
        """The header carries the version, kernel spec and grid summary."""
        cache = CurveCache(output_dir)
        cache.get_or_compute(laplacian_1d, small_grid)
        (key,) = [path.stem for path in output_dir.glob("*.csv")]
        header = cache.read_header(key)
        assert header["key"] == key
        assert header["version"] == __version__
        assert header["kernel_spec"] == "laplacian:d=1"
        assert header["kernel"]["dimension"] == 1
        assert header["grid"] == {"t_min": 0.0, "t_max": 5.0, "points": 11}

    def test_other_version_is_a_miss(self, output_dir: Path, laplacian_1d, small_grid):
        """Entries written by another version are not served."""
        cache = CurveCache(output_dir)
        cache.get_or_compute(laplacian_1d, small_grid)
        key = cache.key_for(laplacian_1d, small_grid)
        path = cache.path_for(key)
        path.write_text(path.read_text().replace(f'"{__version__}"', '"0.0.0-old"', 1))
        assert cache.read_header(key)["version"] == "0.0.0-old"
        assert cache.load(key) is None
        cache.get_or_compute(laplacian_1d, small_grid)
        assert (cache.misses, cache.hits) == (2, 0)

    def test_version_enters_key(
        self, monkeypatch: pytest.MonkeyPatch, output_dir: Path, laplacian_1d, small_grid
    ):
        """A version bump addresses a fresh entry."""
        cache = CurveCache(output_dir)
        before = cache.key_for(laplacian_1d, small_grid)
        cache.get_or_compute(laplacian_1d, small_grid)
        monkeypatch.setattr("src.storage.curve_cache.__version__", "99.0.0")
        assert cache.key_for(laplacian_1d, small_grid) != before
        cache.get_or_compute(laplacian_1d, small_grid)
        assert (cache.misses, cache.hits) == (2, 0)

    def test_kernel_profiles_read_through_cache(self, output_dir: Path, drifted_kernel):
        """Profiles sharing a cached quadrature sample each curve once."""
        cache = CurveCache(output_dir)
        quad = FourierQuadrature(curves=cache)
        t = np.array([0.5, 2.0])
        first = KernelProfile(drifted_kernel, quad).values(t)
        second = KernelProfile(drifted_kernel, quad).values(t)
        assert (cache.misses, cache.hits) == (1, 1)
        np.testing.assert_array_equal(first, second)
        uncached = KernelProfile(drifted_kernel, FourierQuadrature()).values(t)
        np.testing.assert_array_equal(first, uncached)
