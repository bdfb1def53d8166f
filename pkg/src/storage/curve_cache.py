"""
On-disk cache of sampled return curves.

Entries are keyed by the SHA-256 of (kernel description, grid, tolerance,
rate, library version). Each file starts with one ``# {json}`` header line
carrying the curve's metadata, the grid summary and the version that wrote
it, followed by a ``t,p`` CSV body in the artifact dialect.

Example:
    >>> cache = CurveCache("/tmp/curves")
    >>> curve = cache.get_or_compute(kernel, grid)      # computes and stores
    >>> curve = cache.get_or_compute(kernel, grid)      # read from disk
"""

import hashlib
import os
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import orjson
import pandas as pd
from pydantic import ValidationError
import structlog

from src import __version__
from src.config.models import CacheSettings
from src.interfaces.curve_store import CurveStore
from src.kernels.curves import return_curve
from src.kernels.fourier import FourierQuadrature
from src.models.kernel import CurveProvenance, Kernel, ReturnCurve, TailCoefficients
from src.storage.artifacts import atomic_write_bytes, csv_text, dumps_json

logger = structlog.get_logger(__name__)

CACHE_ENV = "SYMBRANCH_CACHE_DIR"
HEADER_PREFIX = "# "


def cache_key(kernel: Kernel, grid: np.ndarray, tolerance: float, total_rate: float) -> str:
    """SHA-256 hex digest identifying a (kernel, grid, tolerance, rate, version) request."""
    payload = orjson.dumps(
        {
            "kernel": kernel.describe(),
            "offsets": [list(o) for o in kernel.offsets],
            "rates": list(kernel.rates),
            "grid": np.asarray(grid, dtype=np.float64),
            "tolerance": tolerance,
            "total_rate": total_rate,
            "version": __version__,
        },
        option=orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
    )
    return hashlib.sha256(payload).hexdigest()


def grid_summary(grid: np.ndarray) -> Dict[str, Any]:
    """t_min, t_max and point count of a time grid."""
    grid = np.asarray(grid, dtype=np.float64)
    return {"t_min": float(grid[0]), "t_max": float(grid[-1]), "points": int(grid.size)}


class CurveCache(CurveStore):
    """
    Directory of cached ReturnCurves.

    The directory is, in order of precedence, the explicit argument, the
    SYMBRANCH_CACHE_DIR environment variable, then CacheSettings.directory.
    Entries written by another library version are misses.

    Attributes:
        directory: Cache directory (created on first write).
        enabled: When False every lookup misses and nothing is written.
    """

    def __init__(
        self,
        directory: Optional[Path | str] = None,
        settings: Optional[CacheSettings] = None,
    ):
        settings = settings or CacheSettings()
        chosen = directory or os.getenv(CACHE_ENV) or settings.directory
        self.directory = Path(chosen)
        self.enabled = settings.enabled
        self.hits = 0
        self.misses = 0

    def path_for(self, key: str) -> Path:
        """File path of a cache key."""
        return self.directory / f"{key}.csv"

    def read_header(self, key: str) -> Optional[Dict[str, Any]]:
        """Header of an entry, or None if it is absent."""
        path = self.path_for(key)
        if not path.exists():
            return None
        with path.open("r", encoding="utf-8") as handle:
            return orjson.loads(handle.readline()[len(HEADER_PREFIX) :])

    def load(self, key: str) -> Optional[ReturnCurve]:
        """
        Read an entry.

        Returns:
            The cached curve, or None if absent, unreadable or written by
            another version. Unreadable entries are logged and treated as misses.
        """
        path = self.path_for(key)
        if not self.enabled or not path.exists():
            return None
        try:
            header = self.read_header(key)
            if header is None:
                return None
            if header.get("version") != __version__:
                logger.info(
                    "curve_cache_stale",
                    path=str(path),
                    version=header.get("version"),
                    expected=__version__,
                )
                return None
            body = pd.read_csv(path, comment="#", float_precision="round_trip")
            tail = header.get("tail")
            return ReturnCurve(
                times=body["t"].to_numpy(dtype=np.float64),
                values=body["p"].to_numpy(dtype=np.float64),
                tail=TailCoefficients.model_validate(tail) if tail else None,
                provenance=CurveProvenance(header["provenance"]),
                kernel_label=header["kernel_label"],
                total_rate=header["total_rate"],
                tolerance=header["tolerance"],
            )
        except (OSError, ValueError, KeyError, ValidationError, orjson.JSONDecodeError) as e:
            logger.warning("curve_cache_unreadable", path=str(path), error=str(e))
            return None

    def store(
        self, key: str, curve: ReturnCurve, kernel: Optional[Kernel] = None
    ) -> Optional[Path]:
        """Write an entry atomically; returns its path, or None if disabled."""
        if not self.enabled:
            return None
        header = {
            "key": key,
            "version": __version__,
            "kernel_spec": kernel.label() if kernel is not None else curve.kernel_label,
            "kernel": kernel.describe() if kernel is not None else None,
            "kernel_label": curve.kernel_label,
            "grid": grid_summary(curve.times),
            "provenance": curve.provenance.value,
            "total_rate": curve.total_rate,
            "tolerance": curve.tolerance,
            "tail": curve.tail.model_dump(mode="json") if curve.tail else None,
        }
        line = HEADER_PREFIX + dumps_json(header).decode().replace("\n", "") + "\n"
        frame = pd.DataFrame({"t": curve.times, "p": curve.values})
        text = line + csv_text(frame, timestamp=False)
        path = atomic_write_bytes(self.path_for(key), text.encode("utf-8"))
        logger.debug("curve_cached", path=str(path), points=len(frame))
        return path

    def key_for(
        self,
        kernel: Kernel,
        grid: np.ndarray,
        quadrature: Optional[FourierQuadrature] = None,
        total_rate: Optional[float] = None,
    ) -> str:
        """Cache key of a request, resolving the default rate and tolerance."""
        quadrature = quadrature or FourierQuadrature()
        rate = kernel.total_rate if total_rate is None else total_rate
        tolerance = quadrature.settings.tolerance_for(kernel.dimension)
        return cache_key(kernel, grid, tolerance, rate)

    def get_or_compute(
        self,
        kernel: Kernel,
        grid: np.ndarray,
        quadrature: Optional[FourierQuadrature] = None,
        total_rate: Optional[float] = None,
    ) -> ReturnCurve:
        """Cached return_curve: read the entry if present, otherwise compute and store it."""
        quadrature = quadrature or FourierQuadrature()
        rate = kernel.total_rate if total_rate is None else total_rate
        key = self.key_for(kernel, grid, quadrature, rate)
        cached = self.load(key)
        if cached is not None:
            self.hits += 1
            logger.debug("curve_cache_hit", kernel=kernel.label(), key=key[:12])
            return cached
        self.misses += 1
        curve = return_curve(kernel, grid, quadrature, rate)
        self.store(key, curve, kernel)
        return curve

    def clear(self) -> int:
        """Delete all entries; returns how many were removed."""
        if not self.directory.exists():
            return 0
        removed = 0
        for path in self.directory.glob("*.csv"):
            path.unlink()
            removed += 1
        logger.info("curve_cache_cleared", directory=str(self.directory), removed=removed)
        return removed
