"""
Persistence for the symbiotic branching lab.

This module provides the on-disk return-curve cache and the writers for
result tables, JSON documents and run provenance.

Components:
    curve_cache: CurveCache keyed by SHA-256 of (kernel, grid, tolerance)
    artifacts: Atomic CSV/JSON writers and the provenance block
"""

from src.storage.artifacts import (
    atomic_write_bytes,
    csv_body,
    csv_text,
    dumps_json,
    jsonable,
    provenance,
    read_csv,
    read_json,
    write_csv,
    write_json,
)
from src.storage.curve_cache import CurveCache, cache_key

__all__: list[str] = [
    # Cache
    "CurveCache",
    "cache_key",
    # Artifacts
    "write_csv",
    "write_json",
    "read_csv",
    "read_json",
    "csv_text",
    "csv_body",
    "dumps_json",
    "jsonable",
    "atomic_write_bytes",
    "provenance",
]
