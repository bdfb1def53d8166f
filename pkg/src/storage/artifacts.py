"""
Result files: CSV tables, JSON documents and run provenance.

CSV dialect: comma separated, header row, 17 significant digits, optional
``#``-prefixed comment lines before the header. The only line that varies
between identical runs is the ``# written_at`` comment.

JSON is written with orjson; non-finite floats become the strings "inf",
"-inf" and "nan". Every file is written to a temporary sibling first and
moved into place with os.replace.
"""

from datetime import datetime, timezone
import math
import os
from pathlib import Path
import platform
import tempfile
from typing import Any, Mapping, Optional

import numpy as np
import orjson
import pandas as pd
import scipy
import structlog

from src import __version__

logger = structlog.get_logger(__name__)

CSV_FLOAT_FORMAT = "%.17g"
JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def atomic_write_bytes(path: Path | str, payload: bytes) -> Path:
    """Write ``payload`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(temp_name, path)
    except BaseException:
        Path(temp_name).unlink(missing_ok=True)
        raise
    return path


def _float_text(value: float) -> Any:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def jsonable(value: Any) -> Any:
    """Replace non-finite floats (also inside arrays and containers) by strings."""
    if isinstance(value, float):
        return _float_text(value)
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.generic):
        return jsonable(value.item())
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def dumps_json(data: Any) -> bytes:
    """Serialize to indented, key-sorted JSON bytes."""
    return orjson.dumps(jsonable(data), option=JSON_OPTIONS)


def write_json(path: Path | str, data: Any) -> Path:
    """Atomically write a JSON document."""
    written = atomic_write_bytes(path, dumps_json(data) + b"\n")
    logger.debug("json_written", path=str(written))
    return written


def read_json(path: Path | str) -> Any:
    """Parse a JSON document written by write_json."""
    return orjson.loads(Path(path).read_bytes())


def csv_text(
    frame: pd.DataFrame,
    comments: Optional[Mapping[str, Any]] = None,
    timestamp: bool = True,
) -> str:
    """
    Render a table in the artifact CSV dialect.

    Args:
        frame: Table; the index is not written.
        comments: Key/value pairs written as ``# key: value`` lines, sorted by key.
        timestamp: Add a ``# written_at`` line.
    """
    lines = []
    if timestamp:
        lines.append(f"# written_at: {datetime.now(timezone.utc).isoformat()}")
    for key in sorted(comments or {}):
        value = (comments or {})[key]
        rendered = value if isinstance(value, str) else dumps_json(value).decode().replace("\n", "")
        lines.append(f"# {key}: {rendered}")
    body = frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return "".join(line + "\n" for line in lines) + body


def write_csv(
    path: Path | str,
    frame: pd.DataFrame,
    comments: Optional[Mapping[str, Any]] = None,
    timestamp: bool = True,
) -> Path:
    """Atomically write a table in the artifact CSV dialect."""
    written = atomic_write_bytes(path, csv_text(frame, comments, timestamp).encode("utf-8"))
    logger.debug("csv_written", path=str(written), rows=len(frame))
    return written


def read_csv(path: Path | str) -> pd.DataFrame:
    """Read an artifact CSV, skipping comment lines, with exact float round trip."""
    return pd.read_csv(path, comment="#", float_precision="round_trip")


def csv_body(path: Path | str) -> str:
    """File content without comment lines (the part that is identical across runs)."""
    text = Path(path).read_text(encoding="utf-8")
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def provenance(
    command: str,
    config: Mapping[str, Any],
    wall_time: float,
    outputs: Optional[Mapping[str, str]] = None,
) -> dict[str, Any]:
    """
    Provenance block of a run.

    Args:
        command: Subcommand name.
        config: Full configuration echo, defaults included.
        wall_time: Elapsed seconds.
        outputs: Output name to file path.
    """
    return {
        "command": command,
        "config": dict(config),
        "version": __version__,
        "wall_time": wall_time,
        "written_at": datetime.now(timezone.utc).isoformat(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "outputs": dict(outputs or {}),
    }
