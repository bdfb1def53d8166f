"""
Thread-safe accumulation of per-replica values.

Batches may finish in any order and on any thread. Committed arrays are
keyed by batch index and concatenated in index order, so the summary of a
run is identical however its batches were scheduled.
"""

import math
import threading
from typing import Dict, Iterable, List, Optional

import numpy as np
import structlog

from src.config.models import MonteCarloSettings
from src.models.simulation import EstimateFlag, ObservableEstimate

logger = structlog.get_logger(__name__)


class ReplicaAccumulator:
    """
    Collects named per-replica channels from replica batches.

    Attributes:
        channels: Channel names every commit must provide.
    """

    def __init__(self, channels: Iterable[str]):
        self.channels = tuple(channels)
        if not self.channels:
            raise ValueError("accumulator needs at least one channel")
        self._batches: Dict[int, Dict[str, np.ndarray]] = {}
        self._lock = threading.Lock()

    def commit(self, batch_index: int, values: Dict[str, np.ndarray]) -> None:
        """
        Store one batch.

        Raises:
            ValueError: If a channel is missing, lengths differ or the batch
                index was already committed.
        """
        missing = set(self.channels) - set(values)
        if missing:
            raise ValueError(f"batch {batch_index} lacks channels {sorted(missing)}")
        lengths = {len(values[name]) for name in self.channels}
        if len(lengths) != 1:
            raise ValueError(f"batch {batch_index} has channels of different lengths")
        arrays = {name: np.array(values[name], dtype=np.float64) for name in self.channels}
        with self._lock:
            if batch_index in self._batches:
                raise ValueError(f"batch {batch_index} committed twice")
            self._batches[batch_index] = arrays

    def merge(self, other: "ReplicaAccumulator") -> None:
        """Absorb the batches of another accumulator with the same channels."""
        if other.channels != self.channels:
            raise ValueError("cannot merge accumulators with different channels")
        with other._lock:
            batches = dict(other._batches)
        for index, values in batches.items():
            self.commit(index, values)

    @property
    def count(self) -> int:
        """Replicas committed so far."""
        with self._lock:
            return sum(len(next(iter(b.values()))) for b in self._batches.values())

    def channel(self, name: str) -> np.ndarray:
        """All values of a channel in batch order."""
        if name not in self.channels:
            raise KeyError(name)
        with self._lock:
            parts = [self._batches[i][name] for i in sorted(self._batches)]
        if not parts:
            return np.empty(0)
        return np.concatenate(parts)


# =============================================================================
# BATCHES AND SUMMARIES
# =============================================================================


def replica_batches(replicas: int, size: int) -> List[List[int]]:
    """Consecutive replica indices split into batches of at most ``size``."""
    if replicas < 1 or size < 1:
        raise ValueError(f"replicas and batch size must be >= 1, got {replicas}, {size}")
    return [list(range(start, min(start + size, replicas))) for start in range(0, replicas, size)]


def is_heavy_tailed(values: np.ndarray, fraction: float, share: float) -> bool:
    """True if the top ``fraction`` of nonnegative values carries more than ``share`` of the sum."""
    if values.size == 0 or np.any(values < 0):
        return False
    total = float(np.sum(values))
    if total <= 0:
        return False
    top = max(1, int(math.ceil(fraction * values.size)))
    if top >= values.size:
        return False
    largest = np.partition(values, values.size - top)[values.size - top :]
    return float(np.sum(largest)) > share * total


def summarize(
    observable: str,
    values: np.ndarray,
    settings: Optional[MonteCarloSettings] = None,
    flags: Optional[List[EstimateFlag]] = None,
) -> ObservableEstimate:
    """
    Sample mean with standard error std / sqrt(n).

    A single replica has standard error 0.
    """
    settings = settings or MonteCarloSettings()
    if values.size == 0:
        raise ValueError(f"no replica values for {observable}")
    flags = list(flags or [])
    stderr = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    if is_heavy_tailed(values, settings.heavy_tail_fraction, settings.heavy_tail_share):
        flags.append(EstimateFlag.HEAVY_TAIL)
        logger.warning("heavy_tailed_estimate", observable=observable, replicas=int(values.size))
    return ObservableEstimate(
        observable=observable,
        estimate=float(np.mean(values)),
        stderr=stderr,
        replicas=int(values.size),
        flags=flags,
    )


def summarize_correlation(
    observable: str,
    first: np.ndarray,
    second: np.ndarray,
    flags: Optional[List[EstimateFlag]] = None,
) -> ObservableEstimate:
    """Sample correlation with the large-sample standard error (1 - r^2) / sqrt(n)."""
    if first.size < 2:
        raise ValueError(f"correlation of {observable} needs at least two replicas")
    if np.std(first) == 0 or np.std(second) == 0:
        r = 1.0 if np.array_equal(first, second) else 0.0
    else:
        r = float(np.corrcoef(first, second)[0, 1])
    return ObservableEstimate(
        observable=observable,
        estimate=r,
        stderr=(1.0 - r * r) / math.sqrt(first.size),
        replicas=int(first.size),
        flags=list(flags or []),
    )
