"""
Finite Markov chains: the Feynman-Kac oracle and a chain-backed ReturnProfile.

For a generator Q on n <= 10 states the exponential moment of the local
time in state i solves a linear ODE, so

    E^i[exp(kappa L_t)] = (exp(t (Q + kappa E_ii)) 1)_i

with E_ii the single-entry matrix. scipy.linalg.expm evaluates it by
scaling and squaring, independently of the renewal solver it is used to
check.
"""

import math
from typing import Optional

import numpy as np
from scipy import linalg
import structlog

from src.exceptions import InvalidGenerator
from src.interfaces.return_profile import ReturnProfile

logger = structlog.get_logger(__name__)

MAX_STATES = 10
ROW_SUM_TOLERANCE = 1e-10


def validate_generator(q: np.ndarray | list[list[float]]) -> np.ndarray:
    """
    Check and convert a generator table.

    Args:
        q: Square table with nonnegative off-diagonal entries and zero row sums.

    Returns:
        np.ndarray: Read-only float copy.

    Raises:
        InvalidGenerator: If the table is not a valid generator on <= 10 states.
    """
    matrix = np.array(q, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise InvalidGenerator(
            f"generator must be a non-empty square table, got shape {matrix.shape}"
        )
    n = matrix.shape[0]
    if n > MAX_STATES:
        raise InvalidGenerator(f"generator has {n} states, at most {MAX_STATES} are supported")
    if not np.all(np.isfinite(matrix)):
        raise InvalidGenerator("generator entries must be finite")
    off_diagonal = matrix[~np.eye(n, dtype=bool)]
    if np.any(off_diagonal < 0):
        raise InvalidGenerator("off-diagonal generator entries must be >= 0")
    row_sums = matrix.sum(axis=1)
    scale = max(1.0, float(np.abs(matrix).max()))
    if np.any(np.abs(row_sums) > ROW_SUM_TOLERANCE * scale):
        raise InvalidGenerator(f"generator rows must sum to 0, got {row_sums.tolist()}")
    matrix.setflags(write=False)
    return matrix


def exact_chain_moment(q: np.ndarray | list[list[float]], i: int, kappa: float, t: float) -> float:
    """
    E^i[exp(kappa L_t)] for a finite chain by matrix exponential.

    Args:
        q: Generator table (n <= 10 states).
        i: State whose local time is counted.
        kappa: Rate parameter (any sign).
        t: Time, >= 0.

    Returns:
        float: The exponential moment.

    Raises:
        InvalidGenerator: If ``q`` is not a valid generator.
        ValueError: If ``i`` is out of range or t < 0.

    Example:
        >>> round(exact_chain_moment([[-1, 1], [1, -1]], 0, 1.0, 1.0), 6)
        2.138292
    """
    matrix = validate_generator(q)
    n = matrix.shape[0]
    if not 0 <= i < n:
        raise ValueError(f"state {i} out of range for {n} states")
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")

    shifted = matrix.copy()
    shifted[i, i] += kappa
    value = float((linalg.expm(t * shifted) @ np.ones(n))[i])
    logger.debug("chain_moment", states=n, state=i, kappa=kappa, t=t, value=value)
    return value


def _reachable(adjacency: np.ndarray, start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for nxt in np.flatnonzero(adjacency[node]):
            if int(nxt) not in seen:
                seen.add(int(nxt))
                stack.append(int(nxt))
    return seen


class ChainProfile(ReturnProfile):
    """
    f(t) = (exp(tQ))_ii of a finite chain.

    On uniform grids starting at 0 the values are generated by repeated
    multiplication with exp(hQ), one matrix exponential per grid.

    Attributes:
        generator: Validated generator table.
        state: Distinguished state i.
    """

    def __init__(self, q: np.ndarray | list[list[float]], state: int = 0):
        self.generator = validate_generator(q)
        n = self.generator.shape[0]
        if not 0 <= state < n:
            raise ValueError(f"state {state} out of range for {n} states")
        self.state = state
        self._green: Optional[tuple[float, float]] = None

    @property
    def label(self) -> str:
        return f"chain:n={self.generator.shape[0]},i={self.state}"

    def values(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        flat = t.ravel()
        if flat.size == 0:
            return np.zeros_like(t)
        steps = np.diff(flat)
        if flat[0] == 0.0 and flat.size > 2 and np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
            propagator = linalg.expm(steps[0] * self.generator)
            row = np.zeros(self.generator.shape[0])
            row[self.state] = 1.0
            out = np.empty(flat.size)
            for k in range(flat.size):
                out[k] = row[self.state]
                row = row @ propagator
        else:
            out = np.array([linalg.expm(s * self.generator)[self.state, self.state] for s in flat])
        return np.clip(out, 0.0, 1.0).reshape(t.shape)

    def laplace(self, lam: float) -> float:
        if lam < 0:
            raise ValueError(f"Laplace variable must be >= 0, got {lam}")
        if lam == 0:
            return self.green()
        n = self.generator.shape[0]
        unit = np.zeros(n)
        unit[self.state] = 1.0
        resolvent = linalg.solve(lam * np.eye(n) - self.generator, unit)
        return float(resolvent[self.state])

    def _green_pair(self) -> tuple[float, float]:
        if self._green is not None:
            return self._green
        adjacency = (self.generator > 0) & ~np.eye(self.generator.shape[0], dtype=bool)
        forward = _reachable(adjacency, self.state)
        if all(self.state in _reachable(adjacency, j) for j in forward):
            self._green = (math.inf, math.inf)
            return self._green

        # Returns to i only visit states that can reach i; those are transient too.
        transient = sorted(j for j in forward if self.state in _reachable(adjacency, j))
        block = -self.generator[np.ix_(transient, transient)]
        index = transient.index(self.state)
        unit = np.zeros(len(transient))
        unit[index] = 1.0
        first = linalg.solve(block, unit)
        second = linalg.solve(block, first)
        self._green = (float(first[index]), float(second[index]))
        return self._green

    def green(self) -> float:
        return self._green_pair()[0]

    def green_moment(self) -> float:
        return self._green_pair()[1]
