"""
Read-only numpy array fields for frozen pydantic models.

Sampled curves carry tens of thousands of points, so they are stored as
numpy arrays rather than tuples. The annotated type below coerces input to a
contiguous float64 array, marks it read-only so frozen models stay
immutable, and serialises to a list in JSON mode.
"""

from typing import Annotated, Any

import numpy as np
from pydantic import BeforeValidator, PlainSerializer


def _as_readonly_float(value: Any) -> np.ndarray:
    array = np.array(value, dtype=np.float64, copy=True)
    if array.ndim != 1:
        raise ValueError(f"expected a one-dimensional array, got shape {array.shape}")
    array.setflags(write=False)
    return array


FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_readonly_float),
    PlainSerializer(lambda a: a.tolist(), return_type=list, when_used="json"),
]
