"""Input validation helpers shared across the package.

All public entry points funnel vectors and operators through these
converters so that downstream code can assume finite float64 arrays of
consistent dimension.
"""

from __future__ import annotations

import numpy as np

# Dense O(d^3) routines throughout; keep the ambient dimension desk-scale.
DIM_CAP = 16


class DimensionError(ValueError):
    """Raised when an input has the wrong shape or an unsupported dimension."""


def as_vector(v, dim: int | None = None) -> np.ndarray:
    """Coerce ``v`` to a finite float64 vector, optionally of length ``dim``."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"expected a vector, got shape {arr.shape}")
    _check_dim(arr.shape[0])
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector has non-finite entries")
    return arr


def as_operator(a, dim: int | None = None) -> np.ndarray:
    """Coerce ``a`` to a finite float64 square matrix, optionally d x d."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    _check_dim(arr.shape[0])
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"expected dimension {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("operator has non-finite entries")
    return arr


def _check_dim(d: int) -> None:
    if d < 1:
        raise DimensionError("dimension must be at least 1")
    if d > DIM_CAP:
        raise DimensionError(f"dimension {d} exceeds the supported cap {DIM_CAP}")
