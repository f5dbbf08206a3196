"""Deterministic frequency grids for characteristic-function verification."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc


def frequency_grid(dim: int, n: int = 64, radius: float = 5.0) -> np.ndarray:
    """Fixed verification grid: ``n`` low-discrepancy points in the ball of
    the given radius plus the standard basis vectors.

    Unscrambled Halton points are used so the grid is reproducible across
    runs and platforms.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if n < 0:
        raise ValueError("n must be nonnegative")
    pts = np.zeros((0, dim))
    if n > 0:
        sampler = qmc.Halton(d=dim, scramble=False)
        cube = sampler.random(n)
        # map the unit cube into the ball: the cube corner norm is sqrt(d)
        pts = (2.0 * cube - 1.0) * (radius / np.sqrt(dim))
    return np.vstack([pts, np.eye(dim)])
