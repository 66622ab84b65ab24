"""Error metrics and evaluation grids."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, MetricError

GRID_POINTS_1D = 1001
GRID_POINTS_2D = 101


def evaluation_grid(domain, n=None) -> np.ndarray:
    """Uniform grid including the endpoints: 1001 points in 1D, 101 x 101 in 2D."""
    if n is None:
        n = GRID_POINTS_1D if len(domain) == 1 else GRID_POINTS_2D
    axes = [np.linspace(a, b, n) for a, b in domain]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def relative_l2(u_h, u_star, grid) -> float:
    """``||u_h - u*|| / ||u*||`` in the discrete 2-norm over ``grid``.

    ``u_h`` and ``u_star`` are callables on ``(N, d)`` points or arrays of
    values already evaluated on the grid.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim == 1:
        grid = grid[:, None]
    if grid.shape[0] < 2:
        raise ConfigurationError("evaluation grid needs at least 2 points")
    uh = np.asarray(u_h(grid) if callable(u_h) else u_h, dtype=float).reshape(-1)
    us = np.asarray(u_star(grid) if callable(u_star) else u_star, dtype=float).reshape(-1)
    denom = np.sqrt(np.sum(us * us))
    if denom == 0.0:
        raise MetricError("reference solution vanishes on the evaluation grid")
    return float(np.sqrt(np.sum((uh - us) ** 2)) / denom)
