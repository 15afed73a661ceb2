"""Seeded direction sampling helpers.

Everything here is deterministic given the seed, so test failures and CLI
reports reproduce exactly.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc


def as_rng(seed) -> np.random.Generator:
    """Accept a seed or an existing Generator and return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_directions(n: int, count: int, seed) -> np.ndarray:
    """Draw ``count`` independent uniform directions on the unit sphere of R^n.

    Returns an array of shape (count, n) with unit rows.
    """
    if n < 1:
        raise ValueError("ambient dimension must be at least 1")
    rng = as_rng(seed)
    v = rng.standard_normal((count, n))
    norms = np.linalg.norm(v, axis=1)
    # a norm of exactly zero has probability zero; guard anyway
    bad = norms < 1e-12
    while np.any(bad):
        v[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(v, axis=1)
        bad = norms < 1e-12
    return v / norms[:, None]


def hemisphere_grid(n: int, count: int, seed) -> np.ndarray:
    """Low-discrepancy grid of directions on the closed upper hemisphere.

    Scrambled Sobol points are pushed through the inverse normal CDF and
    normalized, which gives an even (quasi-random) coverage of the sphere;
    signs are then fixed so the last coordinate is nonnegative.  The grid is
    deterministic for a fixed seed, so "lowest grid index" is a meaningful
    tie-break rule.
    """
    if count < 1:
        raise ValueError("grid size must be positive")
    sob = qmc.Sobol(d=n, scramble=True, seed=np.random.default_rng(seed))
    mexp = max(1, int(np.ceil(np.log2(count))))
    pts = sob.random_base2(mexp)[:count]
    # keep strictly inside (0,1) so ndtri stays finite
    pts = np.clip(pts, 1e-12, 1 - 1e-12)
    v = ndtri(pts)
    norms = np.linalg.norm(v, axis=1)
    norms[norms < 1e-12] = 1.0
    v = v / norms[:, None]
    flip = v[:, -1] < 0.0
    v[flip] *= -1.0
    return v
