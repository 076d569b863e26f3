"""Tensor-product density Z on R^N and the truncated lattice windows used by the operators."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .activation import ActivationParams, phi, phi_prime, window_radius

MAX_DIMENSION = 4


def as_point(x) -> np.ndarray:
    """Coerce to a finite 1-D coordinate vector."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"point must be a non-empty coordinate vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def as_points(X, dimension: int | None = None) -> np.ndarray:
    """Coerce to a (P, N) array of points."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if dimension in (None, 1) else X[None, :]
    if X.ndim != 2:
        raise ValueError(f"points must be a (P, N) array, got shape {X.shape}")
    if dimension is not None and X.shape[1] != dimension:
        raise ValueError(f"expected points of dimension {dimension}, got {X.shape[1]}")
    return X


def z_density(params: ActivationParams, point) -> float:
    return float(np.prod(phi(params, as_point(point))))


def z_density_batch(params: ActivationParams, X) -> np.ndarray:
    """Z at each row of a (P, N) array."""
    return np.prod(phi(params, np.asarray(X, dtype=float)), axis=-1)


@lru_cache(maxsize=256)
def axis_radius(params: ActivationParams, tol: float, dimension: int) -> int:
    """Per-axis window radius with the tail budget split evenly over the axes."""
    return window_radius(params, tol / dimension)


@dataclass(frozen=True)
class LatticeWindow:
    center: tuple[int, ...]
    radius: int

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("window radius must be >= 1")

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def size(self) -> int:
        return (2 * self.radius + 1) ** self.dimension

    def indices(self) -> np.ndarray:
        """All lattice indices in the box, shape (size, N)."""
        offs = range(-self.radius, self.radius + 1)
        grid = np.array(list(itertools.product(offs, repeat=self.dimension)), dtype=np.int64)
        return grid + np.asarray(self.center, dtype=np.int64)


def build_window(n: int, x, params: ActivationParams, tol: float) -> LatticeWindow:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 < tol < 1.0):
        raise ValueError(f"tol must lie in (0, 1), got {tol!r}")
    x = as_point(x)
    center = tuple(int(c) for c in np.rint(n * x))
    return LatticeWindow(center, axis_radius(params, tol, x.size))


def weight_sum(n: int, x, params: ActivationParams, window: LatticeWindow) -> float:
    """Sum of Z(n x - k) over the window; below 1 by at most the omitted tail mass."""
    u = n * as_point(x)
    per_axis = [
        phi(params, u[i] - (window.center[i] + np.arange(-window.radius, window.radius + 1)))
        for i in range(window.dimension)
    ]
    return float(np.prod([w.sum() for w in per_axis]))


def axis_weights(params: ActivationParams, n: int, X: np.ndarray, radius: int, deriv_axis=None):
    """Per-axis kernel factors for a batch of points.

    Returns (centers, weights) with centers of shape (P, N) and weights of shape
    (P, N, 2*radius+1); weights[p, i, j] = phi(n x_i - c_i - j + radius).  When
    ``deriv_axis`` is given that axis holds d/dx_i instead, i.e. n * phi'(...).
    """
    X = np.asarray(X, dtype=float)
    centers = np.rint(n * X).astype(np.int64)
    j = np.arange(-radius, radius + 1)
    arg = (n * X - centers)[:, :, None] - j[None, None, :]
    w = phi(params, arg)
    if deriv_axis is not None:
        w[:, deriv_axis, :] = n * phi_prime(params, arg[:, deriv_axis, :])
    return centers, w
