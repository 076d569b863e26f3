"""The operators A_n (sampling), K_n (Kantorovich cell averages) and Q_n (weighted nodes).

Each operator is sum_k c_k(f) Z(n x - k) over a truncated lattice window; only the
coefficient rule c_k differs:

    basic        c_k = f(k/n)
    kantorovich  c_k = n^N * integral of f over the cube prod_i [k_i/n, (k_i+1)/n]
    quadrature   c_k = sum_r w_r f(k/n + r/(n theta)),  tensorized over axes
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .activation import ActivationParams
from .density import MAX_DIMENSION, as_points, axis_radius, axis_weights
from .testbed import TestFunction

KINDS = ("basic", "kantorovich", "quadrature")

# max entries of the (points x window) work array per chunk
_CHUNK = 1 << 21


@dataclass(frozen=True)
class OperatorConfig:
    kind: str = "basic"
    n: int = 8
    dimension: int = 1
    activation: ActivationParams = field(default_factory=ActivationParams)
    truncation_tol: float = 1e-12
    theta: int = 3
    weights: tuple | None = None
    cell_quad_order: int = 5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"operator kind must be one of {KINDS}, got {self.kind!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not (1 <= self.dimension <= MAX_DIMENSION):
            raise ValueError(f"dimension must lie in 1..{MAX_DIMENSION}, got {self.dimension}")
        if not (0.0 < self.truncation_tol < 1.0):
            raise ValueError("truncation_tol must lie in (0, 1)")
        if int(self.theta) != self.theta or self.theta < 1:
            raise ValueError("theta must be a positive integer")
        if int(self.cell_quad_order) != self.cell_quad_order or self.cell_quad_order < 1:
            raise ValueError("cell_quad_order must be a positive integer")
        w = (1.0 / self.theta,) * self.theta if self.weights is None else tuple(float(v) for v in self.weights)
        if len(w) != self.theta:
            raise ValueError(f"expected {self.theta} quadrature weights, got {len(w)}")
        if min(w) < 0 or abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValueError("quadrature weights must be non-negative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "n", int(self.n))

    def with_n(self, n: int) -> "OperatorConfig":
        return OperatorConfig(self.kind, n, self.dimension, self.activation, self.truncation_tol,
                              self.theta, self.weights, self.cell_quad_order)

    def replace(self, **kw) -> "OperatorConfig":
        from dataclasses import replace

        return replace(self, **kw)

    @property
    def radius(self) -> int:
        return axis_radius(self.activation, self.truncation_tol, self.dimension)

    @cached_property
    def node_rule(self):
        """Node offsets (in units of 1/n) inside a cell and their product weights."""
        N = self.dimension
        if self.kind == "basic":
            t1, w1 = np.zeros(1), np.ones(1)
        elif self.kind == "kantorovich":
            t, w = np.polynomial.legendre.leggauss(self.cell_quad_order)
            t1, w1 = (t + 1.0) / 2.0, w / 2.0
        else:
            t1 = np.arange(1, self.theta + 1) / self.theta
            w1 = np.asarray(self.weights)
        offsets = np.array(list(itertools.product(t1, repeat=N))).reshape(-1, N)
        weights = np.array([math.prod(c) for c in itertools.product(w1, repeat=N)])
        return offsets, weights


def coefficients(config: OperatorConfig, f: TestFunction, K: np.ndarray) -> np.ndarray:
    """Operator coefficients c_k for lattice indices K of shape (M, N)."""
    n = config.n
    K = np.asarray(K)
    if config.kind == "basic":
        return np.asarray(f(K / n), dtype=float)
    offsets, weights = config.node_rule
    if config.kind == "quadrature":
        # nodes k/n + r/(n theta), kept in that arithmetic form
        steps = np.arange(1, config.theta + 1) / (n * config.theta)
        shift = np.array(list(itertools.product(steps, repeat=config.dimension))).reshape(-1, config.dimension)
    else:
        shift = offsets / n
    nodes = (K / n)[:, None, :] + shift[None, :, :]
    vals = np.asarray(f(nodes.reshape(-1, config.dimension)), dtype=float).reshape(len(K), -1)
    return vals @ weights


def _evaluate(config: OperatorConfig, f: TestFunction, X: np.ndarray, deriv_axis=None) -> np.ndarray:
    N, n, W = config.dimension, config.n, config.radius
    X = as_points(X, N)
    if deriv_axis is not None and not (0 <= deriv_axis < N):
        raise ValueError(f"axis must lie in 0..{N - 1}, got {deriv_axis}")
    side = 2 * W + 1
    S = side**N
    offs = np.array(list(itertools.product(range(-W, W + 1), repeat=N)), dtype=np.int64)
    out = np.empty(len(X))
    step = max(1, _CHUNK // S)
    for start in range(0, len(X), step):
        Xc = X[start:start + step]
        centers, w = axis_weights(config.activation, n, Xc, W, deriv_axis)
        # Z over the window as an outer product of axis factors, C order matching offs
        Z = w[:, 0, :]
        for i in range(1, N):
            Z = (Z[:, :, None] * w[:, i, None, :]).reshape(len(Xc), -1)
        K = centers[:, None, :] + offs[None, :, :]
        flat = K.reshape(-1, N)
        uniq, inv = np.unique(flat, axis=0, return_inverse=True)
        c = coefficients(config, f, uniq)[inv.ravel()].reshape(len(Xc), S)
        out[start:start + step] = (c * Z).sum(axis=1)
    return out


def evaluate(config: OperatorConfig, f: TestFunction, X) -> np.ndarray:
    """Operator values at each row of X (shape (P, N)); points are independent."""
    return _evaluate(config, f, X)


def evaluate_derivative(config: OperatorConfig, f: TestFunction, X, axis: int) -> np.ndarray:
    """d/dx_axis of the operator at each row of X; the axis kernel factor becomes n * phi'."""
    return _evaluate(config, f, X, deriv_axis=axis)


def _single(config, f, x, kind, axis=None):
    if config.kind != kind:
        raise ValueError(f"config.kind is {config.kind!r}, expected {kind!r}")
    x = np.atleast_1d(np.asarray(x, dtype=float))[None, :]
    return float(_evaluate(config, f, x, axis)[0])


def apply_basic(config: OperatorConfig, f: TestFunction, x) -> float:
    return _single(config, f, x, "basic")


def apply_kantorovich(config: OperatorConfig, f: TestFunction, x) -> float:
    return _single(config, f, x, "kantorovich")


def apply_quadrature(config: OperatorConfig, f: TestFunction, x) -> float:
    return _single(config, f, x, "quadrature")


def apply_derivative(config: OperatorConfig, f: TestFunction, x, axis: int) -> float:
    return _single(config, f, x, config.kind, axis)


def apply(config: OperatorConfig, f: TestFunction, x) -> float:
    return _single(config, f, x, config.kind)
