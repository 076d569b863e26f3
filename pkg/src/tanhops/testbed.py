"""Analytic test functions with known partials, and discrete error-norm estimators."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import hermite


@dataclass(frozen=True)
class Regularity:
    m: float  # math.inf for analytic functions
    alpha: float = 1.0

    def __str__(self):
        m = "inf" if math.isinf(self.m) else str(int(self.m))
        return f"C^{{{m},{self.alpha:g}}}"


@dataclass(frozen=True)
class TestFunction:
    """A target function on R^N with analytic partials up to order ``m_max``.

    ``func`` maps a (P, N) array to shape (P,); ``partial_func(alpha, X)`` does the
    same for the partial derivative with multi-index ``alpha``.
    """

    __test__ = False

    name: str
    dimension: int
    func: Callable[[np.ndarray], np.ndarray]
    partial_func: Callable[[tuple, np.ndarray], np.ndarray]
    regularity: Regularity
    m_max: int

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return float(self.func(X[None, :])[0])
        return self.func(X)

    def partial(self, alpha, X):
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dimension or min(alpha) < 0:
            raise ValueError(f"bad multi-index {alpha} for dimension {self.dimension}")
        if sum(alpha) > self.m_max:
            raise ValueError(
                f"{self.name}: partials available up to order {self.m_max}, requested {sum(alpha)}"
            )
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            return float(self.partial_func(alpha, X[None, :])[0])
        if sum(alpha) == 0:
            return self.func(X)
        return self.partial_func(alpha, X)


def multi_indices(dimension: int, order: int):
    """All multi-indices of total degree exactly ``order``, lexicographic."""
    if dimension == 1:
        yield (order,)
        return
    for first in range(order, -1, -1):
        for rest in multi_indices(dimension - 1, order - first):
            yield (first,) + rest


def _separable(name, dimension, d1, regularity, m_max):
    """Product of one 1-D profile per axis; d1(k, t) is the k-th derivative."""

    def func(X):
        return np.prod([d1(0, X[:, i]) for i in range(dimension)], axis=0)

    def partial_func(alpha, X):
        return np.prod([d1(a, X[:, i]) for i, a in enumerate(alpha)], axis=0)

    return TestFunction(name, dimension, func, partial_func, regularity, m_max)


def gaussian(dimension=1, width=1.0):
    """exp(-|x|^2 / width^2)."""
    s = 1.0 / width

    def d1(k, t):
        # d^k/dt^k e^{-(s t)^2} = (-s)^k H_k(s t) e^{-(s t)^2}
        c = np.zeros(k + 1)
        c[k] = 1.0
        return (-s) ** k * hermite.hermval(s * t, c) * np.exp(-((s * t) ** 2))

    return _separable("gaussian", dimension, d1, Regularity(math.inf), 6)


def trig_product(dimension=1, omega=2.0, phase=0.5, name="trig"):
    """prod_i sin(omega x_i + phase)."""

    def d1(k, t):
        return omega**k * np.sin(omega * t + phase + k * math.pi / 2)

    return _separable(name, dimension, d1, Regularity(math.inf), 6)


def exponential(dimension=1):
    return _separable("exp", dimension, lambda k, t: np.exp(t), Regularity(math.inf), 6)


def constant(dimension=1, value=1.0):
    def func(X):
        return np.full(X.shape[0], float(value))

    def partial_func(alpha, X):
        return np.zeros(X.shape[0])

    return TestFunction("constant", dimension, func, partial_func, Regularity(math.inf), 6)


def linear(dimension=1, coeffs=None):
    """sum_i a_i x_i (default a_i = 1)."""
    a = np.ones(dimension) if coeffs is None else np.asarray(coeffs, dtype=float)

    def func(X):
        return X @ a

    def partial_func(alpha, X):
        if sum(alpha) == 1:
            return np.full(X.shape[0], a[alpha.index(1)])
        return np.zeros(X.shape[0])

    return TestFunction("linear", dimension, func, partial_func, Regularity(math.inf), 6)


def power_sum(dimension=1, degree=4, name="poly4"):
    """(x_1 + ... + x_N)^degree: total degree ``degree``."""

    def func(X):
        return X.sum(axis=1) ** degree

    def partial_func(alpha, X):
        k = sum(alpha)
        if k > degree:
            return np.zeros(X.shape[0])
        return math.perm(degree, k) * X.sum(axis=1) ** (degree - k)

    return TestFunction(name, dimension, func, partial_func, Regularity(math.inf), degree)


def centered_monomial(x0, alpha):
    """prod_i (t_i - x0_i)^alpha_i as a test function (used for operator moments)."""
    x0 = np.asarray(x0, dtype=float)
    alpha = tuple(alpha)
    deg = sum(alpha)

    def func(X):
        return np.prod((X - x0) ** np.asarray(alpha), axis=1)

    def partial_func(beta, X):
        out = np.ones(X.shape[0])
        for i, (a, b) in enumerate(zip(alpha, beta)):
            if b > a:
                return np.zeros(X.shape[0])
            out = out * math.perm(a, b) * (X[:, i] - x0[i]) ** (a - b)
        return out

    return TestFunction(f"monomial{alpha}", len(alpha), func, partial_func, Regularity(math.inf), deg)


def holder_bump(dimension=1, alpha=0.5, m=0, center=0.5):
    """|x - c|^(m + alpha) * exp(-|x - c|^2 / 2): regularity C^{m, alpha} at c, bounded elsewhere."""
    if not (0 < alpha <= 1) or m not in (0, 1):
        raise ValueError("holder_bump supports m in {0, 1} and 0 < alpha <= 1")
    beta = m + alpha
    c = np.full(dimension, float(center))

    def func(X):
        r2 = np.sum((X - c) ** 2, axis=1)
        return r2 ** (beta / 2) * np.exp(-r2 / 2)

    def partial_func(a, X):
        # only reachable for m == 1, |a| == 1
        i = a.index(1)
        d = X - c
        r2 = np.sum(d**2, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(r2 > 0, (beta * r2 ** (beta / 2 - 1) - r2 ** (beta / 2)) * np.exp(-r2 / 2), 0.0)
        return g * d[:, i]

    name = "holder" if m == 0 else "holder_m1"
    return TestFunction(name, dimension, func, partial_func, Regularity(m, alpha), m)


_REGISTRY = {
    "constant": constant,
    "linear": linear,
    "poly4": power_sum,
    "gaussian": gaussian,
    "trig": trig_product,
    "sin": lambda dimension: trig_product(dimension, omega=1.0, phase=0.0, name="sin"),
    "exp": exponential,
    "holder": holder_bump,
    "holder_m1": lambda dimension: holder_bump(dimension, alpha=0.5, m=1),
}


def builtin_functions(dimension: int) -> list[TestFunction]:
    if dimension not in (1, 2, 3):
        raise ValueError(f"builtin functions exist for dimension 1, 2, 3; got {dimension}")
    return [make(dimension) for make in _REGISTRY.values()]


def get_function(name: str, dimension: int) -> TestFunction:
    if dimension not in (1, 2, 3):
        raise ValueError(f"builtin functions exist for dimension 1, 2, 3; got {dimension}")
    try:
        return _REGISTRY[name](dimension)
    except KeyError:
        raise KeyError(f"unknown test function {name!r}; known: {', '.join(_REGISTRY)}") from None


# ---------------------------------------------------------------------------
# grids and norms


@dataclass(frozen=True)
class GridSpec:
    lower: tuple
    upper: tuple
    points_per_axis: int

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi):
            raise ValueError("grid lower/upper dimension mismatch")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("grid requires lower < upper componentwise")
        if self.points_per_axis < 2:
            raise ValueError("grid needs at least 2 points per axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dimension(self) -> int:
        return len(self.lower)

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.dimension

    @property
    def spacing(self) -> np.ndarray:
        return (np.array(self.upper) - np.array(self.lower)) / (self.points_per_axis - 1)

    @property
    def volume(self) -> float:
        return float(np.prod(np.array(self.upper) - np.array(self.lower)))

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(np.array(self.upper) - np.array(self.lower)))

    def axes(self):
        return [np.linspace(a, b, self.points_per_axis) for a, b in zip(self.lower, self.upper)]

    def points(self) -> np.ndarray:
        """Grid points, shape (points_per_axis**N, N), C order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True)
class NormKind:
    kind: str  # sup | lp | sobolev | holder
    p: float = math.inf
    m: int = 0
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("sup", "lp", "sobolev", "holder"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind in ("lp", "sobolev") and not self.p >= 1:
            raise ValueError("p must be >= 1")
        if self.kind in ("sobolev", "holder") and self.m not in (0, 1):
            raise ValueError("only derivative orders m <= 1 are supported")
        if self.kind == "holder" and not (0 < self.alpha <= 1):
            raise ValueError("Hölder exponent must lie in (0, 1]")

    def __str__(self):
        return {
            "sup": "sup",
            "lp": f"lp({self.p:g})",
            "sobolev": f"sobolev({self.m},{self.p:g})",
            "holder": f"holder({self.m},{self.alpha:g})",
        }[self.kind]

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        """Accepts sup, lp:p, sobolev:m:p, holder:m:alpha (or the str() forms)."""
        parts = [t for t in re.split(r"[:(),\s]+", text.strip().lower()) if t]
        if not parts:
            raise ValueError("empty norm kind")
        kind, args = parts[0], parts[1:]
        try:
            if kind == "sup" and not args:
                return cls("sup")
            if kind == "lp" and len(args) == 1:
                return cls("lp", p=float(args[0]))
            if kind == "sobolev" and len(args) == 2:
                return cls("sobolev", m=int(args[0]), p=float(args[1]))
            if kind == "holder" and len(args) == 2:
                return cls("holder", m=int(args[0]), alpha=float(args[1]))
        except ValueError as e:
            raise ValueError(f"bad norm kind {text!r}: {e}") from None
        raise ValueError(f"bad norm kind {text!r}")


@dataclass(frozen=True)
class ErrorRecord:
    n: int
    norm_kind: str
    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"error value must be finite and >= 0, got {self.value}")


def _lp(values: np.ndarray, p: float, volume: float) -> float:
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max())
    return float((volume * np.mean(a**p)) ** (1.0 / p))


def sup_error(approx, f: TestFunction, grid: GridSpec) -> float:
    X = grid.points()
    return float(np.max(np.abs(approx(X) - f(X))))


def lp_error(approx, f: TestFunction, grid: GridSpec, p: float) -> float:
    X = grid.points()
    return _lp(approx(X) - f(X), p, grid.volume)


def _first_order(dimension):
    return [tuple(int(i == j) for j in range(dimension)) for i in range(dimension)]


def sobolev_error(approx_partials, f: TestFunction, grid: GridSpec, m: int, p: float) -> float:
    """Discrete W^{m,p} error: (sum_{|a|<=m} volume * mean_grid |D^a(approx - f)|^p)^(1/p)."""
    if m not in (0, 1):
        raise ValueError("sobolev_error supports m in {0, 1}")
    if m > f.m_max:
        raise ValueError(f"{f.name} has partials only up to order {f.m_max}")
    X = grid.points()
    alphas = [(0,) * grid.dimension] + (_first_order(grid.dimension) if m == 1 else [])
    parts = [_lp(approx_partials(a, X) - f.partial(a, X), p, grid.volume) for a in alphas]
    if math.isinf(p):
        return max(parts)
    return float(sum(v**p for v in parts) ** (1.0 / p))


def _neighbour_offsets(grid: GridSpec, cutoff: float):
    h = grid.spacing
    reach = [int(math.floor(cutoff / hi + 1e-9)) for hi in h]
    ranges = [range(-r, r + 1) for r in reach]
    offs = np.array(np.meshgrid(*ranges, indexing="ij")).reshape(grid.dimension, -1).T
    # one representative per +-pair: first nonzero component positive
    keep = []
    for d in offs:
        nz = np.flatnonzero(d)
        if nz.size and d[nz[0]] > 0 and np.linalg.norm(d * h) <= cutoff * (1 + 1e-12):
            keep.append(d)
    return np.array(keep, dtype=np.int64).reshape(-1, grid.dimension)


def _pairs_for_offset(values, d):
    """Aligned slices (a, b) with b = values shifted by offset d."""
    sa, sb = [], []
    for di, size in zip(d, values.shape):
        if di >= 0:
            sa.append(slice(0, size - di))
            sb.append(slice(di, size))
        else:
            sa.append(slice(-di, size))
            sb.append(slice(0, size + di))
    return values[tuple(sa)], values[tuple(sb)]


def holder_seminorm(values, grid: GridSpec, alpha: float, *, cutoff_fraction=0.25,
                    max_pairs=100_000, seed=0) -> float:
    """Max |v(x) - v(y)| / |x - y|^alpha over grid pairs closer than cutoff_fraction * diameter.

    All pairs are used when there are at most ``max_pairs``; otherwise every
    axis-adjacent pair plus a seeded random sample of the rest.
    """
    v = np.asarray(values, dtype=float).reshape(grid.shape)
    h = grid.spacing
    offsets = _neighbour_offsets(grid, cutoff_fraction * grid.diameter)
    if offsets.size == 0:
        return 0.0
    counts = np.array([np.prod([s - abs(di) for s, di in zip(v.shape, d)]) for d in offsets])
    best = 0.0

    def scan(d):
        a, b = _pairs_for_offset(v, d)
        return float(np.max(np.abs(a - b))) / float(np.linalg.norm(d * h)) ** alpha

    if counts.sum() <= max_pairs:
        for d in offsets:
            best = max(best, scan(d))
        return best

    unit = [i for i, d in enumerate(offsets) if np.abs(d).sum() == 1]
    for i in unit:
        best = max(best, scan(offsets[i]))
    budget = max_pairs - int(counts[unit].sum())
    if budget > 0:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, v.size, size=budget)
        off = offsets[rng.integers(0, len(offsets), size=budget)]
        start = np.array(np.unravel_index(idx, v.shape)).T
        end = start + off
        ok = np.all((end >= 0) & (end < np.array(v.shape)), axis=1)
        if ok.any():
            s, e, o = start[ok], end[ok], off[ok]
            diff = np.abs(v[tuple(s.T)] - v[tuple(e.T)])
            dist = np.linalg.norm(o * h, axis=1)
            best = max(best, float(np.max(diff / dist**alpha)))
    return best


def holder_error(approx, approx_partials, f: TestFunction, grid: GridSpec, m: int, alpha: float,
                 **seminorm_kw) -> float:
    """Discrete C^{m,alpha} error: sum of sup-norms of D^b(approx - f) for |b| <= m
    plus the Hölder seminorm of each top-order difference."""
    if not (0 < alpha <= 1):
        raise ValueError(f"Hölder exponent must lie in (0, 1], got {alpha}")
    if m not in (0, 1):
        raise ValueError("holder_error supports m in {0, 1}")
    if m > f.m_max:
        raise ValueError(f"{f.name} has partials only up to order {f.m_max}")
    X = grid.points()
    diffs = {(0,) * grid.dimension: approx(X) - f(X)}
    if m == 1:
        for a in _first_order(grid.dimension):
            diffs[a] = approx_partials(a, X) - f.partial(a, X)
    total = sum(float(np.max(np.abs(d))) for d in diffs.values())
    for a, d in diffs.items():
        if sum(a) == m:
            total += holder_seminorm(d, grid, alpha, **seminorm_kw)
    return total
