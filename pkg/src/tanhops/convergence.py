"""Scale sweeps, log-log rate fits, and the Voronovskaya main-term/remainder split."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .density import as_point, axis_weights
from .operators import OperatorConfig, evaluate, evaluate_derivative
from .testbed import (ErrorRecord, GridSpec, NormKind, TestFunction, get_function, holder_error,
                      lp_error, multi_indices, sobolev_error, sup_error)

DEFAULT_N = (8, 16, 32, 64, 128, 256)


@dataclass(frozen=True)
class SweepPlan:
    config: OperatorConfig
    function: str | TestFunction
    grid: GridSpec
    norm: NormKind = field(default_factory=lambda: NormKind("sup"))
    n_values: tuple = DEFAULT_N
    seed: int = 0

    def __post_init__(self):
        ns = tuple(int(n) for n in self.n_values)
        if len(ns) < 3:
            raise ValueError("a sweep needs at least 3 scales")
        if any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
            raise ValueError("n_values must be positive and strictly increasing")
        if self.grid.dimension != self.config.dimension:
            raise ValueError("grid dimension does not match operator dimension")
        object.__setattr__(self, "n_values", ns)

    @property
    def target(self) -> TestFunction:
        if isinstance(self.function, TestFunction):
            return self.function
        return get_function(self.function, self.config.dimension)

    @property
    def saturation_floor(self) -> float:
        return max(1e-15, 100 * self.config.truncation_tol)


def operator_error(config: OperatorConfig, f: TestFunction, grid: GridSpec, norm: NormKind,
                   seed: int = 0) -> float:
    """Discrete norm of (operator(f) - f) on the grid."""

    def approx(X):
        return evaluate(config, f, X)

    def approx_partials(alpha, X):
        if sum(alpha) == 0:
            return evaluate(config, f, X)
        return evaluate_derivative(config, f, X, alpha.index(1))

    if norm.kind == "sup":
        return sup_error(approx, f, grid)
    if norm.kind == "lp":
        return lp_error(approx, f, grid, norm.p)
    if norm.kind == "sobolev":
        return sobolev_error(approx_partials, f, grid, norm.m, norm.p)
    return holder_error(approx, approx_partials, f, grid, norm.m, norm.alpha, seed=seed)


def run_sweep(plan: SweepPlan, workers: int = 1) -> list[ErrorRecord]:
    """One ErrorRecord per scale, in plan order.  Scales are independent; ``workers`` > 1
    evaluates them on a thread pool."""
    f = plan.target

    def one(n):
        value = operator_error(plan.config.with_n(n), f, plan.grid, plan.norm, plan.seed)
        return ErrorRecord(n, str(plan.norm), value)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, plan.n_values))
    return [one(n) for n in plan.n_values]


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log(error) = intercept + slope * log(n).

    ``saturated`` marks that some records fell below the noise floor and were dropped;
    when fewer than 3 usable records remain the fit is not attempted (``ok`` is False).
    """

    slope: float
    intercept: float
    r_squared: float
    records: tuple
    used: int
    saturated: bool

    @property
    def ok(self) -> bool:
        return self.used >= 3

    @property
    def constant(self) -> float:
        return math.exp(self.intercept)


def fit_rate(records, floor: float = 1e-15) -> RateFit:
    records = tuple(records)
    good = [r for r in records if r.value > 0 and r.value >= floor]
    saturated = len(good) < len(records)
    if len(good) < 3:
        return RateFit(math.nan, math.nan, math.nan, records, len(good), True)
    x = np.log([r.n for r in good])
    y = np.log([r.value for r in good])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return RateFit(float(slope), float(intercept), max(0.0, min(1.0, r2)), records, len(good), saturated)


def fit_sweep(plan: SweepPlan, records) -> RateFit:
    return fit_rate(records, floor=plan.saturation_floor)


def moment(config: OperatorConfig, x, alpha) -> float:
    """sum_k prod_i (k_i/n - x_i)^alpha_i Z(n x - k) over the truncation window.

    Both the monomial and Z factor over axes, so this is a product of 1-D sums.
    """
    x = as_point(x)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != x.size or len(alpha) != config.dimension:
        raise ValueError("multi-index, point and config dimensions must agree")
    if min(alpha) < 0 or sum(alpha) > 6:
        raise ValueError("moment supports multi-indices with 0 <= |alpha| <= 6")
    n, W = config.n, config.radius
    centers, w = axis_weights(config.activation, n, x[None, :], W)
    j = np.arange(-W, W + 1)
    out = 1.0
    for i, a in enumerate(alpha):
        k = centers[0, i] + j
        out *= float(np.sum((k / n - x[i]) ** a * w[0, i]))
    return out


def voronovskaya_residual(config: OperatorConfig, f: TestFunction, x, m: int):
    """Split A_n(f, x) - f(x) into derivative-weighted moments of order 1..m and a remainder.

    Returns (main_terms, residual) with main_terms + residual + f(x) == A_n(f, x).
    """
    if config.kind != "basic":
        raise ValueError("the Voronovskaya split is defined for the basic operator")
    if m < 1 or m > f.m_max:
        raise ValueError(f"order m={m} outside 1..{f.m_max} (available partials of {f.name})")
    if m > 6:
        raise ValueError("moments are available up to order 6")
    x = as_point(x)
    fx = f(x)
    a_n = float(evaluate(config, f, x[None, :])[0])
    main = 0.0
    for order in range(1, m + 1):
        for alpha in multi_indices(x.size, order):
            fact = math.prod(math.factorial(a) for a in alpha)
            main += f.partial(alpha, x) / fact * moment(config, x, alpha)
    return main, a_n - fx - main


@dataclass(frozen=True)
class VoronovskayaRow:
    n: int
    error: float
    main_terms: float
    residual: float


def voronovskaya_sweep(config: OperatorConfig, f: TestFunction, x, m: int, n_values=DEFAULT_N):
    """Per-scale |A_n f - f|, main terms and remainder at a fixed point, plus both rate fits."""
    rows = []
    for n in n_values:
        cfg = config.with_n(n)
        main, resid = voronovskaya_residual(cfg, f, x, m)
        rows.append(VoronovskayaRow(n, abs(main + resid), main, resid))
    floor = max(1e-15, 100 * config.truncation_tol)
    err_fit = fit_rate([ErrorRecord(r.n, "pointwise", r.error) for r in rows], floor)
    res_fit = fit_rate([ErrorRecord(r.n, "remainder", abs(r.residual)) for r in rows], floor)
    return rows, err_fit, res_fit
