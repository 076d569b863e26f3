"""Perturbed tanh activation g_{q,lambda}, its derivative, and the bump densities.

All functions accept scalars or numpy arrays and broadcast over ``x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import expit

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ActivationParams:
    q: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        for name, v in (("q", self.q), ("lambda", self.lam)):
            if not isinstance(v, (int, float, np.floating, np.integer)):
                raise TypeError(f"{name} must be a real number, got {type(v).__name__}")
            if not math.isfinite(v) or v <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def dual(self) -> "ActivationParams":
        """Parameters with q replaced by 1/q."""
        return ActivationParams(1.0 / self.q, self.lam)

    @property
    def half_log_q(self) -> float:
        return 0.5 * math.log(self.q)


def g(params: ActivationParams, x):
    """(e^{lx} - q e^{-lx}) / (e^{lx} + q e^{-lx}), factoring out the dominant exponential."""
    t = params.lam * np.asarray(x, dtype=float)
    q = params.q
    pos = t >= 0
    # exp of a non-positive argument only: no overflow
    e = np.exp(np.where(pos, -2.0 * t, 2.0 * t))
    out = np.where(pos, (1.0 - q * e) / (1.0 + q * e), (e - q) / (e + q))
    return out[()] if out.ndim == 0 else out


def g_prime(params: ActivationParams, x):
    """4 q lambda / (e^{lx} + q e^{-lx})^2."""
    t = params.lam * np.asarray(x, dtype=float)
    q, lam = params.q, params.lam
    pos = t >= 0
    e = np.exp(np.where(pos, -2.0 * t, 2.0 * t))
    out = np.where(pos, 4 * q * lam * e / (1.0 + q * e) ** 2, 4 * q * lam * e / (e + q) ** 2)
    return out[()] if out.ndim == 0 else out


def _logcosh(u):
    a = np.abs(u)
    return a + np.log1p(np.exp(-2.0 * a)) - _LN2


def _bump(lam, shift, x):
    # (1/4)(tanh(a + lam) - tanh(a - lam)) = sinh(2 lam) / (4 cosh(a + lam) cosh(a - lam)),
    # a = lam x - shift; evaluated in log space so the tails keep full relative accuracy
    a = lam * x - shift
    log_sinh = 2.0 * lam + np.log1p(-np.exp(-4.0 * lam)) - _LN2
    return 0.25 * np.exp(log_sinh - _logcosh(a + lam) - _logcosh(a - lam)), a


def _bump_prime(lam, shift, x):
    m, a = _bump(lam, shift, x)
    return -lam * m * (np.tanh(a + lam) + np.tanh(a - lam))


def bump_M(params: ActivationParams, x):
    """M_{q,lambda}(x) = (g(x+1) - g(x-1)) / 4, computed without cancellation."""
    out, _ = _bump(params.lam, params.half_log_q, np.asarray(x, dtype=float))
    return out[()] if out.ndim == 0 else out


def phi(params: ActivationParams, x):
    """Symmetrized density (M_{q,lambda} + M_{1/q,lambda}) / 2.

    Evaluated at |x|, so phi(-x) == phi(x) holds bitwise.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    h = params.half_log_q
    m1, _ = _bump(params.lam, h, ax)
    m2, _ = _bump(params.lam, -h, ax)
    out = 0.5 * (m1 + m2)
    return out[()] if out.ndim == 0 else out


def phi_prime(params: ActivationParams, x):
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    h = params.half_log_q
    d = 0.5 * (_bump_prime(params.lam, h, ax) + _bump_prime(params.lam, -h, ax))
    out = np.sign(x) * d
    return out[()] if out.ndim == 0 else out


def _bump_lattice_tail(lam, shift, u, W):
    # Telescoped mass of sum_{|j|>W} M(u - j); 1 +- tanh(s) = 2 expit(+-2s)
    def s(y):
        return lam * y - shift

    right = 0.5 * (expit(2 * s(u - W)) + expit(2 * s(u - W - 1)))
    left = 0.5 * (expit(-2 * s(u + W)) + expit(-2 * s(u + W + 1)))
    return right + left


def lattice_tail_mass(params: ActivationParams, W: int, offsets=None) -> float:
    """Largest omitted mass sum_{|j|>W} phi(u - j) over offsets u (default: grid on [-1, 1])."""
    if offsets is None:
        offsets = np.linspace(-1.0, 1.0, 201)
    u = np.asarray(offsets, dtype=float)
    h = params.half_log_q
    tail = 0.5 * (_bump_lattice_tail(params.lam, h, u, W) + _bump_lattice_tail(params.lam, -h, u, W))
    return float(np.max(tail))


def window_radius(params: ActivationParams, tol: float) -> int:
    """Smallest W >= 1 with lattice tail mass outside [-W, W] below ``tol``.

    The bound covers every offset |u| <= 1 from the window center.
    """
    if not (0.0 < tol < 1.0):
        raise ValueError(f"tol must lie in (0, 1), got {tol!r}")
    hi = 1
    while lattice_tail_mass(params, hi) >= tol:
        hi *= 2
        if hi > 1 << 40:
            raise ValueError("window radius search did not converge")
    lo = hi // 2  # tail(lo) >= tol unless lo == 0
    if lo < 1:
        return hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if lattice_tail_mass(params, mid) < tol:
            hi = mid
        else:
            lo = mid
    return hi


def phi_tail_integral(params: ActivationParams, R: float) -> float:
    """Closed-form integral of phi over |x| > R (R >= 0).

    The right tail of M is (1/4) * integral_{R-1}^{R+1} (1 - g), and 1 - g integrates to a softplus.
    """
    lam = params.lam

    def right_tail(shift):
        s_lo = lam * (R - 1) - shift
        s_hi = lam * (R + 1) - shift
        return (np.logaddexp(0.0, -2 * s_lo) - np.logaddexp(0.0, -2 * s_hi)) / (4 * lam)

    h = params.half_log_q
    # left tail of M_q is the right tail of M_{1/q}; phi averages the two bumps
    return float(right_tail(h) + right_tail(-h))


def phi_integral(params: ActivationParams, tol: float = 1e-13) -> float:
    """Adaptive quadrature of phi on [-R, R] plus the analytic tail beyond R."""
    R = float(window_radius(params, tol))
    body, _ = quad(lambda t: phi(params, t), 0.0, R, epsabs=1e-14, epsrel=1e-12, limit=400)
    return 2.0 * body + phi_tail_integral(params, R)
