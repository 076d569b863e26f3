import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tanhops.activation import ActivationParams
from tanhops.convergence import (DEFAULT_N, SweepPlan, fit_rate, fit_sweep, moment, run_sweep,
                                 voronovskaya_residual, voronovskaya_sweep)
from tanhops.density import build_window, weight_sum
from tanhops.operators import OperatorConfig, apply_basic
from tanhops.testbed import (ErrorRecord, GridSpec, NormKind, centered_monomial, get_function,
                             multi_indices, power_sum)

from oracles import tanh_phi

GRID = GridSpec((-1.0,), (1.0,), 101)


def records(ns, values):
    return [ErrorRecord(n, "sup", v) for n, v in zip(ns, values)]


def test_fit_exact_power_law():
    ns = np.array(DEFAULT_N)
    fit = fit_rate(records(ns, 7.0 * ns**-2.0))
    assert abs(fit.slope + 2) < 1e-12
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.constant == pytest.approx(7.0, rel=1e-12)
    assert not fit.saturated and fit.ok


@pytest.mark.parametrize("ns", [DEFAULT_N, tuple(range(5, 14))])
def test_fit_wobbly_power_law(ns):
    ns = np.array(ns)
    e = 3.0 * ns**-1.5 * (1 + 0.01 * (-1.0) ** ns)
    assert abs(fit_rate(records(ns, e)).slope + 1.5) < 0.05


def test_fit_excludes_zero():
    ns = [8, 16, 32, 64]
    fit = fit_rate(records(ns, [1e-2, 2.5e-3, 0.0, 1.5625e-4]))
    assert fit.saturated and fit.used == 3 and fit.ok
    assert fit.slope == pytest.approx(-2.0, abs=1e-12)


def test_fit_all_saturated():
    fit = fit_rate(records([8, 16, 32], [0.0, 1e-16, 0.0]))
    assert not fit.ok and fit.saturated and math.isnan(fit.slope)


@given(st.floats(-5, -0.1), st.floats(1e-3, 1e3))
def test_fit_recovers_any_power_law(slope, C):
    ns = np.array(DEFAULT_N, dtype=float)
    fit = fit_rate(records(DEFAULT_N, C * ns**slope))
    assert abs(fit.slope - slope) < 1e-10
    assert fit.r_squared > 1 - 1e-12


def test_sweep_plan_validation():
    cfg = OperatorConfig()
    with pytest.raises(ValueError):
        SweepPlan(cfg, "gaussian", GRID, n_values=(8, 16))
    with pytest.raises(ValueError):
        SweepPlan(cfg, "gaussian", GRID, n_values=(8, 32, 16))
    with pytest.raises(ValueError):
        SweepPlan(cfg, "gaussian", GridSpec((0, 0), (1, 1), 5))


def test_sweep_constant_is_at_noise_floor():
    plan = SweepPlan(OperatorConfig(), "constant", GRID)
    recs = run_sweep(plan)
    assert all(r.value < plan.config.truncation_tol for r in recs)
    assert not fit_sweep(plan, recs).ok


def test_sweep_gaussian_decreasing():
    recs = run_sweep(SweepPlan(OperatorConfig(), "gaussian", GRID))
    v = [r.value for r in recs]
    assert all(b < a for a, b in zip(v, v[1:]))
    assert [r.n for r in recs] == list(DEFAULT_N)


def test_sweep_truncation_sensitivity():
    ns = (8, 16, 32, 64)
    base = run_sweep(SweepPlan(OperatorConfig(truncation_tol=1e-12), "gaussian", GRID, n_values=ns))
    doubled = run_sweep(SweepPlan(OperatorConfig(truncation_tol=2e-12), "gaussian", GRID, n_values=ns))
    loose = run_sweep(SweepPlan(OperatorConfig(truncation_tol=1e-6), "gaussian", GRID, n_values=ns))
    for a, b, c in zip(base, doubled, loose):
        assert abs(a.value - b.value) < 1e-5 * a.value
        # omitted kernel mass is below the tolerance and |f| <= 1
        assert abs(a.value - c.value) <= 1e-6


def test_sweep_parallel_matches_serial():
    plan = SweepPlan(OperatorConfig("kantorovich"), "trig", GRID, NormKind.parse("sobolev:1:2"))
    assert run_sweep(plan) == run_sweep(plan, workers=3)


@pytest.mark.parametrize("norm", ["sup", "lp:2", "sobolev:1:2", "holder:0:0.5", "holder:1:0.5"])
def test_sweep_norm_kinds_decrease_on_smooth_target(norm):
    plan = SweepPlan(OperatorConfig(), "gaussian", GRID, NormKind.parse(norm), n_values=(8, 16, 32, 64))
    v = [r.value for r in run_sweep(plan)]
    assert all(b < a for a, b in zip(v, v[1:]))
    assert all(r.norm_kind == str(NormKind.parse(norm)) for r in run_sweep(plan))


def test_moment_zero_is_weight_sum():
    rng = np.random.default_rng(4)
    for _ in range(30):
        N = int(rng.integers(1, 4))
        cfg = OperatorConfig("basic", int(rng.integers(1, 100)), N,
                             ActivationParams(float(np.exp(rng.uniform(-1, 1))), float(rng.uniform(0.5, 3))))
        x = rng.uniform(-1, 1, N)
        win = build_window(cfg.n, x, cfg.activation, cfg.truncation_tol)
        assert abs(moment(cfg, x, (0,) * N) - weight_sum(cfg.n, x, cfg.activation, win)) < 1e-14


def _brute_moment(n, x, a, radius):
    k0 = round(n * x)
    k = np.arange(k0 - radius, k0 + radius + 1)
    return math.fsum((k / n - x) ** a * tanh_phi(1, 1, n * x - k))


@pytest.mark.parametrize("a", [1, 3, 5])
def test_odd_moments_vanish_at_lattice_points(a):
    for n in (4, 8, 32):
        cfg = OperatorConfig("basic", n)
        for k0 in (-3, 0, 5):
            x = k0 / n
            assert abs(moment(cfg, [x], (a,))) < 1e-12
            assert abs(_brute_moment(n, x, a, 3 * cfg.radius)) < 1e-12


def test_moment_matches_brute_force_off_lattice():
    for n, x in [(8, 0.3), (16, -0.71)]:
        cfg = OperatorConfig("basic", n)
        W = cfg.radius
        for a in range(1, 7):
            ours = moment(cfg, [x], (a,))
            # rounding scales with the largest summand, about (W/n)^a
            assert abs(ours - _brute_moment(n, x, a, W)) < 1e-16 * max(1.0, (W / n) ** a)
            # the omitted tail carries weights up to (3W/n)^a
            assert abs(ours - _brute_moment(n, x, a, 3 * W)) < cfg.truncation_tol * (3 * W / n) ** a


def test_moment_equals_operator_on_centered_monomial():
    cfg = OperatorConfig("basic", 8, dimension=2, activation=ActivationParams(2.0, 1.3))
    x = np.array([0.21, -0.33])
    for alpha in [(1, 0), (2, 1), (0, 3), (2, 2)]:
        assert moment(cfg, x, alpha) == pytest.approx(
            apply_basic(cfg, centered_monomial(x, alpha), x), rel=1e-12, abs=1e-16)


def test_second_moment_scaling():
    recs = [ErrorRecord(n, "m2", moment(OperatorConfig("basic", n), [0.3], (2,))) for n in DEFAULT_N]
    assert abs(fit_rate(recs).slope + 2) < 0.05


def test_even_moments_positive():
    rng = np.random.default_rng(9)
    for alpha in [(2,), (4,), (6,), (2, 0), (2, 4), (0, 0, 2)]:
        N = len(alpha)
        cfg = OperatorConfig("basic", 16, N, ActivationParams(0.4, 1.7))
        assert moment(cfg, rng.uniform(-1, 1, N), alpha) > 0


def test_moment_rejects_high_order():
    with pytest.raises(ValueError):
        moment(OperatorConfig(), [0.0], (7,))


@pytest.mark.parametrize("N,m", [(1, 2), (1, 4), (2, 4)])
def test_voronovskaya_exact_for_polynomials(N, m):
    f = power_sum(N, m, "poly")
    cfg = OperatorConfig("basic", 8, N)
    for x in np.random.default_rng(1).uniform(-1, 1, size=(5, N)):
        _, resid = voronovskaya_residual(cfg, f, x, m)
        assert abs(resid) < 1e-10


def test_voronovskaya_odd_terms_vanish_at_lattice_point():
    f = get_function("gaussian", 1)
    n = 16
    cfg = OperatorConfig("basic", n)
    x = np.array([5 / n])
    odd = sum(f.partial(a, x) / math.factorial(a[0]) * moment(cfg, x, a)
              for order in (1, 3) for a in multi_indices(1, order))
    assert abs(odd) < 1e-10
    # the main terms then equal the even-order part alone
    main, _ = voronovskaya_residual(cfg, f, x, 3)
    even = f.partial((2,), x) / 2 * moment(cfg, x, (2,))
    assert abs(main - even) < 1e-10


def test_voronovskaya_identity():
    cfg = OperatorConfig("basic", 8)
    f = get_function("trig", 1)
    for n in DEFAULT_N:
        c = cfg.with_n(n)
        main, resid = voronovskaya_residual(c, f, [0.4], 3)
        a_n = apply_basic(c, f, [0.4])
        assert main + resid + f(np.array([0.4])) == pytest.approx(a_n, abs=4e-16)


def test_voronovskaya_remainder_decays_faster():
    _, err_fit, res_fit = voronovskaya_sweep(OperatorConfig(), get_function("gaussian", 1), [0.3], 2)
    assert res_fit.slope <= err_fit.slope - 0.5


def test_voronovskaya_validation():
    f = get_function("poly4", 1)
    with pytest.raises(ValueError):
        voronovskaya_residual(OperatorConfig(), f, [0.0], 5)
    with pytest.raises(ValueError):
        voronovskaya_residual(OperatorConfig("kantorovich"), f, [0.0], 2)
