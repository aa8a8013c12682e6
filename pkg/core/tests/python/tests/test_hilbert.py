"""
The Hilbert transform of step functions, the averaging kernels and the
translation/dilation average of Haar shifts.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis.strategies import floats

from pydyadic import hilbert
from pydyadic.dyadic import (
    G,
    H0,
    UNIT,
    PiecewiseConstant,
    haar_function,
    inner_product,
    lp_norm,
    translate,
)
from pydyadic.hilbert import LIMIT_CONSTANT, AveragingConfig, FitError, PiecewiseLinear

BOX = PiecewiseConstant.indicator(0.0, 1.0)


def test_hilbert_of_a_box():
    """
    H1_[0,1)(x) = ln |x / (x - 1)|.
    """
    x = np.array([-1.5, 0.5, 2.0, 7.25])
    assert np.allclose(hilbert.hilbert_pv(BOX, x), np.log(np.abs(x / (x - 1))), atol=1e-14)
    assert hilbert.hilbert_pv(BOX, 2.0) == pytest.approx(math.log(2.0))
    assert hilbert.hilbert_pv(PiecewiseConstant.zero(), 0.3) == 0.0


def test_hilbert_refuses_breakpoints():
    with pytest.raises(ValueError, match="off the breakpoints"):
        hilbert.hilbert_pv(BOX, np.array([0.5, 1.0]))


def test_truncated_integral_matches_principal_value():
    """
    The quadrature of the truncated integral recovers the closed form.
    """
    f = hilbert.TEST_FUNCTIONS["bump"]
    for x in (-0.4, 0.3, 0.6, 1.7):
        assert hilbert.hilbert_truncated(f, x, 1e-6) == pytest.approx(
            hilbert.hilbert_pv(f, x), abs=1e-7
        )
    with pytest.raises(ValueError):
        hilbert.hilbert_truncated(f, 0.3, 0.0)


def test_piecewise_linear():
    """
    Evaluation, integrals and integral-preserving dilation.
    """
    tent = PiecewiseLinear([-1.0, 0.0, 1.0], [0.0, 1.0, 0.0])
    assert tent(0.5) == 0.5
    assert tent(3.0) == 0.0
    assert tent.integral() == pytest.approx(1.0)
    assert tent.integral(0.0, 0.5) == pytest.approx(0.375)
    assert tent.dilate(4.0).integral() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        PiecewiseLinear([0.0, 1.0], [1.0])


def test_gamma0_nodes():
    """
    gamma0 is odd, supported in [-1, 1], with the quarter values
    -3/4, 0, 1/4, 0 on the right.
    """
    kernel = hilbert.gamma0()
    assert kernel.breakpoints.tolist() == [k / 4 for k in range(-4, 5)]
    right = kernel(np.array([0.0, 0.25, 0.5, 0.75, 1.0]))
    assert np.allclose(right, [0.0, -0.75, 0.0, 0.25, 0.0], atol=1e-14)
    x = np.linspace(-1.2, 1.2, 49)
    assert np.allclose(kernel(-x), -kernel(x), atol=1e-14)
    assert kernel.integral(0.0, 1.0) == pytest.approx(-0.125)


@given(floats(min_value=-2.0, max_value=2.0))
def test_gamma0_is_odd(x):
    """
    gamma0(-x) = -gamma0(x) at any point.
    """
    kernel = hilbert.gamma0()
    assert kernel(-x) == pytest.approx(-kernel(x), abs=1e-14)


def test_gamma_sum_is_negative_on_the_positive_axis():
    """
    The summed kernels over -10 <= j <= 10 are odd and strictly negative on
    [0.01, 10].
    """
    x = np.linspace(0.01, 10.0, 2000)
    total = hilbert.gamma_sum(x, -10, 10)
    assert np.all(total < 0)
    assert np.allclose(hilbert.gamma_sum(-x, -10, 10), -total, atol=1e-12)


@given(floats(min_value=0.01, max_value=10.0))
def test_gamma_sum_sign_at_any_point(x):
    """
    One-signedness and oddness hold at every point, not only on a grid.
    """
    total = hilbert.gamma_sum(x, -10, 10)
    assert total < 0
    assert hilbert.gamma_sum(-x, -10, 10) == pytest.approx(-total, abs=1e-12)


def test_gamma0_pairs_translated_haar_functions():
    """
    gamma0(y) = <g, Tr_y h> for h and g on the same interval.
    """
    h = haar_function(UNIT, H0)
    g = haar_function(UNIT, G)
    kernel = hilbert.gamma0()
    for y in (-0.6, 0.25, 0.5, 0.8):
        assert inner_product(g, translate(h, y)) == pytest.approx(kernel(y), abs=1e-14)


def test_log_averaged_kernel_limit():
    """
    Averaging the dilated kernels over one octave gives LIMIT_CONSTANT / x.
    """
    t = (np.arange(256) + 0.5) / 256
    for x in (0.3, 1.0, 5.0):
        values = [2.0**-s * hilbert.gamma_sum(x / 2.0**s, -30, 30) for s in t]
        assert x * np.mean(values) == pytest.approx(LIMIT_CONSTANT, rel=1e-3)
    with pytest.raises(ValueError):
        hilbert.gamma_sum(1.0, 2, 1)


def test_averaging_config_validation():
    with pytest.raises(ValueError):
        AveragingConfig(Y=0.0)
    with pytest.raises(ValueError):
        AveragingConfig(n_y=0)
    with pytest.raises(ValueError):
        AveragingConfig(scales=(3, 1))


def test_draw_samples():
    """
    Stratified samples are reproducible from the seed.
    """
    cfg = AveragingConfig(Y=16.0, n_y=8, n_lambda=4, seed=5)
    samples = hilbert.draw_samples(cfg)
    assert len(samples) == 32
    assert np.all((samples.y >= 0) & (samples.y <= 16.0))
    assert np.all((samples.lam >= 1.0) & (samples.lam <= 2.0))
    # One sample per stratum
    assert np.array_equal(np.floor(samples.y / 2.0), np.arange(8))
    again = hilbert.draw_samples(cfg)
    assert np.array_equal(samples.y, again.y)
    y, lam = samples.pairs()
    assert y.size == lam.size == 32
    assert np.allclose(samples.shifted(1.0).y, samples.y + 1.0)


def test_windowed_shift_of_a_haar_function():
    """
    On the whole line the windowed shift still sends h to g.
    """
    h = haar_function(UNIT, H0)
    g = haar_function(UNIT, G)
    for scales in ((0, 0), (-3, 5)):
        assert lp_norm(hilbert.haar_shift_window(h, scales) - g, math.inf) < 1e-12


def test_windowed_shift_commutes_with_coarse_translations():
    """
    Translating by a multiple of the coarsest scale commutes with the
    windowed shift.
    """
    scales = (-3, 1)
    f = hilbert.TEST_FUNCTIONS["bump"]
    for m in (-3, 1, 5):
        t = m * 2.0 ** scales[1]
        moved = hilbert.haar_shift_window(translate(f, t), scales)
        expected = translate(hilbert.haar_shift_window(f, scales), t)
        assert lp_norm(moved - expected, math.inf) < 1e-12


def test_window_must_cover_the_support():
    cfg = AveragingConfig(scales=(-2, 0))
    with pytest.raises(ValueError, match="too small"):
        hilbert.averaged_shift_values(BOX, cfg, [2.0])


def test_averaged_shift_is_exact_between_breakpoints():
    """
    The step-function average agrees with pointwise averages.
    """
    cfg = AveragingConfig(Y=8.0, n_y=3, n_lambda=2, scales=(-2, 2), seed=1)
    f = hilbert.TEST_FUNCTIONS["bump"]
    average = hilbert.averaged_shift(f, cfg)
    x = np.random.default_rng(0).uniform(-3.0, 12.0, 50)
    assert np.allclose(average(x), hilbert.averaged_shift_values(f, cfg, x), atol=1e-12)


def test_averaged_shift_is_linear():
    """
    Under one shared sample set the average of a f + b g is a Av(f) + b Av(g).
    """
    cfg = AveragingConfig(Y=16.0, n_y=6, n_lambda=5, scales=(-3, 3), seed=2)
    samples = hilbert.draw_samples(cfg)
    f, g = hilbert.TEST_FUNCTIONS["box"], hilbert.TEST_FUNCTIONS["ramp"]
    x = np.random.default_rng(1).uniform(-2.0, 18.0, 40)
    combined = hilbert.averaged_shift_values(2.5 * f - 0.75 * g, cfg, x, samples)
    first = hilbert.averaged_shift_values(f, cfg, x, samples)
    second = hilbert.averaged_shift_values(g, cfg, x, samples)
    separate = 2.5 * first - 0.75 * second
    assert np.allclose(combined, separate, atol=1e-12, rtol=0)


def test_averaged_shift_commutes_with_shared_translations():
    """
    Translating f and the samples by a multiple of 2**b translates the average.
    """
    cfg = AveragingConfig(Y=16.0, n_y=6, n_lambda=5, scales=(-3, 3), seed=2)
    samples = hilbert.draw_samples(cfg)
    f = hilbert.TEST_FUNCTIONS["bump"]
    x = np.random.default_rng(3).uniform(-2.0, 18.0, 40)
    for m in (1, -2):
        t = m * 2.0 ** cfg.scales[1]
        moved = hilbert.averaged_shift_values(translate(f, t), cfg, x + t, samples.shifted(t))
        assert np.allclose(moved, hilbert.averaged_shift_values(f, cfg, x, samples), atol=1e-10)


def test_single_sample_is_a_dilated_translated_shift():
    """
    With one sample the average is the conjugated windowed shift.
    """
    cfg = AveragingConfig(scales=(-3, 3))
    samples = hilbert.AveragingSamples(np.array([0.0]), np.array([1.0]))
    x = np.array([0.1, 0.3, 0.55, 0.8, 1.4])
    direct = hilbert.haar_shift_window(BOX, cfg.scales)(x)
    assert np.allclose(hilbert.averaged_shift_values(BOX, cfg, x, samples), direct, atol=1e-12)


def test_comparison_points_avoid_breakpoints():
    """
    Points keep more than 2**(a + 1) away from every breakpoint.
    """
    cfg = AveragingConfig(scales=(-5, 12))
    x = hilbert.comparison_points(hilbert.TEST_FUNCTIONS["ramp"], cfg, points=300)
    assert 0 < x.size < 300
    assert np.min(np.abs(x[:, None] - np.array([0.0, 0.25, 0.5, 0.75, 1.0]))) > 2.0**-4


def test_fit_constant_small_sample():
    """
    A small sample already lines the averaged shift up with the Hilbert
    transform.
    """
    cfg = AveragingConfig(Y=1024.0, n_y=64, n_lambda=64, scales=(-8, 12), seed=0)
    tests = [hilbert.TEST_FUNCTIONS["box"], hilbert.TEST_FUNCTIONS["bump"]]
    report = hilbert.fit_constant(tests, cfg, points=128)
    assert report["samples"] == 64 * 64
    assert all(c < 0 for c in report["c_hat"])
    assert min(report["cosine"]) >= 0.95
    for c in report["c_hat"]:
        assert c == pytest.approx(LIMIT_CONSTANT, rel=0.15)
    assert "series" not in report


def test_fit_constant_is_scale_invariant():
    """
    Doubling a test function leaves its fitted constant unchanged.
    """
    cfg = AveragingConfig(Y=64.0, n_y=8, n_lambda=8, scales=(-6, 8), seed=4)
    samples = hilbert.draw_samples(cfg)
    box, bump = hilbert.TEST_FUNCTIONS["box"], hilbert.TEST_FUNCTIONS["bump"]
    once = hilbert.fit_constant([box, bump], cfg, points=64, samples=samples)
    twice = hilbert.fit_constant([2 * box, bump], cfg, points=64, samples=samples)
    assert twice["c_hat"][0] == pytest.approx(once["c_hat"][0], rel=1e-12)
    assert twice["cosine"][0] == pytest.approx(once["cosine"][0], rel=1e-12)


def test_fit_constant_errors():
    """
    At least two test functions, none of them zero.
    """
    cfg = AveragingConfig(n_y=2, n_lambda=2)
    with pytest.raises(ValueError):
        hilbert.fit_constant([BOX], cfg)
    with pytest.raises(FitError):
        hilbert.fit_constant([BOX, PiecewiseConstant.zero()], cfg, points=16)


@pytest.mark.slow
def test_fit_constant_full_sample():
    """
    The default sample set meets the cosine and dispersion targets.
    """
    cfg = AveragingConfig()
    tests = [hilbert.TEST_FUNCTIONS[name] for name in ("box", "bump", "ramp")]
    report = hilbert.fit_constant(tests, cfg, keep_series=True)
    assert min(report["cosine"]) >= 0.99
    assert report["dispersion"] <= 0.05
    for c in report["c_hat"]:
        assert c == pytest.approx(LIMIT_CONSTANT, rel=0.05)
    assert len(report["series"]) == 3
