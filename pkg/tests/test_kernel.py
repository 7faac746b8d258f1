import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from crmhe import EmpiricalSurvival, KernelEstimatorConfig, Weibull, estimate_crmhe, estimate_dcrmhe, silverman_bandwidth
from crmhe.errors import DegenerateSample, InvalidParameterError, TruncationBeyondSupport
from crmhe.simulation import rng_stream

SAMPLE = np.array([1.0, 2.0, 3.0])


def _oracle(sample, alpha, t, h):
    s = lambda x: float(np.mean(special.ndtr((sample - x) / h)))
    s_t = s(t)
    f = lambda x: (s(x) / s_t) ** (2.0 - alpha)
    top = sample.max() + 12 * h
    pts = [p for p in np.sort(sample) if t < p < top]
    val = integrate.quad(f, t, top, points=pts or None, epsabs=1e-13, epsrel=1e-12, limit=500)[0]
    return (val - 1.0) / (alpha - 1.0)


def test_silverman_bandwidth():
    assert silverman_bandwidth(SAMPLE) == pytest.approx(0.8509060554658446, rel=1e-15)
    x = rng_stream(1).normal(size=200)
    assert silverman_bandwidth(x) == pytest.approx(1.06 * np.std(x, ddof=1) * 200 ** -0.2, rel=1e-15)


def test_degenerate_samples():
    with pytest.raises(DegenerateSample):
        silverman_bandwidth([2.0, 2.0, 2.0])
    with pytest.raises(DegenerateSample):
        silverman_bandwidth([2.0])


def test_frozen_small_sample():
    assert estimate_crmhe(SAMPLE, 1.5).value == pytest.approx(3.75136739705, abs=1e-10)
    cfg = KernelEstimatorConfig(kernel="epanechnikov")
    assert estimate_crmhe(SAMPLE, 1.5, cfg).value == pytest.approx(3.0891836569, abs=1e-9)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
@pytest.mark.parametrize("t", [0.0, 0.8, 1.7])
def test_against_quad_oracle(alpha, t):
    x = Weibull(5.0, 1.0).sample(60, rng_stream(11))
    h = silverman_bandwidth(x)
    est = estimate_dcrmhe(x, alpha, t)
    # the neglected Gaussian tail beyond the padding is charged to the error, not the value
    assert abs(est.value - _oracle(x, alpha, t, h)) <= max(1e-8, est.estimated_abs_error)


def test_survival_properties():
    x = Weibull(2.0, 1.0).sample(80, rng_stream(5))
    for kernel in ("gaussian", "epanechnikov"):
        s = EmpiricalSurvival.from_sample(x, KernelEstimatorConfig(kernel=kernel))
        h = silverman_bandwidth(x)
        grid = np.linspace(x.min() - 9 * h, x.max() + 9 * h, 2001)
        v = s(grid)
        assert np.all(np.diff(v) <= 1e-15)
        assert v[0] == pytest.approx(1.0, abs=1e-12)
        assert v[-1] == pytest.approx(0.0, abs=1e-12)
        assert isinstance(s(0.5), float)


def test_epanechnikov_has_compact_support():
    s = EmpiricalSurvival(np.array([0.0, 10.0]), 1.0, "epanechnikov")
    assert s(11.0) == 0.0
    assert s(-1.0) == 1.0
    assert s(5.0) == 0.5


def test_t_zero_matches_static():
    x = Weibull(5.0, 1.0).sample(40, rng_stream(2))
    assert estimate_dcrmhe(x, 1.5, 0.0).value == estimate_crmhe(x, 1.5).value


def test_truncation_beyond_support():
    x = Weibull(5.0, 1.0).sample(40, rng_stream(2))
    h = silverman_bandwidth(x)
    with pytest.raises(TruncationBeyondSupport):
        estimate_dcrmhe(x, 1.5, x.max() + 20 * h)
    with pytest.raises(TruncationBeyondSupport):
        estimate_dcrmhe(x, 0.5, x.max() + 20 * h, KernelEstimatorConfig(kernel="epanechnikov"))


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_grid_refinement_within_reported_error(alpha):
    x = Weibull(5.0, 1.0).sample(90, rng_stream(9))
    for t in (0.0, 0.5, 1.0):
        coarse = estimate_dcrmhe(x, alpha, t)
        fine = estimate_dcrmhe(x, alpha, t, KernelEstimatorConfig(grid_points=4096))
        assert abs(coarse.value - fine.value) < coarse.estimated_abs_error


@pytest.mark.parametrize("alpha", [0.5, 1.5])
@pytest.mark.parametrize("a,b", [(2.0, 0.0), (0.5, 0.0), (3.0, 1.5)])
def test_affine_plug_in_consistency(alpha, a, b):
    x = Weibull(2.0, 1.0).sample(500, rng_stream(21))
    base = estimate_crmhe(x, alpha).value
    y = a * x + b
    got = estimate_dcrmhe(y, alpha, b).value
    assert got == pytest.approx(a * base + (a - 1.0) / (alpha - 1.0), abs=2e-3)


def test_fixed_bandwidth():
    cfg = KernelEstimatorConfig(bandwidth=0.3)
    s = EmpiricalSurvival.from_sample(SAMPLE, cfg)
    assert s.bandwidth == 0.3
    assert cfg.bandwidth_rule == "fixed"
    assert KernelEstimatorConfig().bandwidth_rule == "silverman"


@pytest.mark.parametrize(
    "kwargs",
    [{"kernel": "box"}, {"bandwidth": 0.0}, {"bandwidth": float("inf")}, {"grid_points": 10}, {"grid_points": 100.5}],
)
def test_config_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        KernelEstimatorConfig(**kwargs)


def test_grid_rounded_to_multiple_of_four():
    assert KernelEstimatorConfig(grid_points=2050).intervals == 2052


def test_bad_inputs():
    with pytest.raises(InvalidParameterError):
        estimate_dcrmhe(SAMPLE, 1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        estimate_dcrmhe(SAMPLE, 1.5, -1.0)
    with pytest.raises(InvalidParameterError):
        EmpiricalSurvival(np.array([1.0, np.nan]), 1.0)


@settings(max_examples=30, deadline=None)
@given(
    data=st.lists(st.floats(0.01, 100.0), min_size=3, max_size=40).filter(lambda v: np.ptp(v) > 1e-3),
    alpha=st.sampled_from([0.3, 0.7, 1.3, 1.7]),
)
def test_estimate_finite_and_scale_equivariant(data, alpha):
    x = np.array(data)
    v = estimate_crmhe(x, alpha)
    assert np.isfinite(v.value) and v.estimated_abs_error >= 0
    w = estimate_crmhe(2.0 * x, alpha)
    assert w.value == pytest.approx(2.0 * v.value + 1.0 / (alpha - 1.0), rel=1e-7, abs=1e-7)
