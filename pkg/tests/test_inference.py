import math

import numpy as np
import pytest
from scipy import stats

from crmhe import Weibull
from crmhe.errors import FitError, InvalidParameterError
from crmhe.inference import (
    KS_WARNING,
    Dataset,
    analyze,
    bootstrap_dcrmhe,
    fit_weibull_mle,
    kolmogorov_sf,
    ks_statistic,
    load_dataset,
)
from crmhe.simulation import rng_stream

SWITCH = Weibull(3.85819, 2.3409)


def _loglik(x, k, lam):
    return float(stats.weibull_min.logpdf(x, k, scale=lam).sum())


@pytest.mark.parametrize("shape,scale", [(5.0, 1.0), (0.7, 3.0), (2.0, 10.0), (3.85819, 2.3409)])
def test_mle_against_scipy(shape, scale):
    x = Weibull(shape, scale).sample(60, rng_stream(4))
    fit = fit_weibull_mle(x)
    k, _, lam = stats.weibull_min.fit(x, floc=0)
    assert fit.shape == pytest.approx(k, rel=1e-4)
    assert fit.scale == pytest.approx(lam, rel=1e-4)
    # at least as good a maximum as scipy's optimizer finds
    assert _loglik(x, fit.shape, fit.scale) >= _loglik(x, k, lam) - 1e-9


def test_mle_score_equations():
    x = SWITCH.sample(40, rng_stream(8))
    fit = fit_weibull_mle(x)
    k, lam = fit.shape, fit.scale
    z = (x / lam) ** k
    # d/dlam and d/dk of the log-likelihood vanish
    assert abs(np.mean(z) - 1.0) < 1e-9
    assert abs(1 / k + np.mean(np.log(x / lam)) - np.mean(z * np.log(x / lam))) < 1e-9


@pytest.mark.parametrize("c", [0.01, 3.0, 250.0])
def test_mle_scale_invariance(c):
    x = SWITCH.sample(40, rng_stream(8))
    a, b = fit_weibull_mle(x), fit_weibull_mle(c * x)
    assert b.shape == pytest.approx(a.shape, rel=1e-8)
    assert b.scale == pytest.approx(c * a.scale, rel=1e-8)


def test_mle_degenerate():
    with pytest.raises(FitError):
        fit_weibull_mle(np.full(10, 2.0))
    with pytest.raises(FitError):
        fit_weibull_mle([1.0, 2.0, 3.0])


def test_ks_against_scipy():
    x = SWITCH.sample(40, rng_stream(3))
    d, p = ks_statistic(x, SWITCH)
    ref = stats.kstest(x, SWITCH.cdf)
    assert d == pytest.approx(ref.statistic, abs=1e-14)
    assert p == pytest.approx(stats.kstwobign.sf(math.sqrt(40) * d), rel=1e-10)


def test_ks_invariant_under_monotone_transform():
    x = SWITCH.sample(50, rng_stream(3))
    d, _ = ks_statistic(x, Weibull(4.0, 2.0))
    # x -> x**c maps Weibull(k, lam) onto Weibull(k/c, lam**c)
    d2, _ = ks_statistic(x**2.5, Weibull(4.0 / 2.5, 2.0**2.5))
    assert d2 == pytest.approx(d, abs=1e-12)


@pytest.mark.parametrize("lam", [0.05, 0.2, 0.29, 0.31, 0.5, 0.8, 1.0, 1.36, 2.0, 3.0])
def test_kolmogorov_sf(lam):
    assert kolmogorov_sf(lam) == pytest.approx(stats.kstwobign.sf(lam), rel=1e-10, abs=1e-15)


def test_dataset_validation():
    with pytest.raises(InvalidParameterError):
        Dataset(np.array([1.0, 2.0]))
    with pytest.raises(InvalidParameterError):
        Dataset(np.array([1.0, 2.0, 3.0, 4.0, -1.0]))
    with pytest.raises(InvalidParameterError):
        Dataset(np.array([1.0, 2.0, 3.0, 4.0, np.inf]))


def test_load_dataset_layouts(tmp_path):
    values = [1.5, 2.25, 0.75, 3.0, 1.0, 2.0]
    one = tmp_path / "one.txt"
    one.write_text("# lifetimes\n" + "\n".join(map(str, values)) + "\n")
    csv_ = tmp_path / "with_header.csv"
    csv_.write_text("id,x\n" + "\n".join(f"{i},{v}" for i, v in enumerate(values)))
    flat = tmp_path / "flat.txt"
    flat.write_text("1.5 2.25, 0.75\n3.0 1.0 2.0")
    for path in (one, csv_, flat):
        ds = load_dataset(path)
        assert ds.values.tolist() == values
    assert load_dataset(one).label == "one"


def test_load_dataset_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1\n2\nthree\n4\n5\n")
    with pytest.raises(InvalidParameterError):
        load_dataset(bad)
    with pytest.raises(InvalidParameterError):
        load_dataset(tmp_path / "missing.txt")


def test_bootstrap_deterministic():
    x = SWITCH.sample(40, rng_stream(1))
    a = bootstrap_dcrmhe(x, SWITCH, 1.5, (0.9, 1.1), reps=120, seed=5)
    b = bootstrap_dcrmhe(x, SWITCH, 1.5, (0.9, 1.1), reps=120, seed=5, workers=2, chunk=50)
    c = bootstrap_dcrmhe(x, SWITCH, 1.5, (0.9, 1.1), reps=120, seed=6)
    assert a == b
    assert a != c
    for row in a.rows:
        assert row.bias == row.mean_estimate - row.theoretical
        assert row.mse >= 0


def test_bootstrap_pinned_theoretical_column():
    x = SWITCH.sample(40, rng_stream(1))
    report = bootstrap_dcrmhe(x, SWITCH, 1.5, (0.9, 1.0, 1.1, 1.2, 1.3), reps=50, seed=1)
    expected = (1.3142, 1.1344, 0.9598, 0.7909, 0.6281)
    for row, e in zip(report.rows, expected):
        assert row.theoretical == pytest.approx(e, abs=2e-3)
    assert report.resample_size == 40
    assert report.fitted == ("weibull", (3.85819, 2.3409))


def test_bootstrap_resample_size_flag():
    x = SWITCH.sample(40, rng_stream(1))
    report = bootstrap_dcrmhe(x, SWITCH, 1.5, (0.9,), reps=20, seed=1, resample_size=70)
    assert report.resample_size == 70
    assert any("70" in w for w in report.warnings)


def test_bootstrap_t_beyond_data():
    x = SWITCH.sample(40, rng_stream(1))
    report = bootstrap_dcrmhe(x, SWITCH, 1.5, (0.9, 8.0), reps=30, seed=1)
    assert report.rows[0].error == ""
    assert "TruncationBeyondSupport" in report.rows[1].error


def test_analyze_end_to_end():
    x = SWITCH.sample(40, rng_stream(12345))
    report = analyze(x, 1.5, (0.9, 1.3), reps=100, seed=2)
    assert report.fit.n == 40
    assert 0.0 <= report.fit.ks_p_value <= 1.0
    assert KS_WARNING in report.warnings
    fitted = Weibull(report.fit.shape, report.fit.scale)
    assert report.bootstrap.fitted == ("weibull", fitted.params)
    assert len(report.point_estimates) == 2
