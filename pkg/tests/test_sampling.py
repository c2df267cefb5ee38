import numpy as np
import pytest

from tfrlab.errors import ValidationError
from tfrlab.sampling import (
    SampleSet,
    bandpass_reconstruct,
    compare_truncation,
    drop_sample,
    multiband_coefficients,
    multiband_reconstruct,
    multiband_samples,
    poisson_check,
    s0_window_reconstruct,
    sinc_window_stft,
    wkns_reconstruct,
)
from tfrlab.windows import Box, Gaussian, Sech, Sinc


def sinc2(t):
    return np.sinc(np.asarray(t)) ** 2


def _max_error(reconstruct, s, f, ts, **kw):
    return max(abs(reconstruct(s, t=t, **kw).value - complex(f(t))) for t in ts)


# ---------------- Sinc series ----------------

def test_nyquist_rate_reconstructs_sinc_squared():
    s = SampleSet.from_function(sinc2, 0.5, 200)
    ts = np.linspace(-5, 5, 100)
    assert _max_error(wkns_reconstruct, s, sinc2, ts, bandwidth=2.0) <= 1e-4


def test_half_rate_reconstructs_a_different_function():
    s = SampleSet.from_function(sinc2, 1.0, 200)
    ts = np.linspace(-5, 5, 101)
    assert _max_error(wkns_reconstruct, s, np.sinc, ts) <= 1e-14
    assert abs(wkns_reconstruct(s, 0.5).value - sinc2(0.5)) > 0.1


def test_undersampling_is_refused():
    s = SampleSet.from_function(sinc2, 1.0, 50)
    with pytest.raises(ValidationError) as err:
        wkns_reconstruct(s, 0.3, bandwidth=2.0)
    assert err.value.message == "undersampled: no guaranteed reconstruction"


def test_declared_band_is_used():
    s = SampleSet.from_function(sinc2, 1.0, 50, band=2.0)
    with pytest.raises(ValidationError):
        wkns_reconstruct(s, 0.3)


def test_error_shrinks_with_more_samples():
    ts = np.linspace(-3, 3, 61)
    errors = [_max_error(wkns_reconstruct, SampleSet.from_function(sinc2, 0.5, K), sinc2, ts, bandwidth=2.0)
              for K in (50, 100, 200)]
    assert errors[0] > errors[1] > errors[2]


def test_oversampled_reconstructions_agree(rng):
    coarse = SampleSet.from_function(sinc2, 0.5, 200)
    fine = SampleSet.from_function(sinc2, 0.25, 400)
    for t in rng.uniform(-5, 5, 50):
        r1 = wkns_reconstruct(coarse, t, 2.0)
        r2 = wkns_reconstruct(fine, t, 2.0)
        assert abs(r1.value - r2.value) <= r1.tail_bound + r2.tail_bound


def test_dropping_a_sample_removes_its_kernel():
    s = SampleSet.from_function(sinc2, 0.5, 40)
    k = 3
    for t in (-1.3, 0.2, 2.05):
        diff = wkns_reconstruct(s, t, 2.0).value - wkns_reconstruct(drop_sample(s, k), t, 2.0).value
        assert diff == pytest.approx(sinc2(0.5 * k) * np.sinc((t - 0.5 * k) / 0.5), abs=1e-13)


def test_sample_set_validation():
    with pytest.raises(ValidationError):
        SampleSet(np.array([]), 1.0)
    with pytest.raises(ValidationError):
        SampleSet(np.ones(3), 0.0)
    s = SampleSet(np.ones(5), 0.5, k_min=-2)
    assert s.k_max == 2
    np.testing.assert_allclose(s.times, [-1.0, -0.5, 0.0, 0.5, 1.0])


# ---------------- Bandpass and multiband ----------------

def test_bandpass_reconstruction():
    f = lambda t: sinc2(t) * np.exp(6j * np.pi * np.asarray(t))
    s = SampleSet.from_function(f, 0.5, 200)
    ts = np.linspace(-2.1, 2.1, 43)
    assert _max_error(bandpass_reconstruct, s, f, ts, carrier=3.0, bandwidth=2.0) <= 1e-4
    assert _max_error(bandpass_reconstruct, s, f, ts, carrier=3.5, bandwidth=2.0) > 0.05
    for t in ts[:5]:
        assert bandpass_reconstruct(s, 0.0, t, 2.0).value == pytest.approx(wkns_reconstruct(s, t, 2.0).value)


@pytest.mark.parametrize("k", [-2, 0, 3])
@pytest.mark.parametrize("l", [-1, 0, 2])
def test_multiband_coefficients_are_sinc_window_stft(k, l):
    assert abs(multiband_coefficients(Gaussian(), k, l) - sinc_window_stft(Gaussian(), k, l)) <= 1e-8


def test_multiband_reconstruction_of_gaussian():
    bands = multiband_samples(Gaussian(), range(-2, 3), 40)
    for t in (-0.7, 0.0, 0.4, 1.1):
        res = multiband_reconstruct(bands, t)
        assert abs(res.value - complex(Gaussian()(t))) <= 1e-2


def test_multiband_needs_bands():
    with pytest.raises(ValidationError) as err:
        multiband_reconstruct([], 0.0)
    assert err.value.code == "sampling.no_bands"


# ---------------- Raised-cosine window ----------------

def test_raised_cosine_series_on_narrow_gaussian():
    f = Gaussian(scale=0.008)
    s = SampleSet.from_function(f, 1.0, 60, band=0.5)
    ts = np.linspace(-10, 10, 21)
    assert _max_error(s0_window_reconstruct, s, f, ts) <= 1e-8


def test_raised_cosine_needs_band_inside_flat_region():
    s = SampleSet.from_function(Gaussian(scale=0.008), 1.0, 60, band=1.0)
    with pytest.raises(ValidationError) as err:
        s0_window_reconstruct(s, t=0.0)
    assert err.value.message == "band of f exceeds the flat region of the window"
    with pytest.raises(ValidationError):
        s0_window_reconstruct(SampleSet.from_function(Gaussian(), 1.0, 10), t=0.0)


def test_raised_cosine_truncates_better_than_sinc():
    table = compare_truncation()
    assert list(table["K"]) == [10, 20, 40, 80]
    assert (table["s0_error"] < table["sinc_error"]).all()
    assert np.all(np.diff(table["sinc_error"]) < 0)
    assert np.all(np.diff(table["s0_error"]) < 0)


# ---------------- Poisson summation ----------------

@pytest.mark.parametrize("t", [0.0, 0.5, -0.3])
def test_poisson_summation_for_gaussian(t):
    check = poisson_check(Gaussian(), t, 8)
    assert check.difference <= 1e-12
    assert check.tail_bound < 1e-12


def test_poisson_lhs_is_theta_value():
    k = np.arange(-30, 31)
    assert poisson_check(Gaussian(), 0.0, 8).lhs == pytest.approx(np.sum(2 ** 0.25 * np.exp(-np.pi * k * k)))


def test_poisson_summation_for_sech():
    check = poisson_check(Sech(), 0.2, 40, alpha=0.5)
    assert check.difference <= 1e-12
    assert check.difference <= check.tail_bound + 1e-13


@pytest.mark.parametrize("window", [Box(), Sinc()])
def test_poisson_refuses_slow_decay(window):
    with pytest.raises(ValidationError) as err:
        poisson_check(window, 0.0, 8)
    assert err.value.code == "sampling.decay_hypothesis"
