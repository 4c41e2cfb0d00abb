import math

import numpy as np
import pytest

from excess_entropy.entropy import estimator_series
from excess_entropy.errors import InvalidDensityError, InvalidModelError, NotPositiveDefiniteError
from excess_entropy.gaussian import (
    GaussianModel,
    ar1,
    cepstrum_coefficients,
    cepstrum_parity_residue,
    covariance_summability_report,
    from_table,
    gaussian_entropy_curve,
    kolmogorov_entropy_rate,
    levinson_durbin,
    mutual_info_cepstrum,
    white_noise,
)

HALF_LOG_2PIE = 1.4189385332046727
AR1_RATE = 1.2750974969787823  # (1/2) ln(2 pi e (1 - 0.25))
AR1_IPF = 0.14384103622589045  # -(1/2) ln(0.75)


def scaled(model, c):
    return GaussianModel(density=lambda lam: c * model.density(lam), name="scaled")


# --- entropy curve ----------------------------------------------------------

def test_white_noise_curve():
    curve = gaussian_entropy_curve(white_noise(), 3)
    np.testing.assert_allclose(curve.values, HALF_LOG_2PIE * np.arange(4), atol=1e-14)


def test_ar1_two_blocks():
    curve = gaussian_entropy_curve(GaussianModel([1.0, 0.5]), 2)
    assert curve.values[2] == pytest.approx(2.694036030183455, abs=1e-12)


def test_levinson_matches_slogdet():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(60)
    r = np.correlate(x, x, "full")[59:] / 60  # biased estimate is PSD
    sigma2, _ = levinson_durbin(r, 10)
    from scipy.linalg import toeplitz

    for n in range(1, 11):
        _, logdet = np.linalg.slogdet(toeplitz(r[:n]))
        assert 0.5 * np.sum(np.log(sigma2[:n])) == pytest.approx(0.5 * logdet, abs=1e-8)


def test_ar1_reflection_coefficients():
    sigma2, refl = levinson_durbin(0.5 ** np.arange(6))
    np.testing.assert_allclose(refl[1:], [0.5, 0, 0, 0, 0], atol=1e-14)
    np.testing.assert_allclose(sigma2[1:], 0.75, atol=1e-14)


def test_not_positive_definite_names_order():
    with pytest.raises(NotPositiveDefiniteError) as info:
        levinson_durbin([1.0, 1.0, 1.0], 3)
    assert info.value.order == 2


def test_invalid_autocovariance():
    with pytest.raises(InvalidModelError):
        GaussianModel([0.0, 0.0])
    with pytest.raises(InvalidModelError):
        GaussianModel([1.0, 1.5])
    with pytest.raises(InvalidModelError):
        GaussianModel()


def test_missing_lags_without_density():
    with pytest.raises(InvalidModelError):
        gaussian_entropy_curve(GaussianModel([1.0, 0.5]), 5)


# --- entropy rate and cepstrum ---------------------------------------------

def test_kolmogorov_white_noise():
    est = kolmogorov_entropy_rate(white_noise())
    assert est.value == pytest.approx(HALF_LOG_2PIE, abs=1e-14)


def test_kolmogorov_ar1():
    est = kolmogorov_entropy_rate(ar1(0.5))
    assert est.value == pytest.approx(AR1_RATE, abs=1e-8)
    assert est.error <= 1e-8


def test_density_nonpositive_raises():
    m = GaussianModel(density=lambda lam: np.cos(lam))
    with pytest.raises(InvalidDensityError):
        kolmogorov_entropy_rate(m)


def test_constant_density_cepstrum_is_zero():
    ceps = cepstrum_coefficients(white_noise(3.0), K=50)
    np.testing.assert_allclose(ceps.b, 0.0, atol=1e-12)
    assert ceps.b0 == pytest.approx(math.log(3.0), abs=1e-13)


def test_ar1_cepstrum_closed_form():
    ceps = cepstrum_coefficients(ar1(0.5), K=50)
    k = ceps.k
    np.testing.assert_allclose(ceps.b, 0.5 ** k / k, atol=1e-8)
    assert ceps.b[:3] == pytest.approx([0.5, 0.125, 0.5 ** 3 / 3], abs=1e-12)
    assert np.all(ceps.errors <= 1e-10)


def test_ar1_mutual_information():
    ceps = cepstrum_coefficients(ar1(0.5), K=200)
    res = mutual_info_cepstrum(ceps)
    assert res.verdict == "finite"
    assert res.partial_sums[-1] == pytest.approx(AR1_IPF, abs=1e-6)
    assert res.value == pytest.approx(AR1_IPF, abs=1e-6)


def test_zero_cepstrum_gives_zero_information():
    res = mutual_info_cepstrum(cepstrum_coefficients(white_noise(), K=20))
    assert res.verdict == "finite" and res.value == pytest.approx(0.0, abs=1e-20)


def test_parity_residue():
    assert cepstrum_parity_residue(ar1(0.5), K=100) < 1e-10


def test_scale_covariance():
    c = 7.5
    base, big = ar1(0.5), scaled(ar1(0.5), c)
    b1, b2 = cepstrum_coefficients(base, K=40), cepstrum_coefficients(big, K=40)
    np.testing.assert_allclose(b2.b, b1.b, atol=1e-12)
    assert b2.b0 - b1.b0 == pytest.approx(math.log(c), abs=1e-12)
    assert mutual_info_cepstrum(b2).value == pytest.approx(mutual_info_cepstrum(b1).value, abs=1e-12)
    h1, h2 = kolmogorov_entropy_rate(base).value, kolmogorov_entropy_rate(big).value
    assert h2 - h1 == pytest.approx(0.5 * math.log(c), abs=1e-12)


# --- route consistency ------------------------------------------------------

def test_gain_converges_to_kolmogorov_rate():
    curve = gaussian_entropy_curve(ar1(0.5), 500)
    assert curve.gains[-1] == pytest.approx(kolmogorov_entropy_rate(ar1(0.5)).value, abs=1e-6)


def test_all_routes_agree_on_ar1_information():
    m = ar1(0.5)
    curve = gaussian_entropy_curve(m, 400)
    s = estimator_series(curve, kolmogorov_entropy_rate(m).value)
    assert s.d_n[199] == pytest.approx(AR1_IPF, abs=1e-3)
    assert s.i_n[199] == pytest.approx(AR1_IPF, abs=1e-3)
    assert mutual_info_cepstrum(cepstrum_coefficients(m, K=200)).value == pytest.approx(AR1_IPF, abs=1e-3)


def test_ar1_sandwich_and_monotone():
    m = ar1(0.8)
    s = estimator_series(gaussian_entropy_curve(m, 60), kolmogorov_entropy_rate(m).value)
    k = s.i_n.size
    assert np.all(s.e_n[:k] >= s.i_n - 1e-10)
    assert np.all(s.i_n >= s.d_n[:k] - 1e-10)
    assert np.all(s.d_n >= -1e-10)


def test_density_only_model_synthesises_covariance():
    m = GaussianModel(density=ar1(0.5).density)
    assert m.provenance == "density-given"
    np.testing.assert_allclose(m.acvf(10), 0.5 ** np.arange(10), atol=1e-10)


def test_covariance_only_model_synthesises_density():
    r = 0.5 ** np.arange(80)
    m = GaussianModel(r)
    assert m.provenance == "covariance-given"
    assert kolmogorov_entropy_rate(m).value == pytest.approx(AR1_RATE, abs=1e-8)


def test_bartlett_taper_keeps_density_positive():
    # r = (1, -0.6): truncated sum 1 - 1.2 cos is negative near 0
    with pytest.raises(InvalidDensityError):
        GaussianModel([1.0, -0.6]).density(np.array([0.0]))
    f = GaussianModel([1.0, -0.6], taper="bartlett").density(np.linspace(0, math.pi, 50))
    assert np.all(f > 0)


def test_consistency_check():
    assert ar1(0.5).check_consistency(K=20) < 1e-9
    bad = GaussianModel(lambda k: 0.4 ** np.abs(k), density=ar1(0.5).density)
    with pytest.raises(InvalidModelError):
        bad.check_consistency()


def test_table_density():
    lam = np.linspace(0, math.pi, 4001)
    m = from_table(lam, ar1(0.5).density(lam))
    assert kolmogorov_entropy_rate(m, target=1e-6).value == pytest.approx(AR1_RATE, abs=1e-5)
    with pytest.raises(InvalidDensityError):
        from_table([0, 1], [1.0, -1.0])


# --- summability ------------------------------------------------------------

def test_summability_ar1():
    rep = covariance_summability_report(ar1(0.5), K=200)
    assert rep.verdict == "summable"
    assert rep.partial_sums[-1] == pytest.approx(2.0, abs=1e-12)


def test_summability_white_noise():
    rep = covariance_summability_report(white_noise(), K=100)
    assert rep.verdict == "summable"
    assert rep.partial_sums[-1] == 1.0
