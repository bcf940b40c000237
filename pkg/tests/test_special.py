import math

import mpmath
import numpy as np
import pytest

from grenzero.special import (
    ln_gamma,
    reg_lower_gamma,
    reg_upper_gamma,
    subbotin_cdf,
    subbotin_isf,
    subbotin_pdf,
    subbotin_sf,
    upper_gamma,
)


def test_ln_gamma_factorial():
    assert ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-15)


def test_ln_gamma_relative_error_against_mpmath():
    xs = np.concatenate((np.linspace(0.1, 170.0, 700), [0.5, 0.99, 1.01, 1.5, 1.99, 2.01, 2.5]))
    worst = 0.0
    for x in xs:
        ref = mpmath.loggamma(mpmath.mpf(float(x)))
        if ref == 0:
            assert ln_gamma(x) == 0.0
            continue
        worst = max(worst, float(abs((ln_gamma(x) - ref) / ref)))
    assert worst <= 1e-12


@pytest.mark.parametrize("bad", [0.0, -1.0, np.inf, np.nan])
def test_ln_gamma_domain(bad):
    with pytest.raises(ValueError):
        ln_gamma(bad)


def test_reg_lower_gamma_exponential_case():
    x = np.linspace(0, 30, 61)
    np.testing.assert_allclose(reg_lower_gamma(1.0, x), -np.expm1(-x), rtol=1e-14, atol=1e-300)


def test_reg_lower_gamma_limits_and_monotone():
    for s in (0.3, 1.0, 4.5):
        assert reg_lower_gamma(s, 0.0) == 0.0
        assert reg_lower_gamma(s, np.inf) == 1.0
        v = reg_lower_gamma(s, np.linspace(0, 20, 200))
        assert np.all(np.diff(v) >= 0)
        np.testing.assert_allclose(v + reg_upper_gamma(s, np.linspace(0, 20, 200)), 1.0, atol=1e-15)


def test_reg_gamma_domain():
    with pytest.raises(ValueError):
        reg_lower_gamma(0.0, 1.0)
    with pytest.raises(ValueError):
        reg_upper_gamma(1.0, -0.1)


@pytest.mark.parametrize("s", [-0.75, -0.5, -0.1, 0.0, 0.5, 2.0])
@pytest.mark.parametrize("x", [1e-6, 0.3, 2.0, 15.0])
def test_upper_gamma_against_mpmath(s, x):
    ref = float(mpmath.gammainc(s, a=x))
    assert upper_gamma(s, x) == pytest.approx(ref, rel=1e-11)


def test_upper_gamma_domain():
    with pytest.raises(ValueError):
        upper_gamma(-1.0, 1.0)
    with pytest.raises(ValueError):
        upper_gamma(0.5, 0.0)


def test_subbotin_r2_is_standard_normal():
    assert subbotin_cdf(1.96, 2.0) == pytest.approx(0.9750021048517795, abs=1e-15)
    z = np.linspace(-6, 6, 1201)
    ref = np.array([float(mpmath.ncdf(v)) for v in z])
    assert np.max(np.abs(subbotin_cdf(z, 2.0) - ref)) <= 1e-10
    np.testing.assert_allclose(subbotin_pdf(z, 2.0), np.exp(-z**2 / 2) / math.sqrt(2 * math.pi), rtol=1e-14)


def test_subbotin_r1_is_laplace():
    z = np.array([-3.0, -0.5, 0.0, 0.7, 5.0])
    ref = np.where(z < 0, 0.5 * np.exp(z), 1 - 0.5 * np.exp(-z))
    np.testing.assert_allclose(subbotin_cdf(z, 1.0), ref, rtol=1e-14)


@pytest.mark.parametrize("r", [1.0, 1.5, 2.0, 3.0])
def test_subbotin_sf_cdf_and_isf(r):
    z = np.linspace(-8, 8, 101)
    np.testing.assert_allclose(subbotin_cdf(z, r) + subbotin_sf(z, r), 1.0, atol=1e-15)
    p = np.array([1e-12, 1e-5, 0.1, 0.5, 0.8, 0.999])
    np.testing.assert_allclose(subbotin_sf(subbotin_isf(p, r), r), p, rtol=1e-10)


@pytest.mark.parametrize("r", [1.5, 2.0, 3.0])
def test_subbotin_mills_ratio(r):
    z = 10.0
    ratio = subbotin_sf(z, r) * z ** (r - 1) / subbotin_pdf(z, r)
    assert 0.97 <= ratio <= 1.03


def test_subbotin_isf_domain():
    with pytest.raises(ValueError):
        subbotin_isf(0.0, 2.0)
