import math

import numpy as np
import pytest

import freeprod


def test_semicircle_density():
    x = np.array([-3.0, 0.0, 1.0])
    rho = freeprod.density("semicircle:0,1", x)
    assert rho[0] == 0.0
    assert rho[1] == pytest.approx(1 / math.pi, rel=1e-12)
    assert rho[2] == pytest.approx(math.sqrt(3) / (2 * math.pi), rel=1e-12)


def test_moment_cumulant_round_trip():
    # Catalan numbers are the moments of the semicircle: only kappa_2 survives.
    kappa = freeprod.moments_to_cumulants([0, 1, 0, 2, 0, 5])
    assert kappa == pytest.approx([0, 1, 0, 0, 0, 0], abs=1e-12)
    assert freeprod.cumulants_to_moments(kappa) == pytest.approx([0, 1, 0, 2, 0, 5])


def test_free_add_of_semicircles():
    x = np.linspace(-2.5, 2.5, 11)
    out = freeprod.free_add("semicircle:0,1", "semicircle:0,1", x)
    expected = freeprod.density("semicircle:0,1.4142135623730951", x)
    assert np.max(np.abs(out["rho"] - expected)) < 1e-6


def test_free_multiply_of_free_poisson():
    x = np.array([1.0, 3.0])
    out = freeprod.free_multiply("wishart", "wishart", x)
    assert out["rho"] == pytest.approx(freeprod.fuss_catalan_density(2, x), rel=1e-6)
    assert out["support"][-1][1] == pytest.approx(6.75, abs=1e-6)


def test_ginibre_product_cdf():
    x = np.array([0.25, 0.5, 1.0])
    assert freeprod.ginibre_product_cdf(2, x) == pytest.approx(x, abs=1e-8)


def test_spectrum_is_reproducible():
    a = freeprod.spectrum(["ginibre", "ginibre"], size=40, samples=2, seed=7)
    b = freeprod.spectrum(["ginibre", "ginibre"], size=40, samples=2, seed=7)
    assert a.dtype == np.complex128 and a.shape == (80,)
    assert np.array_equal(a, b)
    d = freeprod.ks_two_sample(np.abs(a), np.abs(freeprod.spectrum(["ginibre"] * 2, size=40, samples=2, seed=8)))
    assert 0.0 <= d < 0.3


def test_quaternionic_ginibre_square():
    out = freeprod.quaternionic_product("ginibre", "ginibre", points=65)
    assert out["rho"].shape == (65, 65)
    assert out["unresolved"] == 0
    radius = max(np.max(np.abs(loop)) for loop in out["contour"])
    assert radius == pytest.approx(1.0, abs=0.05)


def test_errors_are_translated():
    with pytest.raises(freeprod.Error):
        freeprod.density("no-such-law", np.array([0.0]))
