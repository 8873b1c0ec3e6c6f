import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

import wpstat.goe_reference as goe
from wpstat.fourier_pairs import FAMILIES, TestFunctionPair
from wpstat.goe_reference import (
    GOEConvergenceError,
    GOEMCConfig,
    sample_goe_spectrum,
    sample_goe_variance,
    semicircle_cdf,
    sigma2_goe_closed_form,
    unfold,
)

SMALL = dict(matrix_dim=200, samples=64, rng_seed=7)


def test_closed_form_fejer_and_hann():
    assert abs(sigma2_goe_closed_form(TestFunctionPair("fejer")) - 1 / 3) < 1e-13
    assert abs(sigma2_goe_closed_form(TestFunctionPair("hann")) - (0.75 - 4 / math.pi**2)) < 1e-13


@pytest.mark.parametrize("family", FAMILIES)
def test_closed_form_against_trapezoid(family):
    pair = TestFunctionPair(family, 1.0, 1.3)
    x = np.linspace(0.0, 1.0, 1_000_001)
    ref = 4.0 * np.trapezoid(x * pair.fhat(x) ** 2, x)
    assert abs(sigma2_goe_closed_form(pair) - ref) < 1e-10


@settings(max_examples=25, deadline=None)
@given(c=st.floats(0.05, 20.0), family=st.sampled_from(FAMILIES))
def test_closed_form_is_scale_invariant(c, family):
    pair = TestFunctionPair(family)
    assert abs(sigma2_goe_closed_form(pair.scaled(c)) - sigma2_goe_closed_form(pair)) < 1e-11


def test_closed_form_quadratic_in_normalization():
    pair = TestFunctionPair("hann", 1.0, 3.0)
    assert abs(sigma2_goe_closed_form(pair) - 9 * sigma2_goe_closed_form(TestFunctionPair("hann"))) < 1e-12


def test_zero_pair_gives_zero_variance():
    res = sample_goe_variance(GOEMCConfig(pair=TestFunctionPair("fejer", 1.0, 0.0), **SMALL))
    assert res.estimate == 0.0 and res.std_error == 0.0 and res.closed_form == 0.0


def test_reproducible_and_seed_sensitive():
    a = sample_goe_variance(GOEMCConfig(**SMALL))
    b = sample_goe_variance(GOEMCConfig(**SMALL))
    c = sample_goe_variance(GOEMCConfig(**{**SMALL, "rng_seed": 8}))
    assert a == b
    assert a.estimate != c.estimate
    assert a.samples_used == 64


def test_semicircle_cdf():
    r = 3.0
    assert semicircle_cdf(-r, r) == 0.0 and semicircle_cdf(r, r) == 1.0
    assert abs(semicircle_cdf(0.0, r) - 0.5) < 1e-16
    assert semicircle_cdf(10.0, r) == 1.0
    x = np.linspace(-r, r, 200_001)
    dens = 2 / (math.pi * r * r) * np.sqrt(r * r - x * x)
    cum = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(x))])
    assert np.max(np.abs(cum - semicircle_cdf(x, r))) < 1e-6


def test_unfolded_bulk_has_unit_spacing():
    rng = np.random.default_rng(3)
    gaps = []
    for _ in range(20):
        u = unfold(sample_goe_spectrum(1000, rng))
        gaps.append(np.diff(u[250:750]))
    assert abs(np.mean(gaps) - 1.0) < 0.05


def test_tridiagonal_model_matches_dense_goe_moments():
    rng = np.random.default_rng(11)
    n = 60
    tri = np.concatenate([sample_goe_spectrum(n, rng) for _ in range(200)])
    dense = []
    for _ in range(200):
        a = rng.normal(size=(n, n))
        dense.append(np.linalg.eigvalsh((a + a.T) / 2))
    dense = np.concatenate(dense)
    # Second moment is (N + 1) / 2 for this normalisation.
    assert abs(np.mean(tri**2) - (n + 1) / 2) < 0.05 * n
    assert abs(np.mean(tri**2) - np.mean(dense**2)) < 0.05 * n
    assert np.max(np.abs(tri)) < 1.2 * math.sqrt(2 * n)


def test_std_error_shrinks_with_more_samples():
    # Doubling M shrinks the standard error by about sqrt(2).
    a = sample_goe_variance(GOEMCConfig(matrix_dim=200, samples=200, rng_seed=1))
    b = sample_goe_variance(GOEMCConfig(matrix_dim=200, samples=400, rng_seed=1))
    ratio = a.std_error / b.std_error
    assert 1.25 <= ratio <= 3.2, ratio


def test_jackknife_matches_gaussian_formula():
    rng = np.random.default_rng(5)
    s = rng.normal(0.0, 2.0, size=4000)
    se = goe._jackknife_variance_se(s)
    expected = 4.0 * math.sqrt(2.0 / (s.size - 1))
    assert abs(se / expected - 1.0) < 0.15


def test_config_validation():
    with pytest.raises(ValueError, match="matrix_dim"):
        GOEMCConfig(matrix_dim=10)
    with pytest.raises(ValueError, match="samples"):
        GOEMCConfig(samples=3)
    with pytest.raises(ValueError, match="bulk_fraction"):
        GOEMCConfig(bulk_fraction=1.0)
    with pytest.raises(ValueError, match="beta"):
        GOEMCConfig(pair=TestFunctionPair("fejer", 1.5))


def test_eigensolver_failure_is_reported(monkeypatch):
    def boom(*args, **kwargs):
        raise linalg.LinAlgError("no convergence")

    monkeypatch.setattr(goe.linalg, "eigvalsh_tridiagonal", boom)
    with pytest.raises(GOEConvergenceError, match="no convergence"):
        sample_goe_variance(GOEMCConfig(**SMALL))


@pytest.mark.slow
def test_hann_monte_carlo_matches_closed_form():
    res = sample_goe_variance(GOEMCConfig(matrix_dim=600, samples=400, rng_seed=3,
                                          pair=TestFunctionPair("hann")))
    assert abs(res.estimate - res.closed_form) <= max(3 * res.std_error, 0.05)
