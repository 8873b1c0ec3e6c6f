import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wpstat.fourier_pairs import FAMILIES, TestFunctionPair
from wpstat.kernels import (
    EVALUATION_FLOOR,
    NONSIMPLE_MIN_LENGTH,
    KernelParams,
    collar_partner_min_length,
    csch_half,
    eval_F,
    eval_GL,
    eval_HL,
    sinh_ratio,
    sinh_ratio_bound_check,
    support_count,
)

P10 = KernelParams(10.0, 0.0)


def brute_HL(p, x):
    """Term-by-term sum in plain numpy, no acceleration."""
    K = int(math.floor(p.cutoff / x))
    total = 0.0
    for start in range(1, K + 1, 1_000_000):
        k = np.arange(start, min(K, start + 999_999) + 1, dtype=float)
        t = k * x
        total += math.fsum(p.pair.fhat(t / p.L) * np.cos(p.tau * t) / np.sinh(t / 2))
    return x / p.L * total


def test_reference_values_fejer_L10():
    # F(5) = fhat(1/2) / sinh(5/2); G_L(5) = (1/2)(1/sinh(5/2) + 1/sinh(5)).
    assert abs(eval_F(P10, 5.0) - 0.5 / math.sinh(2.5)) < 1e-15
    assert abs(eval_GL(P10, 5.0) - 0.5 * (1 / math.sinh(2.5) + 1 / math.sinh(5.0))) < 1e-15
    assert round(eval_F(P10, 5.0), 7) == 0.0826418
    assert round(eval_GL(P10, 5.0), 7) == 0.0893801
    assert round(eval_HL(P10, 6.0), 7) == 0.0239572


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("tau", [0.0, 0.05, 1.0])
def test_HL_against_direct_sum(family, tau):
    p = KernelParams(7.0, tau, TestFunctionPair(family, 1.3))
    for x in (4e-6, 3e-4, 0.01, 0.5, 2.0, 6.0, 9.0):
        ref = brute_HL(p, x)
        assert abs(eval_HL(p, x) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_HL_vectorised_matches_scalar():
    p = KernelParams(12.0, 0.3, TestFunctionPair("hann"))
    x = np.array([1e-7, 1e-3, 0.2, 1.0, 5.0, 11.9, 13.0])
    vec = eval_HL(p, x)
    for xi, v in zip(x, vec):
        assert abs(v - eval_HL(p, float(xi))) <= 1e-14 * max(1.0, abs(v))


def test_HL_vanishes_beyond_window():
    p = KernelParams(3.0, 0.0)
    assert eval_HL(p, 3.0 + 1e-12) == 0.0
    assert eval_GL(p, 3.5) == 0.0
    assert eval_F(p, 3.5) == 0.0


def test_argument_checks():
    with pytest.raises(ValueError):
        eval_HL(P10, 0.0)
    with pytest.raises(ValueError, match="floor"):
        eval_HL(P10, EVALUATION_FLOOR / 2)
    with pytest.raises(ValueError):
        eval_F(P10, -1.0)
    with pytest.raises(ValueError):
        KernelParams(0.0)
    with pytest.raises(ValueError):
        KernelParams(1.0, -0.1)


def test_csch_half_has_no_overflow():
    t = np.array([1e-8, 1.0, 50.0, 1500.0, 1e5])
    out = csch_half(t)
    assert np.all(np.isfinite(out))
    assert out[-1] == 0.0
    mpmath.mp.dps = 30
    for ti, oi in zip(t[:3], out[:3]):
        assert abs(oi - float(1 / mpmath.sinh(mpmath.mpf(ti) / 2))) <= 1e-14 * oi


@settings(max_examples=60, deadline=None)
@given(y=st.floats(1e-6, 300.0), k=st.integers(1, 5000))
def test_sinh_ratio_against_mpmath(y, k):
    mpmath.mp.dps = 30
    ref = mpmath.sinh(mpmath.mpf(y)) / mpmath.sinh(k * mpmath.mpf(y))
    got = sinh_ratio(y, k)
    assert abs(got - float(ref)) <= 1e-13 * float(ref) + 1e-300
    assert got <= 1.0 / k * (1 + 1e-14)
    assert sinh_ratio_bound_check(k, y)


def test_sinh_ratio_bound_rejects_bad_input():
    with pytest.raises(ValueError):
        sinh_ratio_bound_check(0, 1.0)
    with pytest.raises(ValueError):
        sinh_ratio_bound_check(2, 0.0)


def test_support_count_edges():
    assert support_count(10.0, 2.5) == 4
    assert support_count(10.0, 10.0) == 1
    assert support_count(10.0, 10.000001) == 0
    assert support_count(1.0, 0.1) == 10  # 10 * 0.1 rounds to exactly 1.0
    assert support_count(3.0, 1e-9) == 3_000_000_000 or support_count(3.0, 1e-9) == 2_999_999_999


def test_nonsimple_constant():
    mpmath.mp.dps = 30
    assert abs(NONSIMPLE_MIN_LENGTH - float(4 * mpmath.asinh(1))) < 1e-15


def test_collar_partner_length():
    ell = np.array([0.1, 1.0, NONSIMPLE_MIN_LENGTH / 2, 5.0])
    partner = collar_partner_min_length(ell)
    assert np.allclose(np.sinh(ell / 2) * np.sinh(partner / 2), 1.0, rtol=1e-13)
    assert abs(collar_partner_min_length(2 * math.asinh(1)) - 2 * math.asinh(1)) < 1e-14


@settings(max_examples=40, deadline=None)
@given(
    x=st.floats(1e-7, 60.0),
    L=st.floats(0.5, 60.0),
    tau=st.floats(0.0, 20.0),
    family=st.sampled_from(FAMILIES),
)
def test_majorant_dominates(x, L, tau, family):
    p = KernelParams(L, tau, TestFunctionPair(family))
    assert abs(eval_HL(p, x)) <= eval_GL(p, x) * (1 + 1e-12) + 1e-300
