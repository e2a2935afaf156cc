import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from cossum.bessel import BesselSpec, bessel_j, bessel_j_array, bessel_mod, miller_depth


def _series_reference(n, t, terms=80):
    # exact rational accumulation of the ascending series
    from fractions import Fraction
    x = Fraction(t) / 2
    total = Fraction(0)
    for k in range(terms):
        total += (-1) ** k * x ** (2 * k + n) / (math.factorial(k) * math.factorial(k + n))
    return float(total)


def test_values_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0


@pytest.mark.parametrize("t", [0.5, 1.0, 3.7, 9.0])
def test_series_against_exact_accumulation(t):
    assert bessel_j(3, t) == pytest.approx(_series_reference(3, t), abs=1e-12)


def test_against_scipy():
    t = np.linspace(0, 150, 7501)
    for n in range(11):
        assert np.max(np.abs(bessel_j_array(n, t) - scipy.special.jv(n, t))) <= 1e-12


def test_scalar_and_vector_agree():
    t = np.array([0.0, 2.0, 12.0, 12.5, 80.0])
    np.testing.assert_allclose(bessel_j_array(3, t), [bessel_j(3, x) for x in t], atol=1e-15)


def test_miller_depth_doubling():
    t = 126.0
    a = bessel_j(3, t)
    b = bessel_j(3, t, depth=2 * miller_depth(3, t))
    assert abs(a - b) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(12.5, 140.0))
def test_normalization_identity(t):
    j = np.array([bessel_j(k, t) for k in range(0, miller_depth(0, t), 2)])
    assert abs(j[0] + 2 * j[1:].sum() - 1) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.floats(1.0, 126.0))
def test_three_term_recurrence(n, t):
    lhs = bessel_j(n - 1, t) + bessel_j(n + 1, t)
    rhs = 2 * n / t * bessel_j(n, t)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(rhs), abs(lhs), 1e-3)


def test_modified_function_limits():
    assert bessel_mod(BesselSpec(3, 126.0), 0.0) == 0.0
    assert bessel_mod(BesselSpec(1, 2.0), 0.0) == 1.0
    assert bessel_mod(BesselSpec(3, 126.0), 126.0) == pytest.approx(bessel_j(3, 126.0), rel=1e-15)
    assert bessel_mod(BesselSpec(3, 126.0), 1e-6) == pytest.approx(126 * 1e-12 / 48, rel=1e-6)


def test_modified_function_domain():
    spec = BesselSpec(3, 10.0)
    with pytest.raises(ValueError):
        bessel_mod(spec, 10.5)
    with pytest.raises(ValueError):
        bessel_mod(spec, -0.1)
    with pytest.raises(ValueError):
        BesselSpec(0, 1.0)
    with pytest.raises(ValueError):
        BesselSpec(3, 0.0)
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)


def test_odd_order_target_is_even():
    spec = BesselSpec(3, 50.0)
    t = np.linspace(0, 50, 11)
    # the closed form (B/t) J_n(t) is unchanged under t -> -t for odd n
    neg = spec.B / (-t[1:]) * scipy.special.jv(3, -t[1:])
    np.testing.assert_allclose(bessel_mod(spec, t[1:]), neg, rtol=1e-12)
