import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expwell.errors import ConvergenceError
from expwell.quadrature import tanh_sinh


def test_exponential():
    val, err = tanh_sinh(np.exp, 0.0, 1.0)
    assert val == pytest.approx(math.e - 1.0, rel=1e-14)
    assert err < 1e-12


def test_endpoint_singularity():
    # integrable 1/sqrt singularity at the left end
    val, _ = tanh_sinh(lambda x: 1.0 / np.sqrt(x), 0.0, 4.0)
    assert val == pytest.approx(4.0, rel=1e-11)


def test_trailing_axes_are_independent():
    def f(x):
        return np.stack([np.sin(x), np.cos(x), x**2], axis=1)

    val, _ = tanh_sinh(f, 0.0, math.pi)
    np.testing.assert_allclose(val, [2.0, 0.0, math.pi**3 / 3], rtol=1e-13, atol=1e-14)


def test_normwise_accepts_vanishing_component():
    def f(x):
        big = 500.0 * np.exp(-x)
        zero = 500.0 * np.sin(2 * math.pi * x) * np.exp(-x) - 500.0 * np.sin(2 * math.pi * x) * np.exp(-x)
        return np.stack([big, zero + 1e-13 * np.cos(37 * x)], axis=1)

    val, _ = tanh_sinh(f, 0.0, 1.0, normwise=True)
    assert val[0] == pytest.approx(500.0 * (1 - math.exp(-1)), rel=1e-12)


def test_empty_interval():
    val, err = tanh_sinh(np.exp, 2.0, 2.0)
    assert val == 0.0 and err == 0.0


def test_infinite_interval_rejected():
    with pytest.raises(ValueError):
        tanh_sinh(np.exp, 0.0, math.inf)


def test_non_convergence_reported():
    with pytest.raises(ConvergenceError):
        tanh_sinh(lambda x: np.sin(1e4 * x), 0.0, 1.0, max_level=4)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=8), st.floats(-2, 0), st.floats(0.1, 3))
def test_polynomials(coefs, a, width):
    b = a + width
    p = np.polynomial.Polynomial(coefs)
    exact = p.integ()(b) - p.integ()(a)
    val, _ = tanh_sinh(p, a, b)
    assert val == pytest.approx(exact, rel=1e-11, abs=1e-12)
