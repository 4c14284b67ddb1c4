import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from pentagram.dual import Dual, stack_matrix

values = st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False, allow_infinity=False)


def fd(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2 * h)


def rational(x):
    return (x**3 - 2 * x + 1) / (x + 3) * (1 - x) ** 2 / x


@given(values)
def test_rational_function_derivative(x0):
    if abs(x0 + 3) < 0.3:
        return
    d = rational(Dual.variables([x0], 0, 1))
    assert abs(d.der[0, 0] - fd(rational, x0)) <= 1e-5 * (1 + abs(d.der[0, 0]))


@given(values)
def test_exp_derivative(x0):
    d = Dual.variables([x0], 0, 1).exp()
    assert abs(d.der[0, 0] - np.exp(x0)) <= 1e-12 * abs(np.exp(x0))


def test_partial_derivatives_of_two_variables():
    x = Dual.variables([2.0, 3.0], 0, 2)
    f = x[0] * x[0] * x[1] + 1 / x[1]
    assert np.allclose(f.der, [2 * 2 * 3, 4 - 1 / 9])


def test_sum_and_prod():
    x = Dual.variables([1.0, 2.0, 4.0], 0, 3)
    assert np.allclose(x.sum().der, [1, 1, 1])
    assert np.allclose(x.prod().val, 8) and np.allclose(x.prod().der, [8, 4, 2])


def test_matrix_product_derivative(rng):
    vals = rng.standard_normal(4)
    x = Dual.variables(vals, 0, 4)
    A = stack_matrix([[x[0], x[1], 0], [0, 1, x[2]], [x[3], 0, 2]], 4)
    B = A @ A
    h = 1e-6
    for k in range(4):
        def plain(v):
            return np.array([[v[0], v[1], 0], [0, 1, v[2]], [v[3], 0, 2]]) @ np.array([[v[0], v[1], 0], [0, 1, v[2]], [v[3], 0, 2]])

        e = np.zeros(4)
        e[k] = h
        numeric = (plain(vals + e) - plain(vals - e)) / (2 * h)
        assert np.abs(B.der[:, :, k] - numeric).max() < 1e-6


def test_constants_mix_with_duals():
    x = Dual.variables([1.5], 0, 1)
    f = 2 - x * 3 + 1 / x
    assert np.allclose(f.val, 2 - 4.5 + 1 / 1.5)
    assert np.allclose(f.der, -3 - 1 / 1.5**2)
