import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pentagram.laurent import LaurentMatrix3, LaurentPoly, ordered_product

coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
polys = st.builds(
    lambda cs, low: LaurentPoly(cs, low, prune=False),
    st.lists(coef, min_size=0, max_size=5),
    st.integers(-4, 4),
)
points = st.complex_numbers(min_magnitude=0.5, max_magnitude=2, allow_nan=False, allow_infinity=False)


def random_matrix(rng, lo, hi):
    K = hi - lo + 1
    return LaurentMatrix3(rng.standard_normal((K, 3, 3)) + 1j * rng.standard_normal((K, 3, 3)), lo)


def test_from_dict_and_coefficients():
    p = LaurentPoly.from_dict({-2: 1.5, 3: -2j})
    assert p.min_exp == -2 and p.max_exp == 3
    assert p.coefficients == {-2: 1.5, 3: -2j}
    assert p.coeff(0) == 0


def test_zero_polynomial():
    z = LaurentPoly()
    assert z.is_zero() and z.min_exp is None and z(2.0) == 0
    assert (z * LaurentPoly([1, 2])).is_zero()


def test_pruning_drops_roundoff():
    p = LaurentPoly([1.0, 1e-15, 2.0])
    assert p.coefficients == {0: 1.0, 2: 2.0}


def test_exponents_add_under_multiplication():
    p = LaurentPoly.monomial(2.0, -3) * LaurentPoly.monomial(3.0, 5)
    assert p.coefficients == {2: 6.0}


@given(polys, polys, points)
def test_ring_operations_evaluate_pointwise(p, q, z):
    scale = 1 + abs(p(z)) + abs(q(z))
    assert abs((p + q)(z) - (p(z) + q(z))) <= 1e-12 * scale
    assert abs((p - q)(z) - (p(z) - q(z))) <= 1e-12 * scale
    assert abs((p * q)(z) - p(z) * q(z)) <= 1e-11 * scale**2


@given(polys, st.integers(-3, 3), points)
def test_shift(p, k, z):
    assert abs(p.shift(k)(z) - p(z) * z**k) <= 1e-12 * (1 + abs(p(z))) * max(1, abs(z) ** k)


def test_matrix_product_associative(rng):
    A, B, C = random_matrix(rng, -1, 1), random_matrix(rng, 0, 2), random_matrix(rng, -2, 0)
    lhs, rhs = (A @ B) @ C, A @ (B @ C)
    assert lhs.max_deviation(rhs) < 1e-12 * lhs.max_abs()


def test_matrix_product_degree_bounds(rng):
    A, B = random_matrix(rng, -1, 2), random_matrix(rng, -3, 0)
    P = A @ B
    assert -4 <= P.min_exp and P.max_exp <= 2


def test_matrix_evaluation_is_multiplicative(rng):
    A, B = random_matrix(rng, -1, 1), random_matrix(rng, -2, 1)
    z = 0.7 - 0.4j
    assert np.abs((A @ B)(z) - A(z) @ B(z)).max() < 1e-12 * np.abs(A(z)).max() * np.abs(B(z)).max() * 10


def test_trace_and_det(rng):
    A = random_matrix(rng, -1, 1)
    z = 1.3 + 0.2j
    assert abs(A.trace()(z) - np.trace(A(z))) < 1e-12 * np.abs(A(z)).max()
    assert abs(A.det()(z) - np.linalg.det(A(z))) < 1e-11 * np.abs(A(z)).max() ** 3


def test_identity_and_entries():
    I = LaurentMatrix3.identity()
    assert I.entry(0, 0).coefficients == {0: 1}
    assert I.entry(0, 1).is_zero()
    M = LaurentMatrix3.from_entries([[LaurentPoly.monomial(1, -1), 0, 0], [0, 1, 0], [0, 0, LaurentPoly.monomial(2, 1)]])
    assert M.min_exp == -1 and M.max_exp == 1
    assert np.allclose(M(2.0), np.diag([0.5, 1, 4]))


def test_ordered_product_order(rng):
    mats = [random_matrix(rng, 0, 1) for _ in range(4)]
    P = ordered_product(mats)
    z = 0.9
    expected = mats[3](z) @ mats[2](z) @ mats[1](z) @ mats[0](z)
    assert np.abs(P(z) - expected).max() < 1e-12 * np.abs(expected).max()


def test_scalar_multiplication():
    M = LaurentMatrix3.identity() * 3
    assert np.allclose(M(5.0), 3 * np.eye(3))
    with pytest.raises(TypeError):
        LaurentMatrix3.identity() * "x"
