import numpy as np
import pytest

from pentagram.coords import XYCoords, orbit
from pentagram.samples import random_xy
from pentagram.spectral import invariants
from pentagram.symplectic import (
    bracket_invariance_check,
    casimir_check,
    finite_difference_gradients,
    genus_for,
    invariant_gradients,
    involution_check,
    leaf_constraints,
    leaf_frame,
    log_jacobian,
    omega0_matrix,
    omega_invariance_check,
    onleaf_inverse_check,
    poisson_bracket,
    poisson_matrix,
)


def unit(n, k):
    e = np.zeros(2 * n)
    e[k] = 1
    return e


def broken_map(x, y):
    # the first factor of the x update enters with its exponent flipped
    n = len(x)
    i = np.arange(n)
    w = 1 - x * y
    return x * w[(i + 1) % n] / w[(i - 1) % n], y[(i + 1) % n] * w[(i + 2) % n] / w


@pytest.mark.parametrize("n", [4, 5, 7])
def test_coordinate_brackets(n):
    assert poisson_bracket(unit(n, 0), unit(n, 1)) == 1
    assert poisson_bracket(unit(n, 1), unit(n, 0)) == -1
    assert poisson_bracket(unit(n, n), unit(n, n + 1)) == -1
    for i in range(n):
        for j in range(n):
            assert poisson_bracket(unit(n, i), unit(n, n + j)) == 0


def test_bracket_second_neighbours():
    assert poisson_bracket(unit(5, 0), unit(5, 2)) == 0
    # for n = 4 both neighbour terms hit index 2 and cancel
    assert poisson_bracket(unit(4, 0), unit(4, 2)) == 0


@pytest.mark.parametrize("n", range(4, 10))
def test_poisson_tensor_structure(n):
    P = poisson_matrix(n)
    assert np.array_equal(P.matrix, -P.matrix.T)
    assert np.all(P.matrix.sum(axis=1) == 0)
    assert P.kernel_dimension() == (2 if n % 2 else 4)
    assert np.linalg.matrix_rank(P.matrix) == 2 * genus_for(n)


@pytest.mark.parametrize("n", range(4, 10))
def test_two_form_structure(n):
    A = omega0_matrix(n).matrix
    assert np.array_equal(A, -A.T)
    # regression value: the unrestricted rank is 2g for odd n and 2g + 4 for even n
    assert np.linalg.matrix_rank(A) == 2 * genus_for(n) + (0 if n % 2 else 4)


def test_two_form_small_cases():
    assert onleaf_inverse_check(random_xy(4, 0))["rank_A_on_leaf"] == 4
    assert np.linalg.matrix_rank(omega0_matrix(5).matrix) == 8


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_gradients_match_finite_differences(n):
    xy = random_xy(n, 2)
    vals, G = invariant_gradients(xy)
    Gfd = finite_difference_gradients(xy)
    assert np.abs(G - Gfd).max() < 1e-5 * np.abs(G).max()
    assert np.allclose(vals, invariants(xy).vector(), rtol=1e-10, atol=1e-10 * np.abs(vals).max())


def test_Jq_gradient_is_constant():
    # d log J_q = d log prod(b) is a fixed integer pattern in (u, v)
    grads = []
    for seed in range(3):
        vals, G = invariant_gradients(random_xy(7, seed))
        grads.append(G[-1] / vals[-1])
    for g in grads[1:]:
        assert np.abs(g - grads[0]).max() < 1e-8
    assert np.allclose(grads[0], np.round(grads[0].real * 3) / 3, atol=1e-8)


@pytest.mark.parametrize("n", range(4, 10))
def test_gradient_rank(n):
    _, G = invariant_gradients(random_xy(n, 1))
    s = np.linalg.svd(G, compute_uv=False)
    # regression value: all 2q + 2 invariants are independent at a generic point
    assert int(np.sum(s > 1e-9 * s[0])) == 2 * (n // 2) + 2


@pytest.mark.parametrize("n", [6, 7])
def test_involution(n):
    report = involution_check(random_xy(n, 3))
    assert report["max_bracket"] < 1e-8


def test_involution_control():
    xy = random_xy(7, 3)
    _, G = invariant_gradients(xy)
    # d log x_0 against every invariant: some bracket must be large
    brackets = [abs(poisson_bracket(unit(7, 0), g)) for g in G]
    assert max(brackets) > 1e-2


@pytest.mark.parametrize("n", range(4, 10))
def test_casimirs_in_kernel(n):
    report = casimir_check(random_xy(n, 4))
    assert report["residual"] < 1e-8
    assert report["independent_casimirs"] == report["kernel_dimension"] == (2 if n % 2 else 4)


def test_casimirs_with_wide_coordinate_range():
    # coordinates spanning several decades make the extreme coefficients tiny on the unit circle
    rng = np.random.default_rng(5)
    xy = XYCoords(np.exp(2 * rng.standard_normal(9)), -np.exp(2 * rng.standard_normal(9)))
    assert casimir_check(xy)["residual"] < 1e-8


@pytest.mark.parametrize("n", [7, 8])
def test_bracket_invariance(n):
    assert bracket_invariance_check(random_xy(n, 5)) < 1e-8


def test_bracket_invariance_many_points():
    for seed in range(10):
        assert bracket_invariance_check(random_xy(6, 100 + seed)) < 1e-8


def test_bracket_invariance_control():
    assert bracket_invariance_check(random_xy(7, 5), broken_map) > 1e-2


def test_log_jacobian_against_differences():
    xy = random_xy(5, 0)
    Jl = log_jacobian(xy)
    h = 1e-6
    base = np.concatenate([np.log(xy.x), np.log(xy.y)])
    from pentagram.coords import pentagram_xy

    for k in range(10):
        cols = []
        for s in (1, -1):
            p = base.copy()
            p[k] += s * h
            img = pentagram_xy(XYCoords(np.exp(p[:5]), np.exp(p[5:])))
            cols.append(np.concatenate([np.log(img.x), np.log(img.y)]))
        assert np.abs(Jl[:, k] - (cols[0] - cols[1]) / (2 * h)).max() < 1e-6


@pytest.mark.parametrize("n", range(4, 10))
def test_onleaf_inverse(n):
    report = onleaf_inverse_check(random_xy(n, 1))
    assert report["residual"] < 1e-7
    assert report["PAP_minus_P"] < 1e-7
    assert report["rank_P"] == report["rank_A_on_leaf"] == report["two_g"]


def test_leaf_frame_annihilated():
    xy = random_xy(6, 2)
    F = leaf_frame(xy)
    G = leaf_constraints(xy)
    assert F.shape[1] == 12 - 4
    assert np.abs(G @ F).max() < 1e-9 * np.abs(G).max()


@pytest.mark.parametrize("n", [7, 8])
def test_omega_invariance(n):
    report = omega_invariance_check(random_xy(n, 2))
    assert report["residual"] < 1e-7


def test_omega_invariance_along_orbit():
    for state in orbit(random_xy(5, 7), 5):
        assert omega_invariance_check(state)["residual"] < 1e-7
