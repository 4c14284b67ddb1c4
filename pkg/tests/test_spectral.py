import itertools

import numpy as np
import pytest

from pentagram.coords import ABCoords, XYCoords, ab_to_xy, orbit, pentagram_xy, xy_to_ab
from pentagram.errors import DivisionByZero, NearBranchPoint, SupportMismatch, ZeroZ
from pentagram.lax import monodromy_T
from pentagram.polygon import xy_from_chain
from pentagram.samples import random_ab, random_closed_chain, random_twisted_chain, random_xy
from pentagram.spectral import (
    F_function,
    SpectralInvariants,
    branch_points,
    casimir_map,
    chain_invariants,
    closed_polygon_relations,
    conservation_drift,
    curve_eval,
    curve_partials,
    floquet_bloch,
    invariants,
    invariants_from_monodromy,
    marked_point_limits,
    singularity_expansions_check,
)

from conftest import rel_err

CONST_AB = ABCoords(np.full(4, 2.0), np.full(4, 3.0))


def test_constant_data_invariants():
    # I(z) = 18 z^2 + 56 z + 16, J(z) = 8 z^-2 - 84 z^-1 + 81 (symbolic oracle)
    inv = invariants(CONST_AB)
    assert np.allclose(inv.I, [18, 56, 16], atol=1e-12)
    assert np.allclose(inv.J, [8, -84, 81], atol=1e-12)
    assert inv.C == 1


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9])
def test_extreme_invariants_closed_form(n):
    ab = random_ab(n, 2) if n % 3 else ABCoords(*np.exp(0.3 * np.random.default_rng(n).standard_normal((2, n))))
    inv = invariants(ab)
    assert abs(inv.I[-1] - np.prod(ab.a)) <= 1e-12 * max(1, abs(np.prod(ab.a)))
    assert abs(inv.J[-1] - (-1) ** n * np.prod(ab.b)) <= 1e-12 * max(1, abs(np.prod(ab.b)))


def test_even_n_first_invariants():
    ab = random_ab(8, 1)
    a, b = ab.a, ab.b
    inv = invariants(ab)
    assert abs(inv.I[0] - (np.prod(b[0::2]) + np.prod(b[1::2]))) < 1e-12 * (1 + abs(inv.I[0]))
    assert abs(inv.J[0] - (np.prod(a[0::2]) + np.prod(a[1::2]))) < 1e-12 * (1 + abs(inv.J[0]))


@pytest.mark.parametrize("n", [4, 5, 7, 8])
def test_xy_and_ab_kinds_agree(n):
    ab = random_ab(n, 1)
    inv_ab = invariants(ab)
    # the rescaling constant that matches the (a, b) data is J_q / I_q for either parity
    C = inv_ab.J[-1] / inv_ab.I[-1]
    inv_xy = invariants(ab_to_xy(ab), C=C)
    assert rel_err(inv_xy.vector(), inv_ab.vector()) < 1e-10


@pytest.mark.parametrize("n", [4, 5, 7, 8])
def test_default_branch_matches_preimage(n):
    xy = random_xy(n, 4)
    assert rel_err(invariants(xy).vector(), invariants(xy_to_ab(xy)).vector()) < 1e-10


def test_explicit_monodromy_route():
    ab = random_ab(7, 3)
    direct = invariants_from_monodromy(monodromy_T(ab, "ab"), "ab")
    assert rel_err(direct.vector(), invariants(ab).vector()) < 1e-10


def test_support_mismatch():
    T = monodromy_T(random_ab(5, 0), "ab")
    with pytest.raises(SupportMismatch):
        invariants_from_monodromy(T * 2.0, "ab")


def test_conservation_example():
    assert conservation_drift(orbit(random_xy(7, 42), 100)) < 1e-9


def test_conservation_fixed_point():
    xy = XYCoords(np.full(7, 0.5 + 0.2j), np.full(7, -1.3))
    assert conservation_drift(orbit(xy, 10)) < 1e-14


def test_conservation_broken_map_control():
    def broken(xy):
        # one sign flipped in 1 - x y
        w = 1 + xy.x * xy.y
        i = np.arange(xy.n)
        return XYCoords(xy.x * w[(i - 1) % xy.n] / w[(i + 1) % xy.n], xy.y[(i + 1) % xy.n] * w[(i + 2) % xy.n] / w)

    xy = random_xy(7, 42)
    assert conservation_drift(orbit(xy, 10, step_fn=broken)) > 1e-3
    assert conservation_drift(orbit(xy, 10, step_fn=pentagram_xy)) < 1e-9


def test_curve_vanishes_at_eigenvalues():
    ab = random_ab(7, 1)
    inv = invariants(ab)
    for z in (0.4 + 0.3j, -1.2, 2j):
        zn = abs(z) ** -inv.n
        for k in np.linalg.eigvals(monodromy_T(ab)(z)):
            terms = abs(k) ** 3 + abs(k**2 * inv.J_of(z)) + abs(k * inv.I_of(z)) * zn + zn
            assert abs(curve_eval(inv, k, z)) < 1e-9 * terms


def test_curve_at_zero():
    inv = invariants(CONST_AB)
    with pytest.raises(ZeroZ):
        curve_eval(inv, 1.0, 0)
    with pytest.raises(ZeroZ):
        curve_partials(inv, 1.0, 0)


def test_curve_partials_against_differences():
    inv = invariants(random_ab(5, 2))
    k, z, h = 0.7 - 0.2j, 1.1 + 0.3j, 1e-6
    R, Rk, Rz = curve_partials(inv, k, z)
    assert abs(Rk - (curve_eval(inv, k + h, z) - curve_eval(inv, k - h, z)) / (2 * h)) < 1e-6 * (1 + abs(Rk))
    assert abs(Rz - (curve_eval(inv, k, z + h) - curve_eval(inv, k, z - h)) / (2 * h)) < 1e-6 * (1 + abs(Rz))


def test_closed_polygon_triple_point():
    inv = chain_invariants(random_closed_chain(7, 3))
    R, Rk, Rz = curve_partials(inv, 1.0, 1.0)
    assert max(abs(R), abs(Rk), abs(Rz)) < 1e-9


def test_branch_points_n5():
    curve = branch_points(invariants(random_xy(5, 0)))
    assert curve.nu_finite == 10 and curve.genus == 4


def test_branch_points_n6():
    curve = branch_points(invariants(random_xy(6, 0)))
    assert curve.nu_finite == 12 and curve.genus == 4


def test_branch_points_closed_n7():
    curve = branch_points(chain_invariants(random_closed_chain(7, 0)))
    assert curve.genus == 3
    assert curve.singular_points and curve.singular_points[0]["discriminant_order"] == 6


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9])
def test_branch_census(n):
    for seed in range(3):
        curve = branch_points(invariants(random_xy(n, seed)))
        assert curve.nu_finite == 2 * n
        assert curve.nu_total == (2 * n + 2 if n % 2 else 2 * n)
        assert curve.genus == (n - 1 if n % 2 else n - 2)
        assert curve.nu_total == 2 * curve.genus + 4
        assert curve.divisor_degree == curve.genus + 2
        # regression value: the discriminant vanishes to order n at z = 0
        assert curve.discriminant_zero_order == n


@pytest.mark.parametrize("n", [5, 6, 7, 8, 9])
def test_closed_genus(n):
    curve = branch_points(chain_invariants(random_closed_chain(n, 1)))
    assert curve.genus == (n - 4 if n % 2 else n - 5)


@pytest.mark.parametrize("n", [5, 6])
def test_singularity_expansions(n):
    report = singularity_expansions_check(invariants(random_ab(n, 3) if n % 3 else random_xy(n, 3)))
    assert report["max_residual"] < 1e-6


def test_odd_growth_order():
    report = singularity_expansions_check(invariants(random_ab(5, 1)))
    assert abs(report["O2_O3"]["growth_order"] - 2.5) < 0.05
    assert abs(report["W2_W3"]["decay_order"] - 2.5) < 0.05


def test_first_marked_point_value():
    ab = random_ab(7, 2)
    report = singularity_expansions_check(invariants(ab))
    assert abs(report["O1"]["leading"] - 1 / np.prod(ab.a)) < 1e-7 * abs(1 / np.prod(ab.a))


def test_closed_hexagon_relations():
    assert np.abs(closed_polygon_relations(chain_invariants(random_closed_chain(6, 2)))).max() < 1e-8


def test_twisted_control_relations():
    assert np.abs(closed_polygon_relations(chain_invariants(random_twisted_chain(6, 2)))).max() > 1e-2


def test_relations_arithmetic():
    n, q = 7, 3
    I = np.zeros(q + 1)
    J = np.zeros(q + 1)
    I[q] = J[q] = 3
    res = closed_polygon_relations(SpectralInvariants(n, I, J))
    assert np.allclose(res, [0, 0, n, n, 0])


def test_casimir_values():
    c = casimir_map(invariants(CONST_AB))
    assert c["E_n"] == pytest.approx(81 / 256)
    assert c["O_n"] == pytest.approx(16 / 6561)
    assert c["E_half"] == pytest.approx(18 / 16)
    assert c["O_half"] == pytest.approx(8 / 81)


def test_casimirs_odd_n():
    assert set(casimir_map(invariants(random_ab(7, 0)))) == {"E_n", "O_n"}


def test_casimirs_need_nonzero_extremes():
    with pytest.raises(DivisionByZero):
        casimir_map(SpectralInvariants(5, np.array([1, 2, 0.0]), np.array([1, 2, 3.0])))


def test_casimirs_conserved():
    xy = random_xy(8, 6)
    C0 = invariants(xy).C
    ref = casimir_map(invariants(xy))
    for state in orbit(xy, 100)[1:]:
        now = casimir_map(invariants(state, C=C0))
        for key, value in ref.items():
            assert abs(now[key] - value) < 1e-9 * (1 + abs(value))


def test_floquet_bloch_vector():
    Tz = monodromy_T(random_ab(7, 1))(0.8 + 0.3j)
    for branch in range(3):
        fb = floquet_bloch(Tz, branch)
        assert np.abs(Tz @ fb.psi - fb.k * fb.psi).max() < 1e-10 * np.abs(Tz).max()
        assert np.abs(fb.psi_star @ Tz - fb.k * fb.psi_star).max() < 1e-10 * np.abs(Tz).max() * np.abs(fb.psi_star).max()
        assert abs(fb.psi.sum() - 1) < 1e-14
        assert abs(fb.psi_star @ fb.psi - 1) < 1e-12


def test_floquet_bloch_at_branch_point():
    with pytest.raises(NearBranchPoint):
        floquet_bloch(np.diag([1.0, 1.0, 2.0]))


def test_F_independent_of_ordering():
    Tz = monodromy_T(random_ab(5, 1))(0.6 - 0.5j)
    values = [F_function(Tz, order) for order in itertools.permutations(range(3))]
    assert max(abs(v - values[0]) for v in values) < 1e-12 * abs(values[0])
    assert abs(values[0]) > 1e-6


def test_F_simple_zero_at_branch_point():
    ab = random_ab(5, 1)
    T = monodromy_T(ab)
    zb = branch_points(invariants(ab)).branch_z[4]
    F = [np.mean([abs(F_function(T(zb + r * np.exp(1j * t)))) for t in (0.1, 1.7, 3.9)]) for r in (1e-3, 1e-4)]
    assert 7 < F[0] / F[1] < 13


@pytest.mark.parametrize("seed", range(3))
def test_marked_points_odd(seed):
    ab = random_ab(7, seed)
    report = marked_point_limits(ab)
    assert report["a0"]["residual"] < 1e-6
    assert report["psi_star_O1"]["residual"] < 1e-6
    assert report["psibar_O1"]["residual"] < 1e-6
    assert report["b_last"]["residual"] < 1e-6
    assert report["b0"]["residual"] < 1e-6


def test_marked_points_even():
    n = 6
    ab = ABCoords(*np.exp(0.3 * (np.random.default_rng(1).standard_normal((2, n)) + 0.5j)))
    report = marked_point_limits(ab)
    assert report["b0"]["residual"] < 1e-6
    assert report["b_last"]["residual"] < 1e-6
