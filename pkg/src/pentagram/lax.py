"""Lax matrices with spectral parameter z, monodromy operators and gauge reductions.

Index conventions: every coordinate index is taken mod n. The monodromy based
at i is T_i = L_{i+n-1} ... L_{i+1} L_i.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coords import ABCoords, XYCoords, _m_for, pentagram
from .errors import (
    ConstraintViolated,
    DegenerateLambda,
    IndivisibilityViolated,
    UnsupportedN,
)
from .laurent import LaurentMatrix3, ordered_product

LAMBDA_TOL = 1e-12


def _kind(coords, which=None):
    if which is None:
        if isinstance(coords, ABCoords):
            return "ab"
        if isinstance(coords, XYCoords):
            return "xy"
        raise TypeError(f"unsupported coordinates {type(coords).__name__}")
    if which not in ("ab", "xy"):
        raise ValueError("which must be 'ab' or 'xy'")
    expected = ABCoords if which == "ab" else XYCoords
    if not isinstance(coords, expected):
        raise TypeError(f"which={which!r} needs {expected.__name__}")
    return which


# ---------------------------------------------------------------- Lax matrices


def lax_L(ab: ABCoords, i: int) -> LaurentMatrix3:
    n = ab.n
    a, b = ab.a[i % n], ab.b[i % n]
    return LaurentMatrix3.from_terms(
        {
            -1: [[0, 0, 0], [-a, 0, 1], [0, 0, 0]],
            0: [[-b, 1, 0], [0, 0, 0], [1, 0, 0]],
        }
    )


def lax_L_inv(ab: ABCoords, i: int) -> LaurentMatrix3:
    n = ab.n
    a, b = ab.a[i % n], ab.b[i % n]
    return LaurentMatrix3.from_terms(
        {
            0: [[0, 0, 1], [1, 0, b], [0, 0, a]],
            1: [[0, 0, 0], [0, 0, 0], [0, 1, 0]],
        }
    )


def lax_Ltilde(xy: XYCoords, i: int) -> LaurentMatrix3:
    n = xy.n
    x, y = xy.x[(i + 2) % n], xy.y[(i + 2) % n]
    return LaurentMatrix3.from_terms(
        {
            -1: [[0, 0, 0], [1, 0, 1], [0, 0, 0]],
            0: [[1 / x, -1 / x, 0], [0, 0, 0], [-y, 0, 0]],
        }
    )


def lax_Ltilde_inv(xy: XYCoords, i: int) -> LaurentMatrix3:
    n = xy.n
    x, y = xy.x[(i + 2) % n], xy.y[(i + 2) % n]
    return LaurentMatrix3.from_terms(
        {
            0: [[0, 0, -1 / y], [-x, 0, -1 / y], [0, 0, 1 / y]],
            1: [[0, 0, 0], [0, 0, 0], [0, 1, 0]],
        }
    )


def lax_matrix(coords, i, which=None):
    return lax_L(coords, i) if _kind(coords, which) == "ab" else lax_Ltilde(coords, i)


def lax_matrix_inv(coords, i, which=None):
    return lax_L_inv(coords, i) if _kind(coords, which) == "ab" else lax_Ltilde_inv(coords, i)


# ------------------------------------------------------------ time-step matrices


def lambda_products(ab: ABCoords) -> np.ndarray:
    """lam[i] = prod_{l=1..m} (1 + a_{i+3l+1} b_{i+3l})."""
    n = ab.n
    m = _m_for(n)
    i = np.arange(n)
    lam = np.ones(n, complex)
    for l in range(1, m + 1):
        lam *= 1 + ab.a[(i + 3 * l + 1) % n] * ab.b[(i + 3 * l) % n]
    return lam


def pmatrix_P(ab: ABCoords, i: int) -> LaurentMatrix3:
    n = ab.n
    if n % 3 == 0:
        raise UnsupportedN(f"no (a, b) time-step matrix for n={n}")
    lam_all = lambda_products(ab)
    if np.any(np.abs(lam_all) < LAMBDA_TOL):
        raise DegenerateLambda("a lambda product vanishes")
    a = lambda k: ab.a[k % n]
    b = lambda k: ab.b[k % n]
    lam = lambda k: lam_all[k % n]
    if n % 3 == 1:
        const = [
            [-a(i) * lam(i - 1), 0, lam(i - 1)],
            [lam(i - 3), -a(i + 1) * lam(i), b(i - 1) * lam(i - 3)],
            [0, 0, 0],
        ]
        lin = [[0, 0, 0], [0, 0, 0], [0, lam(i - 2), 0]]
    else:
        u = lambda k: 1 + a(k + 1) * b(k)
        s0 = lam(i) * lam(i - 1) * u(i)
        s1 = lam(i) * lam(i - 2) * u(i)
        s2 = lam(i) * lam(i + 1) * u(i + 1)
        const = [
            [-a(i) * s0, 0, s0],
            [s1, -a(i + 1) * s2, b(i - 1) * s1],
            [0, 0, 0],
        ]
        lin = [[0, 0, 0], [0, 0, 0], [0, lam(i + 1) * lam(i - 1) * u(i + 1), 0]]
    return LaurentMatrix3.from_terms({0: const, 1: lin})


def pmatrix_Ptilde(xy: XYCoords, i: int) -> LaurentMatrix3:
    n = xy.n
    x = lambda k: xy.x[k % n]
    y = lambda k: xy.y[k % n]
    w = lambda k: 1 - x(k) * y(k)
    const = [
        [w(i + 2), 0, w(i + 2)],
        [x(i + 1) * y(i + 1) * w(i + 2), w(i + 1), w(i + 2)],
        [0, 0, 0],
    ]
    lin = [[0, 0, 0], [0, 0, 0], [0, -y(i + 2) * w(i + 3), 0]]
    return LaurentMatrix3.from_terms({0: const, 1: lin})


def pmatrix(coords, i, which=None):
    return pmatrix_P(coords, i) if _kind(coords, which) == "ab" else pmatrix_Ptilde(coords, i)


def zero_curvature_residual(state, which=None, z_samples=(0.5, 1 + 1j, -2), next_state=None) -> float:
    """Max over i and z of |L_{i,t+1} P_{i,t} - P_{i+1,t} L_{i,t}|, normalized.

    ``next_state`` defaults to the pentagram image of ``state``; passing a
    different one turns this into a sensitivity probe.
    """
    kind = _kind(state, which)
    if next_state is None:
        next_state = pentagram(state)
    n = state.n
    worst = 0.0
    for i in range(n):
        L0 = lax_matrix(state, i, kind)
        L1 = lax_matrix(next_state, i, kind)
        P0 = pmatrix(state, i, kind)
        P1 = pmatrix(state, i + 1, kind)
        for z in z_samples:
            lhs = L1(z) @ P0(z)
            rhs = P1(z) @ L0(z)
            scale = max(
                np.abs(L1(z)).max() * np.abs(P0(z)).max(),
                np.abs(P1(z)).max() * np.abs(L0(z)).max(),
            )
            worst = max(worst, float(np.abs(lhs - rhs).max() / scale))
    return worst


# ------------------------------------------------------------------ monodromy


def monodromy_T(coords, which=None, base: int = 0) -> LaurentMatrix3:
    kind = _kind(coords, which)
    return ordered_product([lax_matrix(coords, base + k, kind) for k in range(coords.n)])


def monodromy_T_inv(coords, which=None, base: int = 0) -> LaurentMatrix3:
    """T_i^{-1} = L_i^{-1} ... L_{i+n-1}^{-1}, built from exact entry inverses."""
    kind = _kind(coords, which)
    invs = [lax_matrix_inv(coords, base + k, kind) for k in range(coords.n)]
    return ordered_product(invs[::-1])


def expected_leading_terms(ab: ABCoords):
    """Closed-form leading Laurent coefficients of T_0 at z=0 and T_0^{-1} at z=inf.

    Returns a list of (label, matrix, exponent, r, s, value): the coefficient of
    z^exponent in entry (r, s) of the named matrix. Entries that are O(...) in
    the closed form are not listed.
    """
    n, a, b = ab.n, ab.a, ab.b
    q = n // 2
    out = []
    if n % 2 == 0:
        e_T = -q
        out += [
            ("T", e_T, 0, 0, (-1) ** q * np.prod(a[0:n:2])),
            ("T", e_T, 0, 1, 0),
            ("T", e_T, 0, 2, (-1) ** (q - 1) * np.prod(a[2:n:2])),
            ("T", e_T, 1, 1, (-1) ** q * np.prod(a[1:n:2])),
            ("T", e_T, 2, 0, 0),
            ("T", e_T, 2, 1, 0),
            ("T", e_T, 2, 2, 0),
        ]
        e_I = q
        out += [
            ("Tinv", e_I, 0, 0, 0),
            ("Tinv", e_I, 0, 1, np.prod(b[2:n:2])),
            ("Tinv", e_I, 0, 2, 0),
            ("Tinv", e_I, 1, 0, 0),
            ("Tinv", e_I, 1, 1, np.prod(b[0:n:2])),
            ("Tinv", e_I, 1, 2, 0),
            ("Tinv", e_I, 2, 0, np.prod(b[1 : n - 1 : 2])),
            ("Tinv", e_I, 2, 2, np.prod(b[1:n:2])),
        ]
    else:
        out += [
            ("T", -q, 0, 1, np.prod(-a[1:n:2])),
            ("T", -q - 1, 1, 0, np.prod(-a[0:n:2])),
            ("T", -q - 1, 1, 2, np.prod(-a[2:n:2])),
            ("T", -q - 1, 0, 0, 0),
            ("T", -q - 1, 0, 1, 0),
            ("T", -q - 1, 0, 2, 0),
            ("T", -q - 1, 1, 1, 0),
            ("T", -q - 1, 2, 0, 0),
            ("T", -q - 1, 2, 1, 0),
            ("T", -q - 1, 2, 2, 0),
            ("Tinv", q, 0, 2, np.prod(b[2:n:2])),
            ("Tinv", q, 1, 0, np.prod(b[0 : n - 1 : 2])),
            ("Tinv", q, 1, 2, np.prod(b[0:n:2])),
            ("Tinv", q + 1, 2, 1, np.prod(b[1:n:2])),
            ("Tinv", q + 1, 0, 0, 0),
            ("Tinv", q + 1, 0, 1, 0),
            ("Tinv", q + 1, 0, 2, 0),
            ("Tinv", q + 1, 1, 0, 0),
            ("Tinv", q + 1, 1, 1, 0),
            ("Tinv", q + 1, 1, 2, 0),
            ("Tinv", q + 1, 2, 0, 0),
            ("Tinv", q + 1, 2, 2, 0),
        ]
    return out


def monodromy_asymptotics_check(ab: ABCoords) -> dict:
    """Compare extreme Laurent coefficients of T_0 and T_0^{-1} with closed forms.

    Also confirms that no coefficient lies beyond the stated leading order.
    Residuals are relative to 1 + |expected|.
    """
    T = monodromy_T(ab, "ab")
    Tinv = monodromy_T_inv(ab, "ab")
    mats = {"T": T, "Tinv": Tinv}
    entries = []
    worst = 0.0
    for label, k, r, s, value in expected_leading_terms(ab):
        got = mats[label].coeff(k)[r, s]
        res = abs(got - value) / (1 + abs(value))
        worst = max(worst, res)
        entries.append({"matrix": label, "exponent": k, "entry": (r, s), "expected": complex(value), "got": complex(got), "residual": res})
    n, q = ab.n, ab.n // 2
    lowest = -q if n % 2 == 0 else -q - 1
    highest = q if n % 2 == 0 else q + 1
    support_ok = T.min_exp >= lowest and Tinv.max_exp <= highest
    degenerate = bool(np.any(ab.a == 0) or np.any(ab.b == 0))
    return {"max_residual": worst, "support_ok": bool(support_ok), "degenerate": degenerate, "entries": entries}


# ------------------------------------------------------------------- gauges


def gauge_matrix_ab_to_xy(ab: ABCoords, i: int) -> np.ndarray:
    n = ab.n
    return np.diag([1, ab.b[i % n], -ab.a[i % n]])


def gauge_relation_check(ab: ABCoords) -> float:
    """Max coefficient deviation of Ltilde_i from -(b_{i+1}/a_i) g_{i+1}^{-1} L_i g_i."""
    from .coords import ab_to_xy

    if ab.n % 3 == 0:
        raise IndivisibilityViolated(f"n={ab.n} is divisible by 3")
    xy = ab_to_xy(ab)
    n = ab.n
    worst = 0.0
    for i in range(n):
        g0 = gauge_matrix_ab_to_xy(ab, i)
        g1_inv = np.diag(1 / np.diag(gauge_matrix_ab_to_xy(ab, i + 1)))
        L = lax_L(ab, i)
        conj = LaurentMatrix3(np.einsum("ij,kjl,lm->kim", g1_inv, L.coeffs, g0), L.low)
        rhs = conj * (-(ab.b[(i + 1) % n] / ab.a[i]))
        lhs = lax_Ltilde(xy, i)
        worst = max(worst, lhs.max_deviation(rhs) / max(lhs.max_abs(), 1.0))
    return worst


@dataclass(frozen=True)
class GaugeSequence:
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def matrix(self, j):
        n = len(self.alpha)
        return np.diag([self.alpha[j % n], self.beta[j % n], self.gamma[j % n]])


def primed_inverse_matrix(a, b, c, d, e) -> LaurentMatrix3:
    """[[0,0,c],[d,0,b],[0,e z,a]], i.e. the inverse of a general Lax matrix."""
    return LaurentMatrix3.from_terms(
        {0: [[0, 0, c], [d, 0, b], [0, 0, a]], 1: [[0, 0, 0], [0, 0, 0], [0, e, 0]]}
    )


def _primed_params(primed):
    cols = {k: [] for k in "abcde"}
    for m in primed:
        c0, c1 = m.coeff(0), m.coeff(1)
        cols["c"].append(c0[0, 2])
        cols["d"].append(c0[1, 0])
        cols["b"].append(c0[1, 2])
        cols["a"].append(c0[2, 2])
        cols["e"].append(c1[2, 1])
        mask0 = np.ones((3, 3), bool)
        mask0[[0, 1, 1, 2], [2, 0, 2, 2]] = False
        mask1 = np.ones((3, 3), bool)
        mask1[2, 1] = False
        if m.min_exp < 0 or m.max_exp > 1 or np.abs(c0[mask0]).max() > 0 or np.abs(c1[mask1]).max() > 0:
            raise ValueError("matrix is not of the form [[0,0,c],[d,0,b],[0,e z,a]]")
    return {k: np.array(v, complex) for k, v in cols.items()}


def gauge_reduce(primed, target: str, tol: float = 1e-10):
    """Bring a sequence of general inverse Lax matrices to the (a, b) or (x, y) form.

    ``primed[j]`` is the matrix [[0,0,c'],[d',0,b'],[0,e'z,a']] (the inverse of
    L'_j). Diagonal gauges g_j with L_j^{-1} = g_j L'_j^{-1} g_{j+1}^{-1} are
    found by propagating the gauge conditions once around the cycle; the
    remaining free constant is the overall scale, which cancels.
    """
    p = _primed_params(primed)
    if target == "ab":
        return _reduce_ab(p, tol)
    if target == "xy":
        return _reduce_xy(p, tol)
    raise ValueError("target must be 'ab' or 'xy'")


def gauge_reduce_params(a, b, c, d, e, target: str, tol: float = 1e-10):
    p = {k: np.asarray(v, dtype=complex) for k, v in zip("abcde", (a, b, c, d, e))}
    return _reduce_ab(p, tol) if target == "ab" else _reduce_xy(p, tol)


def _check_nonzero(p):
    for k, v in p.items():
        if np.any(v == 0):
            raise ConstraintViolated(f"primed coefficient {k} has a zero entry")


def _reduce_ab(p, tol):
    n = len(p["a"])
    if n % 3 == 0:
        raise UnsupportedN(f"(a, b) reduction needs n not divisible by 3, got n={n}")
    _check_nonzero(p)
    total = np.prod(p["c"] * p["d"] * p["e"])
    if abs(total - 1) > tol * max(1.0, abs(total)):
        raise ConstraintViolated(f"prod c'd'e' = {total:.6g}, expected 1")
    # (alpha, beta, gamma)_{j+1} = (d' beta_j, e' gamma_j, c' alpha_j)
    v = _periodic_gauge_vector(p, n)
    alpha, beta, gamma = _propagate_ab(p, v, n)
    a = p["a"] * gamma[:n] / gamma[1:]
    b = p["b"] * beta[:n] / gamma[1:]
    return ABCoords(a, b), GaugeSequence(alpha[:n], beta[:n], gamma[:n])


def _propagate_ab(p, v, n):
    alpha, beta, gamma = (np.empty(n + 1, complex) for _ in range(3))
    alpha[0], beta[0], gamma[0] = v
    for j in range(n):
        alpha[j + 1] = p["d"][j] * beta[j]
        beta[j + 1] = p["e"][j] * gamma[j]
        gamma[j + 1] = p["c"][j] * alpha[j]
    return alpha, beta, gamma


def _periodic_gauge_vector(p, n):
    """Eigenvector of the exact cycle map with eigenvalue 1."""
    M = np.eye(3, dtype=complex)
    for j in range(n):
        M = np.array([[0, p["d"][j], 0], [0, 0, p["e"][j]], [p["c"][j], 0, 0]]) @ M
    vals, vecs = np.linalg.eig(M)
    k = int(np.argmin(np.abs(vals - 1)))
    if abs(vals[k] - 1) > 1e-8:
        raise ConstraintViolated("cycle map has no eigenvalue 1")
    return vecs[:, k]


def _reduce_xy(p, tol):
    n = len(p["a"])
    _check_nonzero(p)
    lhs = np.prod(p["a"])
    rhs = (-1) ** n * np.prod(p["b"] * p["e"])
    if abs(lhs - rhs) > tol * max(abs(lhs), abs(rhs)):
        raise ConstraintViolated("prod a' must equal (-1)^n prod b'e'")
    gamma = np.empty(n + 1, complex)
    gamma[0] = 1.0
    for j in range(n):
        gamma[j + 1] = -gamma[j] * p["e"][j] * p["b"][(j + 1) % n] / p["a"][(j + 1) % n]
    gamma[n] = gamma[0]
    beta = np.empty(n + 1, complex)
    beta[0] = -gamma[0] * p["a"][0] / p["b"][0]
    beta[1:] = gamma[:n] * p["e"]
    alpha = beta[:n] * p["b"] / p["c"]
    alpha = np.append(alpha, alpha[0])
    j = np.arange(n)
    # coordinates are indexed two steps ahead of the matrix index
    x = np.empty(n, complex)
    y = np.empty(n, complex)
    x[(j + 2) % n] = -beta[:n] * p["d"] / alpha[1:]
    y[(j + 2) % n] = gamma[1:] / (gamma[:n] * p["a"])
    return XYCoords(x, y), GaugeSequence(alpha[:n], beta[:n], gamma[:n])
