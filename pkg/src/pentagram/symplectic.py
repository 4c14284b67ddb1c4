"""The invariant Poisson structure and 2-form, in logarithmic coordinates.

With u_i = log x_i and v_i = log y_i both the Poisson tensor and the 2-form
are constant 2n x 2n matrices, so invariance and inversion statements become
plain matrix identities evaluated at a point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coords import XYCoords, pentagram_xy_arrays
from .dual import Dual, stack_matrix
from .errors import MapUndefined, NonGeneric
from .spectral import casimir_map, invariants

RANK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class PoissonTensor:
    n: int
    matrix: np.ndarray

    def kernel_dimension(self):
        return 2 * self.n - int(np.linalg.matrix_rank(self.matrix))


@dataclass(frozen=True, eq=False)
class TwoForm:
    n: int
    q: int
    matrix: np.ndarray


def poisson_matrix(n: int) -> PoissonTensor:
    """{u_i, u_{i+1}} = 1, {v_i, v_{i+1}} = -1, indices mod n; u and v commute."""
    P = np.zeros((2 * n, 2 * n))
    for i in range(n):
        P[i, (i + 1) % n] += 1
        P[i, (i - 1) % n] -= 1
        P[n + i, n + (i - 1) % n] += 1
        P[n + i, n + (i + 1) % n] -= 1
    return PoissonTensor(n, P)


def omega0_matrix(n: int) -> TwoForm:
    """sum_j du_{2j+1} ^ d(u_0 + u_2 + ... + u_{2j}) minus the same in v, j < q."""
    q = n // 2
    A = np.zeros((2 * n, 2 * n))
    for off, sign in ((0, 1), (n, -1)):
        for j in range(q):
            for k in range(j + 1):
                r, c = off + 2 * j + 1, off + 2 * k
                A[r, c] += sign
                A[c, r] -= sign
    return TwoForm(n, q, A)


def poisson_bracket(f_grad, g_grad, P=None) -> complex:
    f_grad = np.asarray(f_grad)
    if P is None:
        P = poisson_matrix(len(f_grad) // 2)
    M = P.matrix if isinstance(P, PoissonTensor) else P
    return complex(f_grad @ M @ np.asarray(g_grad))


def genus_for(n: int) -> int:
    return n - 2 if n % 2 == 0 else n - 1


# ------------------------------------------------------------ gradients


def _log_variables(xy: XYCoords):
    n = xy.n
    u = Dual.variables(np.zeros(n), 0, 2 * n)
    v = Dual.variables(np.zeros(n), n, 2 * n)
    # x = x0 * exp(u) at u = 0, so d x / d u = x
    return xy.x * u.exp(), xy.y * v.exp()


def _trace_samples(x: Dual, y: Dual, zs):
    """tr T and sigma_2 T of the xy monodromy at each z, as Duals.

    sigma_2 is taken as det T * tr T^-1 with det T = prod(y/x) z^-n; the
    2x2 minors of T cancel badly away from the unit circle.
    """
    n = len(x)
    ratio = y[0] / x[0]
    for i in range(1, n):
        ratio = ratio * (y[i] / x[i])
    out = []
    for z in zs:
        T = T_inv = None
        for i in range(n):
            xi, yi = x[(i + 2) % n], y[(i + 2) % n]
            L = stack_matrix([[1 / xi, -1 / xi, 0], [1 / z, 0, 1 / z], [-yi, 0, 0]], x.nvars)
            L_inv = stack_matrix([[0, 0, -1 / yi], [-xi, 0, -1 / yi], [0, z, 1 / yi]], x.nvars)
            T = L if T is None else L @ T
            T_inv = L_inv if T_inv is None else T_inv @ L_inv
        tr = T[0, 0] + T[1, 1] + T[2, 2]
        s2 = ratio * (T_inv[0, 0] + T_inv[1, 1] + T_inv[2, 2]) * z**-n
        out.append((tr, s2))
    return out


def invariant_gradients(xy: XYCoords, C=None, radius=1.0):
    """Values and log-coordinate gradients of I_0..I_q, J_0..J_q.

    The monodromy traces are differentiated in forward mode at the points
    radius * (roots of unity) and the Laurent coefficients are recovered by a
    discrete Fourier sum. Returns (values, gradients) with gradients of shape
    (2q+2, 2n).
    """
    n, q = xy.n, xy.n // 2
    if C is None:
        C = invariants(xy).C
    x, y = _log_variables(xy)
    N = 2 * q + 4
    zs = radius * np.exp(2j * np.pi * np.arange(N) / N)
    samples = _trace_samples(x, y, zs)
    # d log C = (sum dv - sum du) / 3
    Cd = Dual(C, C * np.concatenate([-np.ones(n), np.ones(n)]) / 3)
    rows_val, rows_der = [], []
    I_terms = [s2 * (1 / Cd**2) * (z**n) for (z, (_, s2)) in zip(zs, samples)]
    J_terms = [tr * (1 / Cd) for (_, (tr, _)) in zip(zs, samples)]
    for j in range(q + 1):
        acc = sum((t * (z ** -(q - j)) for t, z in zip(I_terms, zs)), Dual.constant(0, 2 * n))
        rows_val.append(acc.val / N)
        rows_der.append(acc.der / N)
    for j in range(q + 1):
        acc = sum((t * (z ** -(j - q)) for t, z in zip(J_terms, zs)), Dual.constant(0, 2 * n))
        rows_val.append(acc.val / N)
        rows_der.append(acc.der / N)
    return np.array(rows_val), np.array(rows_der)


def finite_difference_gradients(xy: XYCoords, h=1e-6, C=None):
    """Central differences of the invariants in log coordinates."""
    n = xy.n
    if C is None:
        C = invariants(xy).C
    base = np.concatenate([xy.x, xy.y])
    grads = np.zeros((2 * (n // 2) + 2, 2 * n), complex)
    for k in range(2 * n):
        vals = []
        for s in (1, -1):
            p = base.copy()
            p[k] *= np.exp(s * h)
            state = XYCoords(p[:n], p[n:])
            c = C * np.exp(s * h * (1 if k >= n else -1) / 3)
            vals.append(invariants(state, C=c).vector())
        grads[:, k] = (vals[0] - vals[1]) / (2 * h)
    return grads


def log_jacobian(xy: XYCoords, map_fn=pentagram_xy_arrays) -> np.ndarray:
    """Jacobian of the map in (u, v) coordinates, shape (2n, 2n)."""
    w = 1 - xy.x * xy.y
    if np.any(np.abs(w) < 1e-12):
        raise MapUndefined("1 - x_i y_i vanishes")
    x, y = _log_variables(xy)
    X, Y = map_fn(x, y)
    rows = np.concatenate([X.der / X.val[:, None], Y.der / Y.val[:, None]])
    return rows


# ------------------------------------------------------------ checks


def involution_check(xy: XYCoords) -> dict:
    """Largest bracket between two invariants, raw and relative to gradient sizes."""
    _, G = invariant_gradients(xy)
    P = poisson_matrix(xy.n).matrix
    B = G @ P @ G.T
    norms = np.linalg.norm(G, axis=1)
    scale = np.outer(norms, norms)
    rel = np.abs(B) / np.where(scale > 0, scale, 1)
    return {"max_bracket": float(np.abs(B).max()), "max_relative": float(rel.max())}


def _dominant_radius(coeffs, powers, target):
    """Circle radius on which the target term outweighs every other term."""
    c = np.maximum(np.abs(np.asarray(coeffs)), 1e-300)
    ct = c[powers.index(target)]
    lo, hi = 0.0, np.inf
    for ck, p in zip(c, powers):
        if p > target:
            hi = min(hi, (ct / ck) ** (1 / (p - target)))
        elif p < target:
            lo = max(lo, (ck / ct) ** (1 / (target - p)))
    if np.isinf(hi):
        return max(lo, 1.0)
    if lo == 0.0:
        return min(hi, 1.0)
    return np.sqrt(lo * hi)


def extreme_gradients(xy: XYCoords):
    """Values and gradients of I_0..I_q, J_0..J_q, with the extreme ones
    (I_0, I_q, J_0, J_q) resampled on circles where they dominate.

    On the unit circle the extreme coefficients can be swamped by the others
    when the coordinates span several orders of magnitude.
    """
    q = xy.n // 2
    C = invariants(xy).C
    vals, G = invariant_gradients(xy, C)
    vals, G = vals.copy(), G.copy()
    I, J = vals[: q + 1], vals[q + 1 :]
    # I_j multiplies z^(q-j), J_j multiplies z^(j-q)
    I_pow = [q - j for j in range(q + 1)]
    J_pow = [j - q for j in range(q + 1)]
    picks = [(0, I, I_pow, q), (q, I, I_pow, 0), (q + 1, J, J_pow, -q), (2 * q + 1, J, J_pow, 0)]
    for row, family, powers, target in picks:
        r = _dominant_radius(family, powers, target)
        if r != 1.0:
            v, g = invariant_gradients(xy, C, radius=r)
            vals[row], G[row] = v[row], g[row]
    return vals, G


def casimir_gradients(xy: XYCoords):
    vals, G = extreme_gradients(xy)
    q = xy.n // 2
    I, J = vals[: q + 1], vals[q + 1 :]
    gI, gJ = G[: q + 1], G[q + 1 :]
    Iq, Jq = I[-1], J[-1]
    out = {
        # d log of each Casimir times its value
        "E_n": (gJ[-1] / Jq - 2 * gI[-1] / Iq),
        "O_n": (gI[-1] / Iq - 2 * gJ[-1] / Jq),
    }
    if xy.n % 2 == 0:
        out["E_half"] = gI[0] / I[0] - gI[-1] / Iq
        out["O_half"] = gJ[0] / J[0] - gJ[-1] / Jq
    inv = invariants(xy)
    values = casimir_map(inv)
    return {k: out[k] * values[k] for k in out}


def casimir_check(xy: XYCoords) -> dict:
    P = poisson_matrix(xy.n)
    grads = casimir_gradients(xy)
    residual = max(float(np.abs(P.matrix @ g).max() / max(np.abs(g).max(), 1e-300)) for g in grads.values())
    rows = np.array([g / np.linalg.norm(g) for g in grads.values()])
    rank = _rank(rows, 1e-8)
    return {"residual": residual, "independent_casimirs": rank, "kernel_dimension": P.kernel_dimension()}


def leaf_constraints(xy: XYCoords) -> np.ndarray:
    _, G = extreme_gradients(xy)
    q = xy.n // 2
    rows = [G[q], G[-1]]  # I_q, J_q
    if xy.n % 2 == 0:
        rows += [G[0], G[q + 1]]  # I_0, J_0
    return np.array(rows)


def leaf_frame(xy: XYCoords) -> np.ndarray:
    """Columns span the common kernel of the leaf-constraint differentials."""
    G = leaf_constraints(xy)
    _, s, vh = np.linalg.svd(G)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    if rank < G.shape[0]:
        raise NonGeneric("leaf constraints are dependent at this point")
    return vh[rank:].conj().T


def _rank(M, rel=RANK_TOL):
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rel * s[0])) if s.size and s[0] > 0 else 0


def onleaf_inverse_check(xy: XYCoords) -> dict:
    n = xy.n
    P = poisson_matrix(n).matrix
    A = omega0_matrix(n).matrix
    F = leaf_frame(xy)
    on_leaf = P @ A @ F - F
    return {
        "residual": float(np.abs(on_leaf).max()),
        "PAP_minus_P": float(np.abs(P @ A @ P - P).max()),
        "rank_P": _rank(P),
        "rank_A_on_leaf": _rank(F.T @ A @ F),
        "rank_A": _rank(A),
        "two_g": 2 * genus_for(n),
    }


def bracket_invariance_check(xy: XYCoords, map_fn=pentagram_xy_arrays) -> float:
    Jl = log_jacobian(xy, map_fn)
    P = poisson_matrix(xy.n).matrix
    return float(np.abs(Jl @ P @ Jl.T - P).max())


def omega_invariance_check(xy: XYCoords, map_fn=pentagram_xy_arrays) -> dict:
    """Pullback of the 2-form by the map compared with itself on leaf vectors."""
    Jl = log_jacobian(xy, map_fn)
    A = omega0_matrix(xy.n).matrix
    F = leaf_frame(xy)
    D = Jl.T @ A @ Jl - A
    return {
        "residual": float(np.abs(F.T @ D @ F).max()),
        "unprojected": float(np.abs(D).max()),
    }
