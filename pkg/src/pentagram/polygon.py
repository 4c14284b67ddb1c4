"""Twisted polygons in the complex projective plane.

A twisted n-gon is stored by its n base vertices (homogeneous 3-vectors) and a
monodromy M with det M = 1, so that vertex k+n is M applied to vertex k.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .coords import ABCoords, XYCoords, ab_to_xy, principal_cbrt
from .errors import (
    DegenerateChain,
    DegenerateDiagonal,
    DegenerateIntersection,
    DegenerateLine,
    InconsistentLift,
    IndivisibilityViolated,
    MapUndefined,
)

GENERIC_TOL = 1e-9
INCIDENCE_TOL = 1e-12
EQUAL_TOL = 1e-9


def _unit(v):
    return v / np.linalg.norm(v)


def _proportional(h1, h2, tol):
    """All 2x2 minors of [h1 h2] vanish, relative to the vector norms."""
    return np.linalg.norm(np.cross(h1, h2)) <= tol * np.linalg.norm(h1) * np.linalg.norm(h2)


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=complex).reshape(3)
        if not np.any(h):
            raise ValueError("homogeneous coordinates cannot all vanish")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return _proportional(self.h, other.h, EQUAL_TOL)

    __hash__ = None

    def affine(self):
        """(X/W, Y/W) in the chart W = 1."""
        return self.h[:2] / self.h[2]


@dataclass(frozen=True, eq=False)
class ProjectiveLine:
    """A line as the covector annihilating its points."""

    h: np.ndarray

    def __post_init__(self):
        h = np.array(self.h, dtype=complex).reshape(3)
        if not np.any(h):
            raise ValueError("line covector cannot vanish")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    def __eq__(self, other):
        if not isinstance(other, ProjectiveLine):
            return NotImplemented
        return _proportional(self.h, other.h, EQUAL_TOL)

    __hash__ = None

    def contains(self, p: ProjectivePoint, tol=1e-10):
        return abs(self.h @ p.h) <= tol * np.linalg.norm(self.h) * np.linalg.norm(p.h)


def line_through(p: ProjectivePoint, q: ProjectivePoint) -> ProjectiveLine:
    h = np.cross(p.h, q.h)
    if np.linalg.norm(h) <= INCIDENCE_TOL * np.linalg.norm(p.h) * np.linalg.norm(q.h):
        raise DegenerateLine("points coincide")
    return ProjectiveLine(h)


def intersect(l1: ProjectiveLine, l2: ProjectiveLine) -> ProjectivePoint:
    h = np.cross(l1.h, l2.h)
    if np.linalg.norm(h) <= INCIDENCE_TOL * np.linalg.norm(l1.h) * np.linalg.norm(l2.h):
        raise DegenerateIntersection("lines coincide")
    return ProjectivePoint(h)


def normalize_monodromy(M) -> np.ndarray:
    """Rescale M to determinant 1 using the principal cube root of det M."""
    M = np.array(M, dtype=complex).reshape(3, 3)
    d = np.linalg.det(M)
    if abs(d) < 1e-14 * np.abs(M).max() ** 3:
        raise DegenerateChain("monodromy is singular")
    return M / principal_cbrt(d)


class VertexChain:
    """n base vertices plus a monodromy matrix; immutable."""

    def __init__(self, vertices, monodromy=None):
        V = np.array(
            [v.h if isinstance(v, ProjectivePoint) else v for v in vertices], dtype=complex
        )
        if V.ndim != 2 or V.shape[1] != 3:
            raise ValueError("vertices must be homogeneous 3-vectors")
        if V.shape[0] < 4:
            raise ValueError("a twisted polygon needs n >= 4")
        M = np.eye(3, dtype=complex) if monodromy is None else normalize_monodromy(monodromy)
        V.setflags(write=False)
        M.setflags(write=False)
        self._V = V
        self._M = M
        self._Minv = np.linalg.inv(M)

    @classmethod
    def from_plane_points(cls, xy_points):
        """Closed polygon from affine points (X, Y); identity monodromy."""
        P = np.asarray(xy_points, dtype=complex)
        return cls(np.column_stack([P, np.ones(len(P))]), np.eye(3))

    @property
    def n(self):
        return self._V.shape[0]

    @property
    def vectors(self) -> np.ndarray:
        return self._V

    @property
    def vertices(self):
        return [ProjectivePoint(v) for v in self._V]

    @property
    def monodromy(self) -> np.ndarray:
        return self._M

    def vector(self, k: int) -> np.ndarray:
        """Homogeneous vector of vertex k for any integer k, via the monodromy."""
        cycles, r = divmod(k, self.n)
        v = self._V[r]
        step = self._M if cycles > 0 else self._Minv
        for _ in range(abs(cycles)):
            v = step @ v
        return v

    def point(self, k: int) -> ProjectivePoint:
        return ProjectivePoint(self.vector(k))

    def transformed(self, g) -> "VertexChain":
        """Image under a projective transformation g: vertices g v, monodromy g M g^-1."""
        g = np.asarray(g, dtype=complex)
        return VertexChain(self._V @ g.T, g @ self._M @ np.linalg.inv(g))

    def genericity_margins(self) -> np.ndarray:
        """|det| of three consecutive unit-normalized vertices, for j = 0..n-1."""
        U = [_unit(self.vector(k)) for k in range(self.n + 2)]
        return np.array([abs(np.linalg.det(np.column_stack(U[j : j + 3]))) for j in range(self.n)])

    def is_generic(self, tol=GENERIC_TOL):
        return bool(np.all(self.genericity_margins() > tol))

    def validity_issues(self):
        if not (np.all(np.isfinite(self.vectors)) and np.all(np.isfinite(self.monodromy))):
            return ["vertex or monodromy entries are not finite"]
        m = self.genericity_margins()
        return [f"vertices {j}, {j + 1}, {j + 2} are collinear" for j in np.flatnonzero(m <= GENERIC_TOL)]

    def __repr__(self):
        return f"VertexChain(n={self.n})"


@dataclass(frozen=True, eq=False)
class NormalizedLift:
    V: np.ndarray
    monodromy: np.ndarray

    @property
    def n(self):
        return self.V.shape[0]

    def vector(self, k):
        cycles, r = divmod(k, self.n)
        return np.linalg.matrix_power(self.monodromy, cycles) @ self.V[r]

    def determinants(self):
        """det(V_j, V_{j+1}, V_{j+2}) for j = 0..n-1 (wrap-around through M)."""
        W = [self.vector(k) for k in range(self.n + 2)]
        return np.array([np.linalg.det(np.column_stack(W[j : j + 3])) for j in range(self.n)])


def _consecutive_dets(chain: VertexChain):
    W = [chain.vector(k) for k in range(chain.n + 2)]
    return np.array([np.linalg.det(np.column_stack(W[j : j + 3])) for j in range(chain.n)])


def _circulant3(n):
    C = np.zeros((n, n))
    for j in range(n):
        for t in range(3):
            C[j, (j + t) % n] += 1
    return C


def lift_normalized(chain: VertexChain) -> NormalizedLift:
    """Rescale vertices so every three consecutive ones have determinant 1.

    Scalings s_j solve s_j s_{j+1} s_{j+2} = 1 / d_j cyclically. Any solution
    times a cube root of unity is another one; the representative with
    arg(s_0) in [0, 2 pi / 3) is returned.
    """
    n = chain.n
    if n % 3 == 0:
        raise IndivisibilityViolated(f"n={n} is divisible by 3")
    if not chain.is_generic():
        raise DegenerateChain("three consecutive vertices are collinear")
    d = _consecutive_dets(chain)
    s = np.exp(np.linalg.solve(_circulant3(n), -np.log(d)))
    arg0 = cmath.phase(s[0])
    # window shifted by a hair so that s_0 = 1 up to roundoff is kept as is
    k = int(np.floor((arg0 + 1e-9) / (2 * np.pi / 3)))
    s = s * cmath.exp(-2j * np.pi * k / 3)
    V = chain.vectors * s[:, None]
    V.setflags(write=False)
    return NormalizedLift(V, chain.monodromy)


def _recurrence_coefficients(vec, n):
    """Solve V_{j+3} = a_j V_{j+2} + b_j V_{j+1} + c_j V_j for j = 0..n-1."""
    W = [vec(k) for k in range(n + 3)]
    coef = np.empty((n, 3), complex)
    for j in range(n):
        A = np.column_stack([W[j + 2], W[j + 1], W[j]])
        coef[j] = np.linalg.solve(A, W[j + 3])
    return coef


def ab_from_chain(chain: VertexChain, tol=1e-8) -> ABCoords:
    lift = lift_normalized(chain)
    coef = _recurrence_coefficients(lift.vector, chain.n)
    dev = np.abs(coef[:, 2] - 1).max()
    if dev > tol:
        raise InconsistentLift(f"coefficient of V_j deviates from 1 by {dev:.3g}")
    return ABCoords(coef[:, 0], coef[:, 1])


def chain_from_ab(ab: ABCoords, check: bool = True) -> VertexChain:
    n = ab.n
    if n % 3 == 0:
        raise IndivisibilityViolated(f"n={n} is divisible by 3")
    V = [np.eye(3, dtype=complex)[:, k] for k in range(3)]
    for j in range(n):
        V.append(ab.a[j] * V[j + 2] + ab.b[j] * V[j + 1] + V[j])
    M = np.column_stack(V[n : n + 3])
    chain = VertexChain(np.array(V[:n]), M)
    if check and not chain.is_generic():
        raise DegenerateChain("recurrence produced collinear consecutive vertices")
    return chain


def pentagram_step_geometric(chain: VertexChain) -> VertexChain:
    """Vertex i of the image is the meet of diagonals (i-1, i+1) and (i, i+2)."""
    new = []
    for i in range(chain.n):
        try:
            d1 = line_through(chain.point(i - 1), chain.point(i + 1))
            d2 = line_through(chain.point(i), chain.point(i + 2))
        except DegenerateLine as exc:
            raise DegenerateDiagonal(f"diagonal through vertex {i} is degenerate") from exc
        try:
            new.append(intersect(d1, d2).h)
        except DegenerateIntersection as exc:
            raise MapUndefined(f"diagonals at vertex {i} coincide") from exc
    image = VertexChain(np.array(new), chain.monodromy)
    if not image.is_generic():
        raise MapUndefined("image polygon has three collinear consecutive vertices")
    return image


def xy_from_chain(chain: VertexChain) -> XYCoords:
    """Corner coordinates (x, y) of a chain, for any n.

    Uses the raw vertex vectors as a lift, reads off the general recurrence
    V_{j+3} = a_j V_{j+2} + b_j V_{j+1} + c_j V_j, rescales one step so the
    product condition of the (x, y) gauge holds, and gauge-reduces.
    """
    from .lax import gauge_reduce_params

    if not chain.is_generic():
        raise DegenerateChain("three consecutive vertices are collinear")
    n = chain.n
    U = np.array([_unit(v) for v in chain.vectors])
    scaled = VertexChain(U, chain.monodromy)
    coef = _recurrence_coefficients(scaled.vector, n)
    a, b, c = (coef[:, k].copy() for k in range(3))
    d = np.ones(n, complex)
    e = np.ones(n, complex)
    mu = np.prod(a) / ((-1) ** n * np.prod(b * e))
    for arr in (a, b, c, d, e):
        arr[0] *= mu
    xy, _ = gauge_reduce_params(a, b, c, d, e, "xy")
    return xy


def chain_coordinates(chain: VertexChain):
    """(a, b) when n is not divisible by 3, otherwise (x, y)."""
    return ab_from_chain(chain) if chain.n % 3 else xy_from_chain(chain)


def projectively_equivalent(c1: VertexChain, c2: VertexChain, tol=1e-8):
    """Return (equivalent, shift) with x2_i = x1_{i+shift}, y2_i = y1_{i+shift}."""
    if c1.n != c2.n:
        return False, None
    p, r = xy_from_chain(c1), xy_from_chain(c2)
    scale = 1 + max(np.abs(p.x).max(), np.abs(p.y).max())
    for s in range(c1.n):
        dx = np.abs(np.roll(p.x, -s) - r.x).max()
        dy = np.abs(np.roll(p.y, -s) - r.y).max()
        if max(dx, dy) <= tol * scale:
            return True, s
    return False, None


def xy_via_ab(chain: VertexChain) -> XYCoords:
    """Reference route for n not divisible by 3."""
    return ab_to_xy(ab_from_chain(chain))
