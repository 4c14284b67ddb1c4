"""Coordinates on the space of twisted polygons and the pentagram map in them.

Two n-periodic coordinate systems are used:

* ``ABCoords``: coefficients of the recurrence V[j+3] = a[j] V[j+2] + b[j] V[j+1] + V[j]
  satisfied by the unimodular lift of the vertices (n not divisible by 3 for
  geometric meaning; formal values are accepted for any n).
* ``XYCoords``: the local corner invariants x_i = a_{i-2} / (b_{i-2} b_{i-1}),
  y_i = -b_{i-1} / (a_{i-2} a_{i-1}); defined for every n.

In these coordinates the map is an explicit rational map.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import IndivisibilityViolated, MapUndefined, MapUndefinedAtStep, NoPreimage

# a factor counts as vanishing when |den| < DENOM_TOL * (1 + |num|)
DENOM_TOL = 1e-12
CUT_TOL = 1e-9
CUBE_ROOTS_OF_UNITY = np.exp(2j * np.pi * np.arange(3) / 3)


def _as_vector(values, n=None):
    arr = np.array(values, dtype=complex).reshape(-1)
    if n is not None and arr.shape != (n,):
        raise ValueError(f"expected {n} values, got {arr.shape[0]}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ABCoords:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _as_vector(self.a)
        b = _as_vector(self.b, a.shape[0])
        if a.shape[0] < 4:
            raise ValueError("need at least 4 vertices")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self):
        return self.a.shape[0]

    def validity_issues(self):
        """List human-readable violations of the genericity invariants."""
        issues = []
        if self.n % 3 == 0:
            issues.append(f"n={self.n} is divisible by 3; (a, b) are formal only")
        for name, arr in (("a", self.a), ("b", self.b)):
            for j in np.flatnonzero(~np.isfinite(arr)):
                issues.append(f"{name}[{j}] is not finite")
            for j in np.flatnonzero(np.abs(arr) < DENOM_TOL):
                issues.append(f"{name}[{j}] vanishes")
        lam = 1 + np.roll(self.a, -1) * self.b
        for j in np.flatnonzero(np.abs(lam) < DENOM_TOL):
            issues.append(f"1 + a[{(j + 1) % self.n}] b[{j}] vanishes")
        return issues

    def allclose(self, other, tol=1e-10):
        return (
            self.n == other.n
            and np.max(np.abs(self.a - other.a)) <= tol * (1 + np.max(np.abs(other.a)))
            and np.max(np.abs(self.b - other.b)) <= tol * (1 + np.max(np.abs(other.b)))
        )


@dataclass(frozen=True, eq=False)
class XYCoords:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _as_vector(self.x)
        y = _as_vector(self.y, x.shape[0])
        if x.shape[0] < 4:
            raise ValueError("need at least 4 vertices")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.x.shape[0]

    def validity_issues(self):
        issues = []
        for name, arr in (("x", self.x), ("y", self.y)):
            for j in np.flatnonzero(~np.isfinite(arr)):
                issues.append(f"{name}[{j}] is not finite")
            for j in np.flatnonzero(np.abs(arr) < DENOM_TOL):
                issues.append(f"{name}[{j}] vanishes")
        for j in np.flatnonzero(np.abs(1 - self.x * self.y) < DENOM_TOL):
            issues.append(f"1 - x[{j}] y[{j}] vanishes")
        return issues

    def allclose(self, other, tol=1e-10):
        return (
            self.n == other.n
            and np.max(np.abs(self.x - other.x)) <= tol * (1 + np.max(np.abs(other.x)))
            and np.max(np.abs(self.y - other.y)) <= tol * (1 + np.max(np.abs(other.y)))
        )


def ab_to_xy(ab: ABCoords) -> XYCoords:
    a, b = ab.a, ab.b
    a2, a1 = np.roll(a, 2), np.roll(a, 1)  # a_{i-2}, a_{i-1}
    b2, b1 = np.roll(b, 2), np.roll(b, 1)
    return XYCoords(a2 / (b2 * b1), -b1 / (a2 * a1))


def xy_to_ab(xy: XYCoords) -> ABCoords:
    """Invert ``ab_to_xy``.

    The preimage is unique up to (a, b) -> (w a, w^2 b) with w^3 = 1. We return the
    one for which (-1)^n prod(b) / prod(a) equals the principal cube root of
    prod(y / x); this is the branch used for the xy-kind spectral invariants,
    so both routes give identical invariants.
    """
    n = xy.n
    if n % 3 == 0:
        raise IndivisibilityViolated(f"n={n} is divisible by 3")
    if np.any(xy.x == 0) or np.any(xy.y == 0):
        raise NoPreimage("zero coordinate")
    # unknowns: alpha_j = log a_j, beta_j = log b_j
    #   log x_i    = alpha_{i-2} - beta_{i-2} - beta_{i-1}
    #   log(-y_i)  = beta_{i-1} - alpha_{i-2} - alpha_{i-1}
    K = np.zeros((2 * n, 2 * n))
    for i in range(n):
        K[i, (i - 2) % n] += 1
        K[i, n + (i - 2) % n] -= 1
        K[i, n + (i - 1) % n] -= 1
        K[n + i, n + (i - 1) % n] += 1
        K[n + i, (i - 2) % n] -= 1
        K[n + i, (i - 1) % n] -= 1
    rhs = np.concatenate([np.log(xy.x), np.log(-xy.y)])
    sol = np.linalg.solve(K.astype(complex), rhs)
    a, b = np.exp(sol[:n]), np.exp(sol[n:])

    target = principal_cbrt(np.prod(xy.y / xy.x))
    ratio = (-1) ** n * np.prod(b) / np.prod(a)
    # (w a, w^2 b) multiplies the ratio by w^n
    k = int(np.argmin([abs(ratio * w**n - target) for w in CUBE_ROOTS_OF_UNITY]))
    w = CUBE_ROOTS_OF_UNITY[k]
    ab = ABCoords(a * w, b * w**2)

    back = ab_to_xy(ab)
    if not back.allclose(xy, 1e-10):
        raise NoPreimage("multiplicative system inconsistent")
    return ab


def principal_cbrt(value):
    """Cube root with argument in (-pi/3, pi/3].

    Arguments within CUT_TOL of -pi are treated as lying on the positive side
    of the cut, so a negative real value perturbed by roundoff always gets
    the root exp(i pi/3) |value|^(1/3).
    """
    value = complex(value)
    if value == 0:
        return 0j
    r, phi = cmath.polar(value)
    if phi < -cmath.pi + CUT_TOL:
        phi += 2 * cmath.pi
    return cmath.rect(r ** (1 / 3), phi / 3)


def _m_for(n):
    if n % 3 == 1:
        return (n - 1) // 3
    if n % 3 == 2:
        return (n - 2) // 3
    raise IndivisibilityViolated(f"n={n} is divisible by 3")


def _ratio(num, den):
    if np.any(np.abs(den) < DENOM_TOL * (1 + np.abs(num))):
        raise MapUndefined("vanishing denominator in the pentagram map")
    return num / den


def pentagram_ab(ab: ABCoords) -> ABCoords:
    n = ab.n
    m = _m_for(n)
    a, b = ab.a, ab.b
    i = np.arange(n)

    def fac(k):
        # 1 + a_{k+1} b_k, vectorised over the index array k
        return 1 + a[(k + 1) % n] * b[k % n]

    na, da = np.ones(n, complex), np.ones(n, complex)
    nb, db = np.ones(n, complex), np.ones(n, complex)
    for l in range(1, m + 1):
        na *= fac(i + 3 * l + 1)
        da *= fac(i - 3 * l + 1)
        nb *= fac(i - 3 * l - 1)
        db *= fac(i + 3 * l - 1)
    if np.any(np.abs(na) < DENOM_TOL) or np.any(np.abs(nb) < DENOM_TOL):
        raise MapUndefined("image coordinate vanishes")
    new_a = a[(i + 2) % n] * _ratio(na, da)
    new_b = b[(i - 1) % n] * _ratio(nb, db)
    return ABCoords(new_a, new_b)


def pentagram_xy_arrays(x, y):
    """Pentagram map on raw arrays; works for any type supporting fancy indexing."""
    n = len(x)
    i = np.arange(n)
    w = 1 - x * y
    new_x = x * w[(i - 1) % n] / w[(i + 1) % n]
    new_y = y[(i + 1) % n] * w[(i + 2) % n] / w
    return new_x, new_y


def pentagram_xy(xy: XYCoords) -> XYCoords:
    w = 1 - xy.x * xy.y
    if np.any(np.abs(w) < DENOM_TOL):
        raise MapUndefined("1 - x_i y_i vanishes")
    new_x, new_y = pentagram_xy_arrays(xy.x, xy.y)
    if np.any(np.abs(new_x) < DENOM_TOL) or np.any(np.abs(new_y) < DENOM_TOL):
        raise MapUndefined("image coordinate vanishes")
    return XYCoords(new_x, new_y)


def pentagram(coords):
    """Apply the map in whichever coordinate system ``coords`` uses."""
    if isinstance(coords, ABCoords):
        return pentagram_ab(coords)
    if isinstance(coords, XYCoords):
        return pentagram_xy(coords)
    raise TypeError(f"unsupported coordinates {type(coords).__name__}")


def orbit(coords, steps: int, step_fn=pentagram):
    """Return [coords, T(coords), ..., T^steps(coords)].

    Raises MapUndefinedAtStep carrying the partial orbit if the map fails.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    states = [coords]
    for k in range(steps):
        try:
            states.append(step_fn(states[-1]))
        except MapUndefined as exc:
            raise MapUndefinedAtStep(k, states, exc) from exc
    return states
