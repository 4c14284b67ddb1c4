"""Laurent polynomials in the spectral parameter and 3x3 matrices over them.

A polynomial is stored as a dense coefficient array together with the exponent
of its first entry. Matrices keep one coefficient stack of shape (K, 3, 3), so
products are a short loop of numpy matmuls rather than 27 scalar convolutions.
"""
from __future__ import annotations

import numpy as np

PRUNE_REL = 1e-13


def _prune(coeffs, rel=PRUNE_REL):
    """Zero out roundoff-level coefficients; coeffs has the exponent on axis 0."""
    if coeffs.size == 0:
        return coeffs
    mags = np.abs(coeffs)
    peak = mags.max(axis=0, keepdims=True)
    coeffs = np.where(mags < rel * peak, 0, coeffs)
    return coeffs


def _trim(low, coeffs):
    if coeffs.shape[0] == 0:
        return 0, coeffs
    nz = np.flatnonzero(np.any(coeffs.reshape(coeffs.shape[0], -1) != 0, axis=1))
    if nz.size == 0:
        return 0, coeffs[:0]
    return low + int(nz[0]), coeffs[nz[0] : nz[-1] + 1]


class LaurentPoly:
    """Finite sum of c_k z^k with integer k and complex c_k."""

    __slots__ = ("low", "coeffs")

    def __init__(self, coeffs=(), low: int = 0, prune=True):
        c = np.array(coeffs, dtype=complex).reshape(-1)
        if prune:
            c = _prune(c)
        self.low, self.coeffs = _trim(int(low), c)
        self.coeffs.setflags(write=False)

    @classmethod
    def from_dict(cls, terms: dict):
        terms = {int(k): v for k, v in terms.items()}
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        c = np.zeros(hi - lo + 1, complex)
        for k, v in terms.items():
            c[k - lo] += v
        return cls(c, lo)

    @classmethod
    def monomial(cls, c, k=0):
        return cls([c], k)

    @property
    def coefficients(self) -> dict:
        return {self.low + i: complex(c) for i, c in enumerate(self.coeffs) if c != 0}

    def is_zero(self):
        return self.coeffs.size == 0

    @property
    def min_exp(self):
        return None if self.is_zero() else self.low

    @property
    def max_exp(self):
        return None if self.is_zero() else self.low + len(self.coeffs) - 1

    def coeff(self, k: int) -> complex:
        i = k - self.low
        if 0 <= i < len(self.coeffs):
            return complex(self.coeffs[i])
        return 0j

    def __call__(self, z):
        if self.is_zero():
            return 0j
        z = complex(z)
        return np.polyval(self.coeffs[::-1], z) * z**self.low

    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            return other
        return LaurentPoly([other], 0)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.low, other.low)
        hi = max(self.max_exp, other.max_exp)
        c = np.zeros(hi - lo + 1, complex)
        c[self.low - lo : self.low - lo + len(self.coeffs)] += self.coeffs
        c[other.low - lo : other.low - lo + len(other.coeffs)] += other.coeffs
        return LaurentPoly(c, lo)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(-self.coeffs, self.low, prune=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly(self.coeffs * complex(other), self.low)
        if self.is_zero() or other.is_zero():
            return LaurentPoly()
        return LaurentPoly(np.convolve(self.coeffs, other.coeffs), self.low + other.low)

    __rmul__ = __mul__

    def shift(self, k: int):
        """Multiply by z^k."""
        return LaurentPoly(self.coeffs, self.low + k, prune=False)

    def max_abs(self):
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    def __repr__(self):
        terms = " + ".join(f"({c:.6g})z^{k}" for k, c in self.coefficients.items())
        return f"LaurentPoly({terms or '0'})"


class LaurentMatrix3:
    """3x3 matrix with Laurent-polynomial entries, stored as a coefficient stack."""

    __slots__ = ("low", "coeffs")

    def __init__(self, coeffs, low: int = 0, prune=True):
        c = np.array(coeffs, dtype=complex)
        if c.ndim == 2:
            c = c[None]
        if c.shape[1:] != (3, 3):
            raise ValueError("coefficient stack must have shape (K, 3, 3)")
        if prune:
            c = _prune(c)
        self.low, self.coeffs = _trim(int(low), c)
        self.coeffs.setflags(write=False)

    @classmethod
    def from_terms(cls, terms: dict):
        """Build from {exponent: 3x3 array}."""
        lo, hi = min(terms), max(terms)
        c = np.zeros((hi - lo + 1, 3, 3), complex)
        for k, m in terms.items():
            c[k - lo] += np.asarray(m, dtype=complex)
        return cls(c, lo)

    @classmethod
    def from_entries(cls, entries):
        """Build from a 3x3 nested list of LaurentPoly or scalars."""
        polys = [[e if isinstance(e, LaurentPoly) else LaurentPoly([e]) for e in row] for row in entries]
        nonzero = [p for row in polys for p in row if not p.is_zero()]
        if not nonzero:
            return cls(np.zeros((1, 3, 3)))
        lo = min(p.min_exp for p in nonzero)
        hi = max(p.max_exp for p in nonzero)
        c = np.zeros((hi - lo + 1, 3, 3), complex)
        for r in range(3):
            for s in range(3):
                p = polys[r][s]
                if not p.is_zero():
                    c[p.low - lo : p.low - lo + len(p.coeffs), r, s] = p.coeffs
        return cls(c, lo, prune=False)

    @classmethod
    def identity(cls):
        return cls(np.eye(3))

    def is_zero(self):
        return self.coeffs.shape[0] == 0

    @property
    def min_exp(self):
        return self.low

    @property
    def max_exp(self):
        return self.low + self.coeffs.shape[0] - 1

    def coeff(self, k: int) -> np.ndarray:
        """3x3 coefficient of z^k."""
        i = k - self.low
        if 0 <= i < self.coeffs.shape[0]:
            return np.array(self.coeffs[i])
        return np.zeros((3, 3), complex)

    def entry(self, r: int, s: int) -> LaurentPoly:
        if self.is_zero():
            return LaurentPoly()
        return LaurentPoly(self.coeffs[:, r, s], self.low, prune=False)

    @property
    def entries(self):
        return [[self.entry(r, s) for s in range(3)] for r in range(3)]

    def __call__(self, z) -> np.ndarray:
        z = complex(z)
        if self.is_zero():
            return np.zeros((3, 3), complex)
        powers = z ** np.arange(self.low, self.low + self.coeffs.shape[0])
        return np.tensordot(powers, self.coeffs, axes=1)

    evaluate = __call__

    def __matmul__(self, other: "LaurentMatrix3"):
        if self.is_zero() or other.is_zero():
            return LaurentMatrix3(np.zeros((1, 3, 3)))
        ka, kb = self.coeffs.shape[0], other.coeffs.shape[0]
        out = np.zeros((ka + kb - 1, 3, 3), complex)
        for i in range(ka):
            out[i : i + kb] += self.coeffs[i] @ other.coeffs
        return LaurentMatrix3(out, self.low + other.low)

    def _aligned(self, other):
        lo = min(self.low, other.low)
        hi = max(self.max_exp, other.max_exp)
        a = np.zeros((hi - lo + 1, 3, 3), complex)
        b = np.zeros_like(a)
        a[self.low - lo : self.low - lo + self.coeffs.shape[0]] = self.coeffs
        b[other.low - lo : other.low - lo + other.coeffs.shape[0]] = other.coeffs
        return lo, a, b

    def __add__(self, other):
        lo, a, b = self._aligned(other)
        return LaurentMatrix3(a + b, lo)

    def __sub__(self, other):
        lo, a, b = self._aligned(other)
        return LaurentMatrix3(a - b, lo)

    def __mul__(self, scalar):
        if isinstance(scalar, LaurentPoly):
            if scalar.is_zero() or self.is_zero():
                return LaurentMatrix3(np.zeros((0, 3, 3), complex))
            c = np.zeros((len(scalar.coeffs) + self.coeffs.shape[0] - 1, 3, 3), complex)
            for i, s in enumerate(scalar.coeffs):
                c[i : i + self.coeffs.shape[0]] += s * self.coeffs
            return LaurentMatrix3(c, self.low + scalar.low)
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return LaurentMatrix3(self.coeffs * complex(scalar), self.low)

    __rmul__ = __mul__

    def __neg__(self):
        return LaurentMatrix3(-self.coeffs, self.low, prune=False)

    def trace(self) -> LaurentPoly:
        return LaurentPoly(np.trace(self.coeffs, axis1=1, axis2=2), self.low)

    def det(self) -> LaurentPoly:
        e = self.entries
        return (
            e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
            - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
            + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
        )

    def max_abs(self):
        return float(np.abs(self.coeffs).max()) if self.coeffs.size else 0.0

    def max_deviation(self, other) -> float:
        """Largest coefficient difference over all exponents and entries."""
        _, a, b = self._aligned(other)
        return float(np.abs(a - b).max()) if a.size else 0.0

    def __repr__(self):
        return f"LaurentMatrix3(exponents {self.low}..{self.max_exp})"


def ordered_product(mats):
    """mats[-1] @ ... @ mats[0]; the first factor acts first."""
    out = LaurentMatrix3.identity()
    for m in mats:
        out = m @ out
    return out
