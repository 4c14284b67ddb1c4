"""Forward-mode differentiation with vector-valued dual numbers.

A Dual carries a value array of any shape and a derivative array with one
extra trailing axis (one slot per independent variable).
"""
from __future__ import annotations

import numpy as np


class Dual:
    __slots__ = ("val", "der")
    __array_priority__ = 1000  # make numpy defer to our reflected operators

    def __init__(self, val, der):
        self.val = np.asarray(val, dtype=complex)
        self.der = np.asarray(der, dtype=complex)

    @classmethod
    def constant(cls, val, nvars):
        val = np.asarray(val, dtype=complex)
        return cls(val, np.zeros(val.shape + (nvars,), complex))

    @classmethod
    def variables(cls, val, offset, nvars):
        """Independent variables val[i] occupying slots offset + i."""
        val = np.asarray(val, dtype=complex)
        der = np.zeros(val.shape + (nvars,), complex)
        der[np.arange(val.size), offset + np.arange(val.size)] = 1
        return cls(val, der)

    @property
    def nvars(self):
        return self.der.shape[-1]

    @property
    def shape(self):
        return self.val.shape

    def __len__(self):
        return len(self.val)

    def _lift(self, other):
        if isinstance(other, Dual):
            return other
        return Dual.constant(other, self.nvars)

    def __getitem__(self, idx):
        return Dual(self.val[idx], self.der[idx])

    def __add__(self, other):
        o = self._lift(other)
        return Dual(self.val + o.val, self.der + o.der)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return Dual(self.val * o.val, self.der * o.val[..., None] + o.der * self.val[..., None])

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1 / self.val
        return Dual(inv, -self.der * (inv**2)[..., None])

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, k: int):
        return Dual(self.val**k, k * self.der * (self.val ** (k - 1))[..., None])

    def __matmul__(self, other):
        o = self._lift(other)
        val = self.val @ o.val
        der = np.einsum("ij,jkm->ikm", self.val, o.der) + np.einsum("ijm,jk->ikm", self.der, o.val)
        return Dual(val, der)

    def sum(self):
        return Dual(self.val.sum(), self.der.reshape(-1, self.nvars).sum(axis=0))

    def prod(self):
        out = Dual.constant(1.0, self.nvars)
        for k in range(self.val.size):
            out = out * self[np.unravel_index(k, self.shape)]
        return out

    def exp(self):
        e = np.exp(self.val)
        return Dual(e, self.der * e[..., None])

    def __repr__(self):
        return f"Dual(val={self.val!r}, nvars={self.nvars})"


def stack_matrix(entries, nvars):
    """3x3 Dual matrix from a nested list of Dual scalars or constants."""
    val = np.zeros((3, 3), complex)
    der = np.zeros((3, 3, nvars), complex)
    for r, row in enumerate(entries):
        for s, e in enumerate(row):
            if isinstance(e, Dual):
                val[r, s] = e.val
                der[r, s] = e.der
            else:
                val[r, s] = e
    return Dual(val, der)
