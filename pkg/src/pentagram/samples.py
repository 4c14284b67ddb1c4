"""Seeded random polygons.

Every generator draws from numpy's PCG64 bit generator seeded by
``SeedSequence(seed, spawn_key=(index,))``, so polygon ``index`` of a given
seed is reproducible on its own and independent of the others.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .coords import ABCoords, XYCoords
from .errors import DegeneracyError, GenerationFailed, IndivisibilityViolated, UnsupportedN
from .polygon import VertexChain, xy_from_chain

MAX_ATTEMPTS = 100
SPREAD = 0.3
# sampled chains must stay this far from collinear triples and from 1 - x y = 0
CHAIN_MARGIN = 1e-2


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def regular_chain(n: int) -> VertexChain:
    t = 2 * np.pi * np.arange(n) / n
    return VertexChain(np.column_stack([np.cos(t), np.sin(t), np.ones(n)]))


def _complex_noise(rng, n, spread):
    return np.exp(spread * (rng.standard_normal(n) + 1j * rng.standard_normal(n)))


def _well_conditioned(chain: VertexChain) -> VertexChain:
    if chain.genericity_margins().min() < CHAIN_MARGIN:
        raise DegeneracyError("three consecutive vertices are nearly collinear")
    xy = xy_from_chain(chain)
    if np.abs(1 - xy.x * xy.y).min() < CHAIN_MARGIN:
        raise DegeneracyError("the polygon is close to the singular set of the map")
    return chain


def _retry(build, rng):
    last = None
    for _ in range(MAX_ATTEMPTS):
        try:
            out = build(rng)
        except DegeneracyError as exc:
            last = exc
            continue
        issues = out.validity_issues()
        if not issues:
            return out
        last = issues
    raise GenerationFailed(f"no generic sample after {MAX_ATTEMPTS} attempts: {last}")


def random_xy(n: int, seed: int, index: int = 0, spread: float = SPREAD) -> XYCoords:
    """Complex (x, y) scattered multiplicatively around x = 1, y = -1.

    Keeping |x| and |y| near one keeps the monodromy entries and the
    invariants of moderate size, so the spectral computations stay well
    conditioned for every n.
    """

    def build(rng):
        xy = XYCoords(_complex_noise(rng, n, spread), -_complex_noise(rng, n, spread))
        if np.any(np.abs(1 - xy.x * xy.y) < 1e-6):
            raise DegeneracyError("1 - x y too small")
        return xy

    return _retry(build, rng_for(seed, index))


def random_ab(n: int, seed: int, index: int = 0, spread: float = SPREAD) -> ABCoords:
    """Complex (a, b) scattered multiplicatively around a = b = 1."""
    if n % 3 == 0:
        raise IndivisibilityViolated("(a, b) coordinates need n not divisible by 3")

    def build(rng):
        return ABCoords(_complex_noise(rng, n, spread), _complex_noise(rng, n, spread))

    return _retry(build, rng_for(seed, index))


def random_twisted_chain(n: int, seed: int, index: int = 0, twist: float = 0.3) -> VertexChain:
    """n points uniform in the unit disk with monodromy exp(twist * X).

    X is a random real traceless 3x3 matrix with standard normal entries.
    """

    def build(rng):
        r = np.sqrt(rng.uniform(size=n))
        t = rng.uniform(0, 2 * np.pi, size=n)
        X = rng.standard_normal((3, 3))
        X -= np.trace(X) / 3 * np.eye(3)
        return _well_conditioned(
            VertexChain(np.column_stack([r * np.cos(t), r * np.sin(t), np.ones(n)]), expm(twist * X))
        )

    return _retry(build, rng_for(seed, index))


def random_closed_chain(n: int, seed: int, index: int = 0) -> VertexChain:
    """n points uniform in the unit disk, joined in order, identity monodromy.

    Closed quadrilaterals are excluded: the map is undefined on them.
    """
    if n < 5:
        raise UnsupportedN("closed polygons need n >= 5")

    def build(rng):
        r = np.sqrt(rng.uniform(size=n))
        t = rng.uniform(0, 2 * np.pi, size=n)
        return _well_conditioned(VertexChain(np.column_stack([r * np.cos(t), r * np.sin(t), np.ones(n)])))

    return _retry(build, rng_for(seed, index))
