"""Simultaneous polynomial root finding (Aberth-Ehrlich iteration)."""
from __future__ import annotations

import numpy as np

MAX_ITER = 500
REL_TOL = 1e-13


def _initial_guesses(coeffs):
    """Starting points on circles whose radii follow the Newton polygon of |coeffs|.

    ``coeffs`` is highest degree first. For each edge of the upper convex hull
    of (k, log|c_k|) the matching number of starting points is placed on a
    circle of the radius implied by the edge slope.
    """
    d = len(coeffs) - 1
    low_first = np.abs(coeffs[::-1])
    pts = [(k, np.log(m)) for k, m in enumerate(low_first) if m > 0]
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    guesses = []
    offset = 0.4
    for (k1, y1), (k2, y2) in zip(hull, hull[1:]):
        count = k2 - k1
        radius = np.exp((y1 - y2) / count)
        angles = 2 * np.pi * np.arange(count) / count + offset + 2 * np.pi * k1 / d
        guesses.extend(radius * np.exp(1j * angles))
    return np.array(guesses, dtype=complex)


def aberth(coeffs, max_iter=MAX_ITER, tol=REL_TOL):
    """All roots of sum coeffs[k] z^(d-k) (numpy.polyval ordering).

    Leading and trailing zero coefficients are stripped; each trailing zero
    contributes a root at 0. Returns (roots, converged).
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    if not np.all(np.isfinite(c)):
        raise ValueError("polynomial coefficients must be finite")
    if c.size == 0:
        raise ValueError("zero polynomial")
    zeros_at_origin = len(c) - len(np.trim_zeros(c, "b"))
    c = np.trim_zeros(c, "b")
    d = len(c) - 1
    if d == 0:
        return np.zeros(zeros_at_origin, complex), True
    c = c / c[0]
    dc = np.polyder(c)
    abs_c = np.abs(c)
    z = _initial_guesses(c)
    active = np.ones(d, bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        p = np.polyval(c, z[idx])
        dp = np.polyval(dc, z[idx])
        ratio = np.divide(p, dp, out=np.zeros_like(p), where=dp != 0)
        diff = z[idx, None] - z[None, :]
        diff[np.arange(idx.size), idx] = 1  # exclude self
        repulsion = np.sum(1 / diff, axis=1) - 1  # subtract the self term 1/1
        step = ratio / (1 - ratio * repulsion)
        step[~np.isfinite(step)] = 0
        z[idx] -= step
        # stop on a small step or once |p| is at the roundoff level of its evaluation
        noise = 8 * np.finfo(float).eps * np.polyval(abs_c, np.abs(z[idx]))
        done = (np.abs(step) <= tol * np.maximum(np.abs(z[idx]), 1e-300)) | (np.abs(p) <= noise)
        active[idx[done]] = False
    roots = np.concatenate([z, np.zeros(zeros_at_origin, complex)])
    return roots, not active.any()


def cluster_roots(roots, rel=1e-7):
    """Group roots closer than rel times their size; returns [(center, multiplicity)].

    The test is relative so that distinct roots of small modulus are not merged.
    """
    remaining = list(np.asarray(roots, dtype=complex))
    clusters = []
    while remaining:
        r = remaining.pop(0)
        members = [r]
        keep = []
        for s in remaining:
            if abs(s - r) <= rel * max(abs(r), abs(s), 1e-300):
                members.append(s)
            else:
                keep.append(s)
        remaining = keep
        clusters.append((complex(np.mean(members)), len(members)))
    return clusters
