"""Graded Gauss quadrature for integrands with inverse square-root endpoints."""
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


@lru_cache(maxsize=None)
def gauss_jacobi_half(n):
    """Nodes/weights on [-1, 1] for the weight ``(1 + t)**-0.5``."""
    return roots_jacobi(n, 0.0, -0.5)


@lru_cache(maxsize=None)
def gauss_legendre(n):
    return roots_legendre(n)


def csqrt_upper(w):
    """Square root continued from the upper half-plane.

    Negative reals are treated as limits from above, so ``-0.0`` imaginary
    parts never flip the branch.
    """
    w = np.asarray(w, dtype=complex)
    return np.sqrt(w.real + 1j * np.abs(w.imag))


def graded_integral(f, p, z, clearance, order=32):
    """Integrate ``f`` along straight segments from ``p`` to ``z`` (vectorized).

    ``f`` may have a ``(zeta - p)**-0.5`` singularity at ``p``; every other
    singularity must be at least ``clearance`` away from ``p`` and no closer
    to any point of the segment than ``p`` is.  The first piece, of length
    ``min(|z - p|, clearance / 2)``, uses Gauss-Jacobi; the remaining pieces
    double in length so each stays one piece-length away from the nearest
    singularity, which keeps Gauss-Legendre geometrically convergent.

    Parameters
    ----------
    f : callable
        Vectorized complex integrand.
    p, z : array_like
        Start points (real prevertices) and end points, broadcast together.
    clearance : array_like
        Distance from ``p`` to the nearest other singularity.
    """
    p, z, clearance = np.broadcast_arrays(
        np.asarray(p, dtype=complex), np.asarray(z, dtype=complex),
        np.asarray(clearance, dtype=float))
    shape = p.shape
    p, z, clearance = p.ravel(), z.ravel(), clearance.ravel()
    out = np.zeros(p.shape, dtype=complex)
    length = np.abs(z - p)
    live = length > 0
    if not np.any(live):
        return out.reshape(shape)
    p, z, clearance, length = p[live], z[live], clearance[live], length[live]
    e = (z - p) / length
    h0 = np.minimum(length, 0.5 * clearance)

    tj, wj = gauss_jacobi_half(order)
    r = 0.5 * h0[:, None] * (1 + tj[None, :])
    zeta = p[:, None] + e[:, None] * r
    F = f(zeta) * csqrt_upper(zeta - p[:, None])
    acc = csqrt_upper(e) * np.sqrt(0.5 * h0) * (F @ wj)

    tl, wl = gauss_legendre(order)
    lo = h0.copy()
    while True:
        act = lo < length
        if not np.any(act):
            break
        lo_a = lo[act]
        hi_a = np.minimum(2 * lo_a, length[act])
        r = lo_a[:, None] + 0.5 * (hi_a - lo_a)[:, None] * (1 + tl[None, :])
        zeta = p[act, None] + e[act, None] * r
        acc[act] += e[act] * 0.5 * (hi_a - lo_a) * (f(zeta) @ wl)
        lo[act] = hi_a
    out[live] = acc
    return out.reshape(shape)
