"""Explicit gap-aware distance and modulus-of-continuity tools."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .realset import RealLineSet


class DomainError(ValueError):
    """Point outside ``E`` (strictly inside a gap)."""


def tau(E: RealLineSet, x1, x2, tol=1e-12):
    """Piecewise distance with a square-root layer at gap endpoints.

    For ``x1 < x2`` both in the same enlarged gap ``J~_j`` with
    ``d = d([x1, x2], J_j)``:

    * ``x2 - x1 < d``: ``sqrt(|J_j| / d) * (x2 - x1)``
    * ``d <= x2 - x1 <= C |J_j| / 2``: ``sqrt(|J_j| (x2 - x1))``

    and ``x2 - x1`` otherwise.  Cases are tried in that order.  Vectorized and
    symmetric in its arguments.
    """
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    if not (np.all(E.contains(x1, tol)) and np.all(E.contains(x2, tol))):
        raise DomainError("tau is defined on E only")
    lo, hi = np.minimum(x1, x2), np.maximum(x1, x2)
    diff = hi - lo
    out = diff.copy()
    if E.n_gaps == 0:
        return out
    t_lo, t_hi = E.tilde_intervals()
    j = np.clip(np.searchsorted(t_lo, lo, side="right") - 1, 0, E.n_gaps - 1)
    same = (lo > t_lo[j]) & (lo < t_hi[j]) & (hi > t_lo[j]) & (hi < t_hi[j])
    if not np.any(same):
        return out
    a, b, L = E.a[j], E.b[j], E.lengths[j]
    d = np.where(hi <= a, a - hi, np.where(lo >= b, lo - b, 0.0))
    case1 = same & (diff < d)
    case2 = same & ~case1 & (d <= diff) & (diff <= 0.5 * E.c_tilde * L)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(case1, np.sqrt(L) * diff / np.sqrt(d), out)
    out = np.where(case2, np.sqrt(L * diff), out)
    return out


def euclidean(x1, x2):
    return np.abs(np.asarray(x2, float) - np.asarray(x1, float))


# -- moduli ---------------------------------------------------------------

@dataclass(frozen=True)
class PowerModulus:
    """``omega(delta) = A * delta**alpha`` with ``0 < alpha < 1``."""

    A: float
    alpha: float

    def __post_init__(self):
        if not (self.A > 0 and 0 < self.alpha < 1):
            raise ValueError("need A > 0 and 0 < alpha < 1")

    def __call__(self, delta):
        return self.A * np.asarray(delta, float) ** self.alpha

    def tail_integral(self, delta):
        """Closed form of ``int_delta^1 omega(t) / t**2 dt``."""
        return self.A * (delta ** (self.alpha - 1) - 1) / (1 - self.alpha)


@dataclass(frozen=True)
class TabulatedModulus:
    """Piecewise-linear modulus through nondecreasing samples (``omega(0) = 0``)."""

    deltas: tuple
    values: tuple

    def __post_init__(self):
        d = np.asarray(self.deltas, float)
        v = np.asarray(self.values, float)
        if d.ndim != 1 or d.shape != v.shape or np.any(d <= 0) or np.any(np.diff(d) <= 0):
            raise ValueError("deltas must be positive and strictly increasing")
        if np.any(np.diff(v) < 0) or np.any(v < 0):
            raise ValueError("values must be nonnegative and nondecreasing")
        object.__setattr__(self, "deltas", tuple(d))
        object.__setattr__(self, "values", tuple(v))

    def __call__(self, delta):
        d = np.r_[0.0, self.deltas]
        v = np.r_[0.0, self.values]
        delta = np.asarray(delta, float)
        # linear growth past the last sample keeps the doubling condition
        beyond = v[-1] * delta / d[-1]
        return np.where(delta <= d[-1], np.interp(delta, d, v), beyond)


def check_doubling(omega, deltas=None, ts=None):
    """Largest ``omega(t delta) / (2 t omega(delta))`` over sampled ``t > 1``; must be <= 1."""
    deltas = np.geomspace(1e-6, 10, 60) if deltas is None else np.asarray(deltas, float)
    ts = np.geomspace(1.01, 1e3, 40) if ts is None else np.asarray(ts, float)
    D, T = np.meshgrid(deltas, ts)
    base = omega(D)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(base > 0, omega(T * D) / (2 * T * base), 0.0)
    return float(np.max(r))


def omega_majorant(omega, f_norm, delta, rtol=1e-8):
    """``Omega(delta) = delta (||f|| + int_delta^1 omega(t) / t**2 dt)`` for ``delta <= 1/2``.

    Constant ``Omega(1/2)`` beyond ``1/2``.  The integral is computed by
    adaptive quadrature.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    delta = min(float(delta), 0.5)
    integral, _ = quad(lambda t: float(omega(t)) / t ** 2, delta, 1.0,
                       epsrel=rtol, epsabs=0.0, limit=200)
    return delta * (f_norm + integral)


# -- empirical omega* -------------------------------------------------------

class PairPool:
    """Shared pool of point pairs on ``E`` used for every ``delta``.

    Points: a uniform bulk grid on ``E`` inside ``[lo, hi]``, geometric
    ladders ``|J_j| 2**(-m / per_octave)`` on the ``E`` side of every gap
    endpoint, and the same ladders (scaled by ``focus_scale``) on both sides
    of each focus point.  Pairs: every pair of ladder points plus each bulk
    point with its sorted neighbours up to separation ``max_sep``.
    """

    def __init__(self, E, n_bulk=2000, m_max=20, per_octave=4, focus=(),
                 focus_scale=1.0, max_sep=None, lo=None, hi=None):
        self.E = E
        lo = E.window[0] if lo is None else lo
        hi = E.window[1] if hi is None else hi
        bulk = E.grid(n_bulk, lo, hi)
        steps = 2.0 ** (-np.arange(m_max * per_octave + 1) / per_octave)
        ladders = []
        for a, b, L in zip(E.a, E.b, E.lengths):
            ladders += [a, b, a - L * steps, b + L * steps]
        for x0 in focus:
            ladders += [np.array([x0]), x0 - focus_scale * steps, x0 + focus_scale * steps]
        special = np.concatenate([np.atleast_1d(v) for v in ladders]) if ladders else np.empty(0)
        special = special[(special >= lo) & (special <= hi) & E.contains(special, 0.0)]
        special = np.unique(special)
        pts = np.union1d(bulk, special)
        if len(pts) < 2:
            raise ValueError("empty sample pool")
        self.points = pts
        spacing = (hi - lo) / max(n_bulk - 1, 1)
        max_sep = 0.25 * (hi - lo) if max_sep is None else max_sep
        k_max = max(1, int(np.ceil(max_sep / spacing)))
        i_list, k_list = [], []
        n = len(pts)
        for k in range(1, min(k_max, n - 1) + 1):
            i = np.arange(n - k)
            keep = pts[i + k] - pts[i] <= max_sep
            i_list.append(i[keep])
            k_list.append(i[keep] + k)
        sidx = np.searchsorted(pts, special)
        ii, kk = np.triu_indices(len(sidx), 1)
        i_list.append(sidx[ii])
        k_list.append(sidx[kk])
        pairs = np.unique(np.column_stack([np.concatenate(i_list), np.concatenate(k_list)]), axis=0)
        self.i, self.k = pairs[:, 0], pairs[:, 1]

    @property
    def n_pairs(self):
        return len(self.i)

    def profile(self, f, dist):
        """Sorted pair distances and running max of ``|f(x2) - f(x1)|``."""
        fx = np.asarray(f(self.points), dtype=complex)
        dx = np.asarray(dist(self.points[self.i], self.points[self.k]), float)
        jump = np.abs(fx[self.k] - fx[self.i])
        order = np.argsort(dx, kind="stable")
        return dx[order], np.maximum.accumulate(jump[order])


def omega_star(f, dist, deltas, pool):
    """Lower estimate of ``sup {|f(x2) - f(x1)| : dist(x1, x2) <= delta}``.

    Nondecreasing in ``delta`` because every ``delta`` sees the same pairs.
    """
    d_sorted, running = pool.profile(f, dist)
    deltas = np.asarray(deltas, float)
    if np.any(deltas <= 0):
        raise ValueError("deltas must be positive")
    idx = np.searchsorted(d_sorted, deltas, side="right") - 1
    return np.where(idx >= 0, running[np.maximum(idx, 0)], 0.0)
