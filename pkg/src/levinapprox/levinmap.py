"""Conformal map of the upper half-plane onto a half-plane with vertical slits.

For a set with gaps ``(a_j, b_j)`` the map has the Schwarz-Christoffel
derivative

    phi'(w) = s * prod_j (w - c_j) / sqrt((w - a_j)(w - b_j)),

which is real and positive on ``E`` and purely imaginary on every gap, so
each gap is sent to a vertical segment.  The segment closes (the image of
``b_j`` lands back on the base point ``u_j``) exactly when ``c_j`` balances
the upward and downward travel along the gap; those are the only unknowns.
The real affine normalization ``phi(i) = i`` is applied afterwards.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .quadrature import csqrt_upper, graded_integral
from .realset import RealLineSet

log = logging.getLogger(__name__)


class SolverError(RuntimeError):
    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


class ResolutionError(SolverError):
    """Closure residuals not reproducible at the doubled verification order."""


class MapDomainError(ValueError):
    pass


def _raw_derivative(z, a, b, c):
    """``prod_j (z - c_j) / sqrt((z - a_j)(z - b_j))`` with upper-half-plane branches."""
    z = np.asarray(z, dtype=complex)
    if len(a) == 0:
        return np.ones(z.shape, dtype=complex)
    zz = z[..., None]
    terms = (zz - c) / (csqrt_upper(zz - a) * csqrt_upper(zz - b))
    return np.prod(terms, axis=-1)


class _Prevertices:
    """Sorted prevertices ``a_1 < b_1 < a_2 < ...`` with their clearances."""

    def __init__(self, a, b):
        self.points = np.ravel(np.column_stack([a, b])) if len(a) else np.empty(0)
        p = self.points
        if len(p) > 1:
            gaps = np.diff(p)
            self.clearance = np.minimum(np.r_[np.inf, gaps], np.r_[gaps, np.inf])
        else:
            self.clearance = np.full(len(p), np.inf)

    def nearest(self, z):
        """Index of the nearest prevertex to each point of ``z``."""
        z = np.asarray(z, dtype=complex)
        i = np.clip(np.searchsorted(self.points, z.real), 1, len(self.points) - 1)
        dl = np.abs(z - self.points[i - 1])
        dr = np.abs(z - self.points[i])
        return np.where(dl <= dr, i - 1, i)


def _closure_moments(j, a, b, c, order):
    """Moments ``int w(x) dx`` and ``int x w(x) dx`` over gap ``j``.

    ``w(x) = prod_{k != j} g_k(x) / sqrt((x - a_j)(b_j - x))`` is positive on
    the gap, so the closure residual ``int (x - c_j) w(x) dx`` is affine and
    strictly increasing in ``c_j``.
    """
    aj, bj = a[j], b[j]
    others = np.r_[a[:j], a[j + 1:], b[:j], b[j + 1:]]
    ao, bo, co = np.delete(a, j), np.delete(b, j), np.delete(c, j)
    clearance = np.min(np.abs(others - aj)) if len(others) else np.inf
    clearance_b = np.min(np.abs(others - bj)) if len(others) else np.inf
    mid = 0.5 * (aj + bj)

    def weight(x):
        x = x.real
        h = np.ones(x.shape)
        if len(ao):
            xx = x[..., None]
            h = np.prod(np.abs(xx - co) / np.sqrt((xx - ao) * (xx - bo)), axis=-1)
        return h / np.sqrt(np.abs((x - aj) * (bj - x)))

    m0 = m1 = 0.0
    for p, cl in ((aj, min(clearance, bj - aj)), (bj, min(clearance_b, bj - aj))):
        m0 += abs(graded_integral(weight, p, mid, cl, order)).real
        m1 += graded_integral(lambda x: weight(x) * (x.real - mid), p, mid, cl, order).real \
            * (1 if p == aj else -1)
    return m0, m1 + mid * m0


@dataclass(frozen=True)
class LevinMap:
    """Solved slit map ``phi = scale * phi0 + offset``.

    ``phi0`` is the unnormalized integral of the raw derivative anchored at
    ``phi0(a_1) = 0``.  ``bases`` and ``heights`` describe the slits
    ``u_j + i(0, v_j]``.
    """

    E: RealLineSet
    tips: np.ndarray
    scale: float
    offset: float
    bases: np.ndarray
    heights: np.ndarray
    residuals: np.ndarray
    order: int = 32
    _pv: _Prevertices = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_pv", _Prevertices(self.E.a, self.E.b))

    @property
    def slit_tips(self):
        return self.bases + 1j * self.heights

    def derivative(self, z):
        return self.scale * _raw_derivative(z, self.E.a, self.E.b, self.tips)

    def _base_at_prevertex(self):
        # u_j belongs to both a_j and b_j
        return np.repeat(self.bases, 2)

    def _integral_from_nearest(self, z):
        pv = self._pv
        i = pv.nearest(z)
        p = pv.points[i]
        f = lambda w: _raw_derivative(w, self.E.a, self.E.b, self.tips)
        return i, self.scale * graded_integral(f, p, z, pv.clearance[i], self.order)

    def evaluate(self, z):
        """``phi(z)`` for ``z`` in the closed upper half-plane.

        Real points in a gap go to the slit at height ``|int_{a_j}^x phi'|``;
        the image of the tip preimage ``c_j`` is the slit tip.
        """
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        if np.any(z.imag < 0):
            raise MapDomainError("phi is evaluated on the closed upper half-plane only")
        if self.E.n_gaps == 0:
            out = self.scale * z + self.offset
            return out[0] if scalar else out
        i, integral = self._integral_from_nearest(z)
        base = self._base_at_prevertex()[i]
        out = base + integral
        in_gap = (z.imag == 0) & (self.E.gap_index(z.real) >= 0)
        if np.any(in_gap):
            out[in_gap] = base[in_gap] + 1j * np.abs(integral[in_gap])
        return out[0] if scalar else out

    def evaluate_real(self, x):
        """Real image ``phi(x)`` for points of ``E``."""
        x = np.asarray(x, dtype=float)
        if np.any(~self.E.contains(x)):
            raise MapDomainError("point lies inside a gap")
        return np.real(self.evaluate(x.astype(complex)))

    def rho(self, x1, x2):
        """Diameter of ``phi([x1, x2])`` (vectorized, symmetric)."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        lo, hi = np.minimum(x1, x2), np.maximum(x1, x2)
        pts = np.concatenate([np.ravel(lo), np.ravel(hi)])
        uniq, inv = np.unique(pts, return_inverse=True)
        img = self.evaluate_real(uniq)[inv]
        n = lo.size
        return self._diameter(np.ravel(lo), np.ravel(hi), img[:n], img[n:]).reshape(lo.shape)

    def _diameter(self, lo, hi, w1, w2):
        diam = np.abs(w2 - w1)
        tips = self.slit_tips
        a, b = self.E.a, self.E.b
        inside = (a[None, :] >= lo[:, None]) & (b[None, :] <= hi[:, None])
        for j in range(len(a)):
            m = inside[:, j]
            if not np.any(m):
                continue
            t = tips[j]
            diam[m] = np.maximum(diam[m], np.maximum(np.abs(t - w1[m]), np.abs(t - w2[m])))
            for k in range(j + 1, len(a)):
                mk = m & inside[:, k]
                if np.any(mk):
                    diam[mk] = np.maximum(diam[mk], abs(t - tips[k]))
        return diam

    def vertical_displacement(self, x, delta):
        """``|phi(x) - phi(x + i delta)|``."""
        x, delta = np.broadcast_arrays(np.asarray(x, float), np.asarray(delta, float))
        if np.any(delta <= 0):
            raise ValueError("delta must be positive")
        w0 = self.evaluate(x.astype(complex))
        return np.abs(self.evaluate(x + 1j * delta) - w0)

    def inverse(self, w, z0=None, tol=1e-12, maxiter=100):
        """Numerical ``psi = phi^{-1}`` by damped Newton, staying in the upper half-plane."""
        w = complex(w)
        z = complex((w - self.offset) / self.scale) if z0 is None else complex(z0)
        if z.imag <= 0:
            z = complex(z.real, max(abs(w.imag), 1e-3))
        for _ in range(maxiter):
            r = complex(self.evaluate(z)) - w
            if abs(r) < tol * max(1.0, abs(w)):
                return z
            step = r / complex(self.derivative(z))
            lam = 1.0
            while z.imag - (lam * step).imag <= 0:
                lam /= 2
            z -= lam * step
        raise SolverError(f"inverse did not converge at w={w}")

    def closure_residuals(self, order=None):
        """Relative closure defects per gap, default at four times the solve order.

        The defect is ``|Im int_{a_j}^{b_j} phi'(x) dx|`` (the vertical gap
        between where the slit starts and where it ends), divided by the
        total travel ``2 v_j``; the integral uses the full complex
        derivative, independently of the moments used by the solver.
        """
        order = 4 * self.order if order is None else order
        a, b, c = self.E.a, self.E.b, self.tips
        f = lambda w: _raw_derivative(w, a, b, c)
        pv = self._pv
        out = np.empty(len(a))
        for j in range(len(a)):
            mid = 0.5 * (a[j] + b[j])
            up = graded_integral(f, a[j], mid, pv.clearance[2 * j], order)
            down = graded_integral(f, b[j], mid, pv.clearance[2 * j + 1], order)
            out[j] = abs((up - down).imag) / (2 * _height(j, a, b, c, order))
        return out

    # -- map files -------------------------------------------------------
    def write(self, path):
        lines = [" ".join(repr(float(v)) for v in row) for row in
                 zip(self.E.a, self.E.b, self.tips, self.bases, self.heights)]
        lines.append(f"scale {float(self.scale)!r} offset {float(self.offset)!r}")
        lines.append("residuals " + " ".join(repr(float(r)) for r in self.residuals))
        lines.append(f"window {float(self.E.window[0])!r} {float(self.E.window[1])!r}")
        lines.append(f"c_tilde {float(self.E.c_tilde)!r}")
        lines.append(f"order {self.order}")
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def read(cls, path):
        gaps, tips, bases, heights = [], [], [], []
        scale = offset = None
        residuals, window, c_tilde, order = [], None, None, 32
        for line in Path(path).read_text().splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "scale":
                scale, offset = float(parts[1]), float(parts[3])
            elif parts[0] == "residuals":
                residuals = [float(v) for v in parts[1:]]
            elif parts[0] == "window":
                window = (float(parts[1]), float(parts[2]))
            elif parts[0] == "c_tilde":
                c_tilde = float(parts[1])
            elif parts[0] == "order":
                order = int(parts[1])
            else:
                a, b, c, u, v = (float(p) for p in parts)
                gaps.append((a, b))
                tips.append(c)
                bases.append(u)
                heights.append(v)
        if scale is None:
            raise ValueError(f"{path}: missing 'scale ... offset ...' line")
        if window is None:
            lo = min([g[0] for g in gaps], default=-1.0)
            hi = max([g[1] for g in gaps], default=1.0)
            span = max(hi - lo, 1.0)
            window = (lo - 10 * span, hi + 10 * span)
        E = RealLineSet(gaps, window, c_tilde)
        return cls(E, np.array(tips), scale, offset, np.array(bases), np.array(heights),
                   np.array(residuals), order)


def _height(j, a, b, c, order):
    """Unnormalized slit height ``|int phi0'|`` from the gap endpoint nearest the tip."""
    f = lambda w: _raw_derivative(w, a, b, c)
    start = a[j] if c[j] - a[j] <= b[j] - c[j] else b[j]
    pts = np.r_[a, b]
    others = pts[pts != start]
    clearance = np.min(np.abs(others - start))
    return float(abs(graded_integral(f, start, c[j], clearance, order)))


def solve_parameters(E, tol=1e-12, order=32, maxiter=200, check=True, closure_tol=1e-10):
    """Solve the slit-map parameter problem for a finite-gap set.

    Tip preimages are updated Gauss-Seidel style; for fixed neighbours each
    closure residual ``r_j(c) = c * m0 - m1`` is affine with slope
    ``m0 > 0``, so the Newton update ``c = m1 / m0`` is exact and always
    lands inside the gap.

    Raises
    ------
    SolverError
        No convergence within ``maxiter`` sweeps.
    ResolutionError
        Residuals at four times the quadrature order exceed ``closure_tol``.
    """
    a, b = E.a.copy(), E.b.copy()
    n = len(a)
    if n == 0:
        return LevinMap(E, np.empty(0), 1.0, 0.0, np.empty(0), np.empty(0), np.empty(0), order)
    c = 0.5 * (a + b)
    lengths = b - a
    for sweep in range(maxiter):
        step = 0.0
        for j in range(n):
            m0, m1 = _closure_moments(j, a, b, c, order)
            new = m1 / m0
            if not a[j] < new < b[j]:
                raise SolverError(f"tip update left gap {j}: {new}", residuals=c * 0)
            step = max(step, abs(new - c[j]) / lengths[j])
            c[j] = new
        if step < tol:
            break
    else:
        raise SolverError(f"closure iteration stalled after {maxiter} sweeps (step {step:.3e})")
    log.debug("closure converged in %d sweeps", sweep + 1)

    # unnormalized bases: phi0(a_1) = 0, islands add real travel
    f = lambda w: _raw_derivative(w, a, b, c)
    pv = _Prevertices(a, b)
    u0 = np.zeros(n)
    for j in range(n - 1):
        lo, hi = b[j], a[j + 1]
        mid = 0.5 * (lo + hi)
        left = graded_integral(f, lo, mid, pv.clearance[2 * j + 1], order)
        right = graded_integral(f, hi, mid, pv.clearance[2 * j + 2], order)
        u0[j + 1] = u0[j] + (left - right).real
    h0 = np.array([_height(j, a, b, c, order) for j in range(n)])
    raw = LevinMap(E, c, 1.0, 0.0, u0, h0, np.zeros(n), order)
    at_i = complex(raw.evaluate(1j))
    if not at_i.imag > 0:
        raise SolverError(f"unnormalized phi(i) = {at_i} not in the upper half-plane")
    s = 1.0 / at_i.imag
    t = -s * at_i.real
    m = LevinMap(E, c, s, t, s * u0 + t, s * h0, np.zeros(n), order)
    if check:
        res = m.closure_residuals()
        if np.any(res > closure_tol):
            raise ResolutionError(
                f"closure residuals {res.max():.2e} above {closure_tol:.0e}; "
                "gaps too close for the quadrature order", residuals=res)
    else:
        res = np.full(n, math.nan)
    return LevinMap(E, c, s, t, s * u0 + t, s * h0, res, order)
