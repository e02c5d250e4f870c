"""Approximation by entire functions of exponential type.

Two routes bracket the best error ``A_sigma(f, E)``:

* :func:`kernel_approximant` convolves the gap-linear extension of ``f``
  with ``sigma K(sigma t)``, ``K(t) = C (sin t / t)**100``.  The result is
  of exponential type ``100 sigma`` and its error is an upper bound for
  ``A_{100 sigma}``.
* :func:`minimax_approx` computes a near-best uniform fit from the
  shifted-sinc space of type ``sigma`` on a grid of ``E`` with Lawson's
  iteratively reweighted least squares.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.signal import fftconvolve

from .realset import RealLineSet

log = logging.getLogger(__name__)

KERNEL_POWER = 100


class WindowError(ValueError):
    """Kernel or basis support does not fit inside the working window."""


class ConditioningError(np.linalg.LinAlgError):
    pass


# -- gap-linear extension ---------------------------------------------------

def extend_linear(f, E: RealLineSet):
    """Extend ``f`` from ``E`` to ``R``, linearly on every gap.

    The extension never exceeds the sup-norm of ``f`` on ``E``: each gap
    value is a convex combination of ``f(a_j)`` and ``f(b_j)``.
    """
    fa = np.asarray(f(E.a)) if E.n_gaps else np.empty(0)
    fb = np.asarray(f(E.b)) if E.n_gaps else np.empty(0)

    def ext(x):
        x = np.asarray(x, dtype=float)
        j = E.gap_index(x)
        out_gap = j >= 0
        vals = np.empty(x.shape, dtype=np.result_type(fa, fb, float))
        on_e = ~out_gap
        if np.any(on_e):
            vals[on_e] = f(x[on_e])
        if np.any(out_gap):
            jj = j[out_gap]
            lam = (x[out_gap] - E.a[jj]) / E.lengths[jj]
            vals[out_gap] = (1 - lam) * fa[jj] + lam * fb[jj]
        return vals

    return ext


# -- kernel ---------------------------------------------------------------

def _sinc_pow(t, n=KERNEL_POWER):
    # np.sinc(x) = sin(pi x) / (pi x)
    return np.sinc(np.asarray(t, float) / np.pi) ** n


@lru_cache(maxsize=None)
def kernel_constant():
    """``1 / int_R (sin t / t)**100 dt`` by adaptive quadrature."""
    # (sin t / t)**100 < 3**-100 beyond t = 3
    half, _ = quad(lambda t: float(_sinc_pow(t)), 0.0, 3.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return 1.0 / (2 * half)


def sinc_power_integral_exact(n):
    """Exact ``int_R (sin t / t)**n dt / pi`` as a rational number."""
    total = sum((-1) ** k * math.comb(n, k) * (n - 2 * k) ** (n - 1)
                for k in range(n // 2 + 1) if n - 2 * k > 0)
    return Fraction(total, 2 ** (n - 1) * math.factorial(n - 1))


def kernel_value(t):
    """``K(t) = C (sin t / t)**100``, normalized to unit integral."""
    return kernel_constant() * _sinc_pow(t)


@lru_cache(maxsize=None)
def kernel_cutoff(rel=1e-12):
    """Smallest ``U`` with ``K(t) < rel K(0)`` for all ``|t| >= U``."""
    return brentq(lambda t: _sinc_pow(t) - rel, 0.1, 3.0)


def kernel_tail_mass(u):
    """``int_{|t| > u} K(t) dt``."""
    u = abs(float(u))
    if u >= 3.0:
        return 0.0
    tail, _ = quad(lambda t: float(kernel_value(t)), u, 3.0, epsabs=1e-300, epsrel=1e-10, limit=200)
    return 2 * tail


@dataclass(frozen=True)
class KernelApproximant:
    """``g(x) = int f_ext(t) sigma K(sigma (x - t)) dt`` by the trapezoid rule.

    Nodes sit at ``x - m h`` with ``sigma h = pi / 2000`` (``steps_per_pi``
    per ``pi / sigma``), truncated where ``K < 1e-12 K(0)``.
    """

    sigma: float
    f_ext: object = field(repr=False)
    window: tuple
    steps_per_pi: int = 2000

    @property
    def type_bound(self):
        return KERNEL_POWER * self.sigma

    @property
    def h(self):
        return np.pi / (self.steps_per_pi * self.sigma)

    def weights(self):
        du = np.pi / self.steps_per_pi
        M = int(np.ceil(kernel_cutoff() / du))
        m = np.arange(-M, M + 1)
        return m, du * kernel_value(m * du)

    def __call__(self, x, chunk=256):
        x = np.atleast_1d(np.asarray(x, float))
        m, w = self.weights()
        out = np.empty(x.shape, dtype=complex)
        for s in range(0, len(x), chunk):
            xs = x[s:s + chunk]
            vals = self.f_ext(xs[:, None] - m[None, :] * self.h)
            out[s:s + chunk] = vals @ w
        return out.real if np.isrealobj(self.f_ext(x[:1])) else out

    def on_uniform_grid(self, lo, hi):
        """Grid ``lo + k h`` covering ``[lo, hi]`` and ``g`` there (FFT convolution)."""
        m, w = self.weights()
        M = m[-1]
        n = int(np.floor((hi - lo) / self.h)) + 1
        t = lo + (np.arange(-M, n + M)) * self.h
        vals = self.f_ext(t)
        g = fftconvolve(vals, w, mode="valid")
        return lo + np.arange(n) * self.h, g


def core_window(E, inset=0.2):
    lo, hi = E.window
    pad = inset * (hi - lo)
    return lo + pad, hi - pad


def kernel_approximant(f, E, sigma, region=None, max_tail=1e-6):
    """Convolution approximant of type ``100 sigma``.

    ``region`` is where the approximant will be used (default: core
    window).  The kernel mass falling outside ``E.window`` from any point
    of ``region`` must stay below ``max_tail``.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    region = core_window(E) if region is None else region
    margin = min(region[0] - E.window[0], E.window[1] - region[1])
    if margin <= 0 or kernel_tail_mass(sigma * margin) > max_tail:
        raise WindowError(
            f"kernel tail outside window exceeds {max_tail:g} at sigma={sigma}")
    return KernelApproximant(float(sigma), extend_linear(f, E), E.window)


def kernel_error(approx, f, E, region=None):
    """Sup of ``|f - g|`` over ``E`` in ``region``: fine FFT grid plus gap endpoints."""
    lo, hi = core_window(E) if region is None else region
    x, g = approx.on_uniform_grid(lo, hi)
    keep = E.contains(x, 0.0)
    err = np.max(np.abs(f(x[keep]) - g[keep])) if np.any(keep) else 0.0
    ends = np.concatenate([E.a, E.b])
    ends = ends[(ends >= lo) & (ends <= hi)]
    if len(ends):
        err = max(err, float(np.max(np.abs(f(ends) - approx(ends)))))
    return float(err)


# -- shifted-sinc minimax -------------------------------------------------

@dataclass(frozen=True)
class SincApproximant:
    """``g(x) = c0 + sum_k c_k sinc(sigma x - k pi)`` (``c0`` optional)."""

    sigma: float
    ks: np.ndarray = field(repr=False)
    coef: np.ndarray = field(repr=False)
    constant: float = 0.0
    info: dict = field(default=None, repr=False, compare=False)

    @property
    def type_bound(self):
        return self.sigma

    def basis(self, x):
        x = np.asarray(x, float)
        return np.sinc(self.sigma * x[:, None] / np.pi - self.ks[None, :])

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, float))
        return self.basis(x) @ self.coef + self.constant


def sinc_indices(sigma, window, N=None):
    """Shift indices ``k`` of the basis ``sinc(sigma x - k pi)`` centred on the window."""
    lo, hi = window
    half = 0.5 * (hi - lo)
    kc = int(round(sigma * 0.5 * (lo + hi) / np.pi))
    need = int(np.ceil(sigma * (half + abs(0.5 * (lo + hi) - kc * np.pi / sigma)) / np.pi))
    N = need if N is None else int(N)
    if N < need:
        raise WindowError(f"N={N} basis does not span the window (need {need})")
    return np.arange(kc - N, kc + N + 1)


def approximation_grid(E, sigma, region=None, per_pi=40, refine=4, focus=(),
                       ladder_octaves=30, per_octave=4):
    """Points of ``E`` in ``region`` with ``per_pi`` points per ``pi / sigma``.

    Spacing shrinks by ``refine`` within ``pi / sigma`` of every gap endpoint
    and focus point, and a geometric ladder ``(pi / sigma) 2**(-k / per_octave)``
    (``ladder_octaves`` octaves) closes in on each of them, so cusps such
    as ``|x - x0|**alpha`` are resolved; the points themselves are included.
    """
    lo, hi = core_window(E) if region is None else region
    h = np.pi / (per_pi * sigma)
    x = [np.linspace(lo, hi, int(np.ceil((hi - lo) / h)) + 1)]
    hot = np.concatenate([E.a, E.b, np.asarray(focus, float)])
    hot = hot[(hot >= lo) & (hot <= hi)]
    fine = np.arange(-per_pi * refine, per_pi * refine + 1) * (h / refine)
    ladder = (np.pi / sigma) * 2.0 ** (-np.arange(ladder_octaves * per_octave + 1) / per_octave)
    ladder = np.r_[-ladder, ladder]
    for p in hot:
        x.append(p + fine)
        x.append(p + ladder)
    x.append(hot)
    x = np.unique(np.concatenate(x))
    x = x[(x >= lo) & (x <= hi)]
    return x[E.contains(x, 0.0)]


def lawson(B, y, maxiter=200, tol=1e-10, rel_gap=0.0, patience=25):
    """Discrete minimax ``min_c max_i |y_i - (B c)_i|`` by Lawson's IRLS.

    Returns the best coefficients seen, their sup error and the lower bound
    ``sqrt(sum_i w_i r_i**2)`` from the final weights (weights sum to one).
    Restarts the weights from the best residual when the sup error has not
    improved for ``patience`` iterations.
    """
    m = len(y)
    w = np.full(m, 1.0 / m)
    best = (np.inf, None, None)
    lower = 0.0
    stall = restarts = 0
    it = 0
    for it in range(1, maxiter + 1):
        coef = _weighted_lsq(B, y, w)
        r = y - B @ coef
        absr = np.abs(r)
        err = absr.max()
        lower = max(lower, math.sqrt(float(w @ absr ** 2)))
        if err < best[0] * (1 - 1e-12):
            best = (err, coef, absr)
            stall = 0
        else:
            stall += 1
        if err == 0.0:
            break
        w_new = w * absr
        w_new /= w_new.sum()
        change = np.max(np.abs(w_new - w))
        w = w_new
        if change < tol or (rel_gap and best[0] - lower <= rel_gap * best[0]):
            break
        if stall >= patience:
            w = best[2] / best[2].sum()
            stall = 0
            restarts += 1
    return best[1], best[0], lower, it, restarts


def _weighted_lsq(B, y, w):
    sw = np.sqrt(w)
    return scipy.linalg.lstsq(B * sw[:, None], y * sw, lapack_driver="gelsd",
                              check_finite=False)[0]


def basis_condition(sigma, ks, window, include_constant=True, per_pi=8):
    """Condition number of the basis sampled over the whole window.

    Shifted sincs ``pi / sigma`` apart are nearly orthogonal there, so a
    large value signals a defective basis (duplicated or crowded nodes).
    """
    lo, hi = window
    x = np.linspace(lo, hi, int(per_pi * sigma * (hi - lo) / np.pi) + len(ks) + 2)
    B = np.sinc(sigma * x[:, None] / np.pi - np.asarray(ks, float)[None, :])
    if include_constant:
        B = np.column_stack([B, np.ones(len(x))])
    s = np.linalg.svd(B, compute_uv=False)
    return s[0] / s[-1] if s[-1] > 0 else np.inf


def minimax_approx(f, E, sigma, N=None, grid=None, include_constant=True,
                   maxiter=200, tol=1e-10, rel_gap=0.0, max_cond=1e8, rcond=1e-12,
                   focus=None, ks=None, validate=160):
    """Near-best uniform approximation from the shifted-sinc space.

    On a grid confined to the core window the outer basis functions are
    numerically dependent, so the fit runs on the orthonormal range of the
    basis matrix (singular values below ``rcond`` relative dropped).

    Parameters
    ----------
    f : callable
        Target on ``E``.
    sigma : float
        Type bound; basis nodes sit ``pi / sigma`` apart and span the window.
    N : int, optional
        Basis half-width (default: smallest spanning the window).
    grid : array, optional
        Evaluation points in ``E``; default :func:`approximation_grid`.
    include_constant : bool
        Add the constant function (type 0) to the space.
    focus : sequence, optional
        Points where ``f`` may be singular; the grid is graded toward them.
        Defaults to ``f.params["x0"]`` when present.
    validate : int
        With the default grid, the error is also measured on a uniform grid
        of ``validate`` points per ``pi / sigma`` over the core window, and
        the larger value is returned.

    Returns
    -------
    (SincApproximant, float)
        The approximant and its sup error.
    """
    ks = sinc_indices(sigma, E.window, N) if ks is None else np.asarray(ks)
    cond = basis_condition(sigma, ks, E.window, include_constant)
    if cond > max_cond:
        raise ConditioningError(
            f"sinc basis condition {cond:.2e} > {max_cond:.0e}; "
            "use a larger node spacing")
    if focus is None:
        x0 = getattr(f, "params", {}).get("x0")
        focus = () if x0 is None else (float(x0),)
    x = approximation_grid(E, sigma, focus=focus) if grid is None else np.asarray(grid, float)
    if np.any(~E.contains(x)):
        raise ValueError("grid must lie in E")
    B = np.sinc(sigma * x[:, None] / np.pi - ks[None, :])
    if include_constant:
        B = np.column_stack([B, np.ones(len(x))])
    U, sv, Vt = np.linalg.svd(B, full_matrices=False)
    r = int(np.sum(sv > rcond * sv[0]))
    y = np.asarray(f(x), float)
    d, err, lower, its, restarts = lawson(U[:, :r], y, maxiter, tol, rel_gap)
    coef = Vt[:r].T @ (d / sv[:r])
    c0 = float(coef[-1]) if include_constant else 0.0
    c = coef[:-1] if include_constant else coef
    approx = SincApproximant(float(sigma), ks, c, c0)
    grid_err = err
    if grid is None:
        # the reported error covers a denser uniform grid as well
        lo, hi = core_window(E)
        xv = np.linspace(lo, hi, int(np.ceil(validate * (hi - lo) * sigma / np.pi)) + 1)
        xv = xv[E.contains(xv, 0.0)]
        err = max(err, float(np.max(np.abs(approx(xv) - f(xv)))))
    log.debug("lawson sigma=%g: err=%.4e grid=%.4e lower=%.4e its=%d restarts=%d rank=%d/%d",
              sigma, err, grid_err, lower, its, restarts, r, B.shape[1])
    info = {"lower_bound": lower, "grid_error": float(grid_err), "iterations": its,
            "restarts": restarts, "condition": cond, "rank": r, "grid_size": len(x)}
    return replace(approx, info=info), float(err)


# -- rate fitting ---------------------------------------------------------

@dataclass
class RateReport:
    sigmas: list
    errors: list
    method: str
    type_factor: float = 1.0
    slope: float = math.nan
    intercept: float = math.nan
    residual: float = math.nan
    notice: str = ""

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.sigmas, self.sigmas[1:])):
            raise ValueError("sigmas must be strictly increasing")
        if any(e < 0 for e in self.errors):
            raise ValueError("errors must be nonnegative")
        if len(self.sigmas) >= 4 and all(e > 0 for e in self.errors) and math.isnan(self.slope):
            self.slope, self.intercept, self.residual = rate_fit(self.sigmas, self.errors)

    def rows(self):
        return [(s, e, self.method) for s, e in zip(self.sigmas, self.errors)]


def rate_fit(sigmas, errors):
    """Least-squares line through ``(log sigma, log error)``.

    Returns ``(slope, intercept, rms_residual)``.
    """
    s = np.asarray(sigmas, float)
    e = np.asarray(errors, float)
    if len(s) < 4:
        raise ValueError("need at least 4 points")
    if np.any(np.diff(s) <= 0):
        raise ValueError("sigmas must be strictly increasing")
    if np.any(e <= 0):
        raise ValueError("errors must be positive")
    X, Y = np.log(s), np.log(e)
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2)))
