"""Finite-gap closed subsets of the real line.

A set ``E`` is stored through its complementary gaps ``J_j = (a_j, b_j)``;
everything outside the gaps belongs to ``E``, so the two outermost islands
are unbounded.  The ``window`` is only a working interval used for sampling,
approximation grids and plotting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class GeometryError(ValueError):
    """Malformed gap list (overlap, disorder, gap outside the window)."""


@dataclass(frozen=True)
class GeometryReport:
    c1: float
    c2: float
    c5: float
    min_separation_ratio: float
    c_tilde: float
    tilde_disjoint: bool
    valid: bool
    threshold_c1: float = 10.0
    threshold_c2: float = 10.0

    def as_lines(self):
        return [f"{k}={v}" for k, v in self.__dict__.items()]


def _c2_and_sep(a, b):
    n = len(a)
    if n < 2:
        return 0.0, math.inf
    lengths = b - a
    # distance between gaps k and j, zero on the diagonal
    dist = np.maximum(a[None, :] - b[:, None], a[:, None] - b[None, :])
    np.fill_diagonal(dist, np.inf)
    if np.any(dist <= 0):
        return math.inf, 0.0
    ratios = (lengths[None, :] / dist) ** 2
    c2 = float(ratios.sum(axis=1).max())
    sep = float((dist.min(axis=1) / lengths).min())
    return c2, sep


def default_c_tilde(c5):
    return 0.4 * min(1.0, c5 / 2.0)


@dataclass(frozen=True)
class RealLineSet:
    """Closed set ``R \\ U_j (a_j, b_j)`` with a working window.

    Parameters
    ----------
    gaps : sequence of (a, b)
        Open complementary intervals, strictly ordered and pairwise disjoint.
    window : (lo, hi)
        Working interval containing every gap strictly inside.
    c_tilde : float, optional
        Inflation constant of the enlarged gaps.  Defaults to
        ``0.4 * min(1, c5 / 2)``.
    """

    gaps: tuple
    window: tuple
    c_tilde: float = None
    _a: np.ndarray = field(init=False, repr=False, compare=False)
    _b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        gaps = tuple((float(a), float(b)) for a, b in self.gaps)
        lo, hi = (float(v) for v in self.window)
        if not lo < hi:
            raise GeometryError(f"empty window [{lo}, {hi}]")
        for j, (a, b) in enumerate(gaps):
            if not a < b:
                raise GeometryError(f"gap {j} = ({a}, {b}) is empty")
            if not (lo < a and b < hi):
                raise GeometryError(f"gap {j} = ({a}, {b}) not strictly inside window")
            if j and not gaps[j - 1][1] < a:
                raise GeometryError(
                    f"gaps {j - 1} and {j} overlap or are out of order: "
                    f"{gaps[j - 1]} vs {(a, b)}"
                )
        object.__setattr__(self, "gaps", gaps)
        object.__setattr__(self, "window", (lo, hi))
        a = np.array([g[0] for g in gaps])
        b = np.array([g[1] for g in gaps])
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "_b", b)
        if self.c_tilde is None:
            _, c5 = self._c2_c5()
            object.__setattr__(self, "c_tilde", default_c_tilde(c5))
        elif not self.c_tilde > 0:
            raise GeometryError("c_tilde must be positive")

    # -- basic accessors -------------------------------------------------
    @property
    def a(self):
        return self._a

    @property
    def b(self):
        return self._b

    @property
    def lengths(self):
        return self._b - self._a

    @property
    def n_gaps(self):
        return len(self.gaps)

    def _c2_c5(self):
        c2, _ = _c2_and_sep(self._a, self._b)
        c5 = math.inf if c2 == 0 else c2 ** -0.5
        return c2, c5

    def with_c_tilde(self, c_tilde):
        return RealLineSet(self.gaps, self.window, c_tilde)

    def with_window(self, window):
        return RealLineSet(self.gaps, window, self.c_tilde)

    def islands(self):
        """Components of ``E`` clipped to the window."""
        edges = [self.window[0], *np.ravel(self.gaps), self.window[1]]
        return [(edges[2 * i], edges[2 * i + 1]) for i in range(self.n_gaps + 1)]

    def gap_index(self, x):
        """Index of the gap containing ``x`` (open interval), else -1."""
        x = np.asarray(x, dtype=float)
        j = np.searchsorted(self._a, x, side="right") - 1
        jj = np.clip(j, 0, max(self.n_gaps - 1, 0))
        if self.n_gaps == 0:
            return np.full(x.shape, -1)
        inside = (j >= 0) & (x > self._a[jj]) & (x < self._b[jj])
        return np.where(inside, jj, -1)

    def contains(self, x, tol=1e-12):
        """Membership in ``E``; points within ``tol`` of a gap endpoint count as in ``E``."""
        x = np.asarray(x, dtype=float)
        if self.n_gaps == 0:
            return np.ones(x.shape, dtype=bool)
        j = np.clip(np.searchsorted(self._a, x, side="right") - 1, 0, self.n_gaps - 1)
        inside = (x > self._a[j] + tol) & (x < self._b[j] - tol)
        return ~inside

    def project(self, x):
        """Move points lying in a gap to the nearest gap endpoint."""
        x = np.array(x, dtype=float)
        j = self.gap_index(x)
        m = j >= 0
        if np.any(m):
            a, b = self._a[j[m]], self._b[j[m]]
            xm = x[m]
            x[m] = np.where(xm - a < b - xm, a, b)
        return x

    def tilde_intervals(self):
        mid = 0.5 * (self._a + self._b)
        half = 0.5 * (1 + self.c_tilde) * self.lengths
        return mid - half, mid + half

    def grid(self, n, lo=None, hi=None):
        """Uniform grid on ``E`` within ``[lo, hi]`` plus all gap endpoints there."""
        lo = self.window[0] if lo is None else lo
        hi = self.window[1] if hi is None else hi
        x = np.linspace(lo, hi, n)
        ends = np.concatenate([self._a, self._b])
        ends = ends[(ends >= lo) & (ends <= hi)]
        x = np.union1d(x[self.contains(x, tol=0.0)], ends)
        return x


def validate_geometry(E, threshold_c1=10.0, threshold_c2=10.0):
    """Realized gap-geometry constants of ``E``.

    ``c1`` is the largest gap length and ``c2`` the largest of the sums
    ``sum_{k != j} (|J_k| / d(J_k, J_j))**2``.  The separation consequence
    ``d(J_j, E* \\ J_j) >= c5 |J_j|`` with ``c5 = c2**-0.5`` is recomputed
    directly and must hold.
    """
    if E.n_gaps == 0:
        return GeometryReport(0.0, 0.0, math.inf, math.inf, E.c_tilde, True, True,
                              threshold_c1, threshold_c2)
    c1 = float(E.lengths.max())
    c2, sep = _c2_and_sep(E.a, E.b)
    c5 = math.inf if c2 == 0 else c2 ** -0.5
    if sep < c5 * (1 - 1e-12):
        raise AssertionError(f"separation {sep} below c5 = {c5}")
    lo, hi = E.tilde_intervals()
    tilde_disjoint = bool(np.all(hi[:-1] < lo[1:]))
    legal_c = E.c_tilde < min(1.0, c5 / 2)
    valid = c1 <= threshold_c1 and c2 <= threshold_c2 and tilde_disjoint and legal_c
    return GeometryReport(c1, c2, c5, sep, E.c_tilde, tilde_disjoint, bool(valid),
                          threshold_c1, threshold_c2)


def tilde_gap(E, j):
    """Open interval with the centre of gap ``j`` and length ``(1 + C)|J_j|``."""
    if not 0 <= j < E.n_gaps:
        raise IndexError(f"gap index {j} out of range for {E.n_gaps} gaps")
    a, b = E.gaps[j]
    mid, half = 0.5 * (a + b), 0.5 * (1 + E.c_tilde) * (b - a)
    return mid - half, mid + half


def _auto_window(gaps, lo, hi, margin_factor=10.0):
    if gaps:
        margin = margin_factor * max(b - a for a, b in gaps)
        return (min(lo, gaps[0][0]) - margin, max(hi, gaps[-1][1]) + margin)
    return (lo, hi)


def example1(l_range, island_len=2.0, gap_len=1.0, window=None, c_tilde=None):
    """Periodic islands ``[c_l, d_l]``, ``c_l = l (island_len + gap_len)``.

    ``l_range = (l_lo, l_hi)`` is inclusive; ``l_hi - l_lo`` gaps separate
    the islands.
    """
    l_lo, l_hi = l_range
    if l_hi < l_lo:
        raise ValueError(f"empty l_range {l_range}")
    if not (island_len > 0 and gap_len > 0):
        raise ValueError("island_len and gap_len must be positive")
    period = island_len + gap_len
    gaps = [(l * period + island_len, (l + 1) * period) for l in range(l_lo, l_hi)]
    if window is None:
        first, last = l_lo * period, l_hi * period + island_len
        window = _auto_window(gaps, first, last, 10.0)
        if not gaps:
            window = (first - 10 * gap_len, last + 10 * gap_len)
    return RealLineSet(gaps, window, c_tilde)


def example2_gaps(j_range, k_max, k_min=2):
    """Raw gap list of the two-scale set accumulating at the even integers."""
    j_lo, j_hi = j_range
    if j_hi < j_lo or k_max < k_min or k_min < 2:
        raise ValueError("need j_lo <= j_hi and 2 <= k_min <= k_max")
    gaps = []
    for j in range(j_lo, j_hi + 1):
        for k in range(k_min, k_max + 1):
            s = 2.0 ** -k
            gaps.append((2 * j + s * (1 - 1 / k), 2 * j + s))
            gaps.append((2 * j - s, 2 * j - s * (1 - 1 / k)))
    return sorted(gaps)


def example2(j_range, k_max, k_min=2, window=None, c_tilde=None):
    """Set built from :func:`example2_gaps`.

    With ``k_min = 2`` and ``k_max >= 3`` the ``k = 2`` and ``k = 3`` gaps
    share the endpoint ``2j +- 1/8`` and construction fails; use ``k_min = 3``
    for deeper truncations.
    """
    gaps = example2_gaps(j_range, k_max, k_min)
    for (a0, b0), (a1, b1) in zip(gaps, gaps[1:]):
        if not b0 < a1:
            raise GeometryError(
                f"gaps ({a0}, {b0}) and ({a1}, {b1}) touch; raise k_min to 3"
            )
    if window is None:
        window = _auto_window(gaps, gaps[0][0], gaps[-1][1], 10.0)
    return RealLineSet(gaps, window, c_tilde)


def single_gap(a=-1.0, b=1.0, window=None, c_tilde=None):
    if window is None:
        window = _auto_window([(a, b)], a, b, 10.0)
    return RealLineSet([(a, b)], window, c_tilde)


def gap_free(lo=-5.0, hi=5.0):
    return RealLineSet([], (lo, hi), 0.4)


FOUR_GAP = ((-1.0, -0.875), (-0.5, -0.25), (0.25, 0.3125), (0.75, 1.0))


def four_gap(scale=1.0, c_tilde=None):
    """Fixed heterogeneous 4-gap set with gap lengths 1/16 .. 1/4 (times ``scale``)."""
    gaps = [(scale * a, scale * b) for a, b in FOUR_GAP]
    return RealLineSet(gaps, _auto_window(gaps, gaps[0][0], gaps[-1][1]), c_tilde)


# -- set description files -------------------------------------------------

def read_set(path):
    """Parse ``window lo hi`` header plus one ``a b`` line per gap.

    An optional ``c_tilde C`` line sets the inflation constant; ``#`` starts
    a comment.
    """
    window, c_tilde, gaps = None, None, []
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "window":
                window = (float(parts[1]), float(parts[2]))
            elif parts[0] == "c_tilde":
                c_tilde = float(parts[1])
            elif len(parts) == 2:
                gaps.append((float(parts[0]), float(parts[1])))
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise GeometryError(f"{path}:{n}: cannot parse {raw!r}") from None
    if window is None:
        raise GeometryError(f"{path}: missing 'window lo hi' header")
    return RealLineSet(gaps, window, c_tilde)


def write_set(E, path, include_c_tilde=True):
    lines = [f"window {E.window[0]!r} {E.window[1]!r}"]
    if include_c_tilde:
        lines.append(f"c_tilde {E.c_tilde!r}")
    lines += [f"{a!r} {b!r}" for a, b in E.gaps]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_set_source(spec):
    """Build a set from ``name:v1,v2,...``, ``name:key=value,...`` or a file path.

    Generators (positional order): ``single:a,b``, ``gapfree:lo,hi``,
    ``four-gap:scale``, ``example1:l_lo,l_hi,island,gap``,
    ``example2:j_lo,j_hi,k_max,k_min``.  A ``c_tilde=<v>`` key is accepted
    by every generator; ``file:<path>`` or a bare path reads a set file.
    """
    name, _, args = spec.partition(":")
    if name == "file":
        return read_set(args)
    if name not in ("single", "gapfree", "four-gap", "example1", "example2"):
        return read_set(spec)
    order = {"single": ("a", "b"), "gapfree": ("lo", "hi"), "four-gap": ("scale",),
             "example1": ("l_lo", "l_hi", "island", "gap"),
             "example2": ("j_lo", "j_hi", "k_max", "k_min")}[name]
    kw = {}
    for pos, item in enumerate(filter(None, args.split(","))):
        k, sep, v = item.partition("=")
        if not sep:
            if pos >= len(order):
                raise ValueError(f"too many values in {spec!r}")
            k, v = order[pos], k
        kw[k.strip()] = float(v)
    c = kw.pop("c_tilde", None)
    if name == "single":
        return single_gap(kw.get("a", -1.0), kw.get("b", 1.0), c_tilde=c)
    if name == "gapfree":
        return gap_free(kw.get("lo", -5.0), kw.get("hi", 5.0))
    if name == "four-gap":
        return four_gap(kw.get("scale", 1.0), c_tilde=c)
    if name == "example1":
        return example1((int(kw.get("l_lo", -3)), int(kw.get("l_hi", 3))),
                        kw.get("island", 2.0), kw.get("gap", 1.0), c_tilde=c)
    return example2((int(kw.get("j_lo", 0)), int(kw.get("j_hi", 0))),
                    int(kw.get("k_max", 2)), int(kw.get("k_min", 2)), c_tilde=c)
