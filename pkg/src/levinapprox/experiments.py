"""Experiment drivers: distance equivalence, vertical-displacement regimes and rates.

Every driver takes an :class:`ExperimentConfig` and returns a report
object that can write versioned CSV files.  Pair sampling is seeded
through :class:`numpy.random.SeedSequence` with one child stream per
sampled quantity, so a run with ``2n`` pairs contains the ``n`` pairs of
the smaller run.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .bandlimited import (RateReport, core_window, kernel_approximant, kernel_error,
                          minimax_approx, rate_fit)
from .functions import parse_function
from .levinmap import LevinMap, solve_parameters
from .realset import GeometryReport, RealLineSet, parse_set_source, validate_geometry
from .taumetric import PairPool, PowerModulus, omega_majorant, omega_star, tau

log = logging.getLogger(__name__)

CSV_VERSION = 1
STRATA = ("bulk", "endpoint", "cross")
STRATUM_SHARES = (0.4, 0.4, 0.2)


def _parse_floats(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by the experiment drivers.

    ``set`` accepts anything :func:`~levinapprox.realset.parse_set_source`
    understands (a file path or a generator such as ``four-gap``).
    """

    set: str = "four-gap"
    c_tilde: float | None = None
    order: int = 32
    seed: int = 0
    pairs: int = 1000
    m_max: int = 20
    n_bulk: int = 2000
    fn: str = "tau-pow:x0=0,alpha=0.5"
    sigmas: tuple = (4.0, 8.0, 16.0, 32.0, 64.0, 128.0)
    kernel: bool = True
    theorem3_pairs: int = 500
    gap: int = 0
    slope_tol: float = 0.15
    threshold_c1: float = 10.0
    threshold_c2: float = 10.0
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "sigmas", _parse_floats(self.sigmas))
        if self.pairs < 1 or self.theorem3_pairs < 1:
            raise ValueError("pair counts must be positive")

    @classmethod
    def from_mapping(cls, values):
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            if raw is None:
                continue
            kw[key] = _coerce(known[key].default, key, raw)
        return cls(**kw)

    @classmethod
    def read(cls, path):
        """``key = value`` lines; ``#`` starts a comment."""
        values = {}
        for n, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{n}: expected key=value")
            values[key.strip()] = value.strip()
        return cls.from_mapping(values)

    def updated(self, **overrides):
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def build_set(self) -> RealLineSet:
        E = parse_set_source(self.set)
        return E.with_c_tilde(self.c_tilde) if self.c_tilde is not None else E

    def as_lines(self):
        out = []
        for f in fields(self):
            if f.name == "out":
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(f"{x:g}" for x in v)
            out.append(f"{f.name}={v}")
        return out


def _coerce(default, key, raw):
    if not isinstance(raw, str):
        return raw
    if key in ("set", "fn", "out"):
        return raw
    if key == "sigmas":
        return _parse_floats(raw)
    if key == "kernel":
        return raw.lower() in ("1", "true", "yes", "on")
    if key == "c_tilde":
        return None if raw.lower() in ("", "none", "default") else float(raw)
    if isinstance(default, int) and not isinstance(default, bool):
        return int(raw)
    return float(raw)


# -- pair sampling ----------------------------------------------------------

def stratified_pairs(E, n, seed=0, lo=None, hi=None, m_max=20):
    """Pairs of points of ``E`` in ``[lo, hi]``: 40% bulk, 40% endpoint, 20% cross-gap.

    * bulk: first point uniform on ``E``, log-uniform separation of random sign;
    * endpoint: both points on the same side of one gap endpoint at
      distances ``|J| 2**-m`` with continuous ``m`` in ``[0, m_max]``; the
      first point uses ``[0, m_max + 2]`` and ``m > m_max`` puts it on
      the endpoint itself;
    * cross-gap: one point on each side of a gap, ``m`` in ``[-3, m_max]``.

    Points are projected onto ``E`` and clipped to the range; the rare pairs
    that collapse to a single point are dropped.  Each sampled quantity has
    its own child stream, so the first ``n`` pairs do not depend on the
    total count.

    Returns
    -------
    x1, x2 : ndarray
        With ``x1 < x2``.
    stratum : ndarray of str
    """
    lo = E.window[0] if lo is None else lo
    hi = E.window[1] if hi is None else hi
    counts = [int(round(s * n)) for s in STRATUM_SHARES[:2]]
    counts.append(n - sum(counts))
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(10)]
    span = hi - lo
    unit = float(np.min(E.lengths)) if E.n_gaps else span / 10

    isl = np.array([(max(l, lo), min(r, hi)) for l, r in E.islands() if min(r, hi) > max(l, lo)])
    cum = np.r_[0.0, np.cumsum(isl[:, 1] - isl[:, 0])]

    def uniform_on_E(u):
        t = u * cum[-1]
        i = np.clip(np.searchsorted(cum, t, side="right") - 1, 0, len(isl) - 1)
        return isl[i, 0] + (t - cum[i])

    def bulk(k, g):
        x1 = uniform_on_E(g[0].random(k))
        s = np.exp(np.log(1e-4 * unit) + g[1].random(k) * np.log(0.5 * span / (1e-4 * unit)))
        sign = np.where(g[2].random(k) < 0.5, -1.0, 1.0)
        return x1, x1 + sign * s

    def endpoint(k, g):
        j = np.minimum((g[0].random(k) * E.n_gaps).astype(int), E.n_gaps - 1)
        left = g[1].random(k) < 0.5
        L = E.lengths[j]
        e = np.where(left, E.a[j], E.b[j])
        out = np.where(left, -1.0, 1.0)

        m1 = g[2].random(k) * (m_max + 2)
        m2 = g[3].random(k) * m_max
        d1 = np.where(m1 > m_max, 0.0, L * 2.0 ** -m1)
        return e + out * d1, e + out * L * 2.0 ** -m2

    def cross(k, g):
        j = np.minimum((g[0].random(k) * E.n_gaps).astype(int), E.n_gaps - 1)
        L = E.lengths[j]
        m1 = -3 + g[1].random(k) * (m_max + 3)
        m2 = -3 + g[2].random(k) * (m_max + 3)
        return E.a[j] - L * 2.0 ** -m1, E.b[j] + L * 2.0 ** -m2

    xs1, xs2, labels = [], [], []
    plans = [(bulk, streams[0:3]), (endpoint, streams[3:7]), (cross, streams[7:10])]
    for name, k, (draw, g) in zip(STRATA, counts, plans):
        if k <= 0:
            continue
        if E.n_gaps == 0 and draw is not bulk:
            draw = bulk
        x1, x2 = draw(k, g)
        x1 = E.project(np.clip(x1, lo, hi))
        x2 = E.project(np.clip(x2, lo, hi))
        xs1.append(np.minimum(x1, x2))
        xs2.append(np.maximum(x1, x2))
        labels.append(np.full(k, name))
    x1, x2, lab = np.concatenate(xs1), np.concatenate(xs2), np.concatenate(labels)
    keep = x2 > x1
    return x1[keep], x2[keep], lab[keep]


# -- shared helpers -----------------------------------------------------------

def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows, kind, meta=()):
    """CSV with a ``# levinapprox <kind> v<version>`` header comment."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# levinapprox {kind} v{CSV_VERSION}"]
    lines += [f"# {m}" for m in meta]
    lines.append(",".join(columns))
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def _provenance(E, lmap, config):
    report = validate_geometry(E, config.threshold_c1, config.threshold_c2)
    lines = report.as_lines()
    if lmap is not None:
        res = ",".join(f"{r:.3e}" for r in lmap.residuals)
        lines.append(f"closure_residuals={res}")
        lines.append(f"order={lmap.order}")
    return report, lines


@dataclass
class Check:
    """A named pass/fail assertion with the measured value."""

    name: str
    passed: bool
    detail: str = ""

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


# -- distance equivalence -------------------------------------------------------

@dataclass
class EquivalenceReport:
    """Ratios ``rho / tau`` over sampled pairs with their empirical bracket."""

    x1: np.ndarray = field(repr=False)
    x2: np.ndarray = field(repr=False)
    stratum: np.ndarray = field(repr=False)
    tau: np.ndarray = field(repr=False)
    rho: np.ndarray = field(repr=False)
    geometry: GeometryReport = None
    provenance: list = field(default_factory=list, repr=False)
    seed: int = 0
    order: int = 32

    @property
    def ratio(self):
        return self.rho / self.tau

    @property
    def bracket(self):
        r = self.ratio
        return float(r.min()), float(r.max())

    @property
    def K(self):
        """Smallest ``K`` with every ratio in ``[1/K, K]``."""
        lo, hi = self.bracket
        return max(hi, 1.0 / lo)

    @property
    def n_pairs(self):
        return len(self.x1)

    def checks(self):
        r = self.ratio
        ok = bool(np.all(np.isfinite(r)) and np.all(r > 0))
        return [Check("theorem1.bracket_finite", ok, f"K={self.K:.6g} over {self.n_pairs} pairs")]

    def summary_lines(self):
        lo, hi = self.bracket
        out = [f"pairs={self.n_pairs}", f"order={self.order}", f"seed={self.seed}",
               f"ratio_min={lo:.6g}", f"ratio_max={hi:.6g}", f"K={self.K:.6g}"]
        for s in STRATA:
            m = self.stratum == s
            if np.any(m):
                out.append(f"K_{s}={max(self.ratio[m].max(), 1 / self.ratio[m].min()):.6g}")
        return out

    def write(self, path):
        rows = zip(self.stratum, self.x1, self.x2, self.tau, self.rho, self.ratio)
        return write_csv(path, ("stratum", "x1", "x2", "tau", "rho", "ratio"), rows,
                         "theorem1", self.provenance + self.summary_lines())


def run_theorem1(config: ExperimentConfig, E=None, lmap=None) -> EquivalenceReport:
    """Compare ``rho_E`` with ``tau_E`` over stratified pairs on the whole window."""
    E = config.build_set() if E is None else E
    lmap = solve_parameters(E, order=config.order) if lmap is None else lmap
    x1, x2, lab = stratified_pairs(E, config.pairs, config.seed, m_max=config.m_max)
    t = tau(E, x1, x2)
    r = lmap.rho(x1, x2)
    report, prov = _provenance(E, lmap, config)
    return EquivalenceReport(x1, x2, lab, t, r, report, prov, config.seed, lmap.order)


# -- vertical displacement regimes -------------------------------------------------

@dataclass
class RegimeReport:
    """Fit of ``log |phi(x + i delta) - phi(x)|`` against ``log delta``."""

    regime: str
    x: float
    deltas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    expected_slope: float = 1.0
    d: float = math.nan
    slope: float = math.nan
    intercept: float = math.nan
    residual: float = math.nan
    level: float = math.nan
    notice: str = ""

    def __post_init__(self):
        if len(self.deltas) >= 4 and np.all(self.values > 0):
            self.slope, self.intercept, self.residual = rate_fit(self.deltas, self.values)
            # geometric mean of value / delta**expected_slope
            self.level = float(np.exp(np.mean(np.log(self.values / self.deltas ** self.expected_slope))))

    def rows(self):
        return [(self.regime, self.x, d, v) for d, v in zip(self.deltas, self.values)]


@dataclass
class Lemma36Report:
    gap: int
    length: float
    regimes: list
    provenance: list = field(default_factory=list, repr=False)
    notices: list = field(default_factory=list)

    def by_regime(self, name):
        return [r for r in self.regimes if r.regime == name]

    def normalized_levels(self):
        """Regime (i) levels divided by ``(|J| / d)**0.5``."""
        out = []
        for r in self.by_regime("i"):
            out.append(r.level / math.sqrt(self.length / r.d))
        return np.array(out)

    def checks(self, slope_tol=0.05, level_tol=0.15):
        out = []
        for r in self.regimes:
            ok = abs(r.slope - r.expected_slope) <= slope_tol
            out.append(Check(f"lemma36.{r.regime}.slope(x={r.x:.6g})", ok,
                             f"slope={r.slope:.4f} expected={r.expected_slope}"))
        lv = self.normalized_levels()
        if len(lv) >= 2:
            mean = float(np.exp(np.mean(np.log(lv))))
            dev = float(np.max(np.abs(lv / mean - 1)))
            out.append(Check("lemma36.i.level", dev <= level_tol,
                             f"normalized levels {np.array2string(lv, precision=4)} "
                             f"max deviation {dev:.3f}"))
        return out

    def write(self, path):
        rows = [row for r in self.regimes for row in r.rows()]
        meta = self.provenance + [f"gap={self.gap}", f"length={self.length!r}"]
        meta += [f"fit {r.regime} x={r.x!r} slope={r.slope:.6g} level={r.level:.6g}"
                 for r in self.regimes]
        return write_csv(path, ("regime", "x", "delta", "displacement"), rows, "lemma36", meta)


def run_lemma36(config: ExperimentConfig, E=None, lmap=None, n=25) -> Lemma36Report:
    """Sweep ``delta`` in the three regimes around gap ``config.gap``.

    Regime (i) uses ``x = b_j + d`` with ``d = (C/2)|J| * {0.05, 0.2, 0.8}``
    so every ``x`` lies inside the enlarged gap, and ``delta`` in
    ``[1e-3 d, d]``.  Regime (ii) uses ``x = b_j`` and ``delta`` in
    ``[1e-4, 0.5] |J|``; regime (iii) uses ``x = b_j`` and ``delta`` in
    ``[2, 20] |J|``.
    """
    E = config.build_set() if E is None else E
    lmap = solve_parameters(E, order=config.order) if lmap is None else lmap
    _, prov = _provenance(E, lmap, config)
    if E.n_gaps == 0:
        deltas = np.geomspace(1e-4, 10, n)
        vals = lmap.vertical_displacement(np.zeros(n), deltas)
        reg = [RegimeReport(name, 0.0, deltas, vals, 1.0) for name in ("i", "ii", "iii")]
        return Lemma36Report(-1, 0.0, reg, prov, ["no gaps: phi is the identity"])
    j = config.gap
    if not 0 <= j < E.n_gaps:
        raise IndexError(f"gap index {j} out of range")
    b, L = float(E.b[j]), float(E.lengths[j])
    regimes, notices = [], []
    for frac in (0.05, 0.2, 0.8):
        d = frac * 0.5 * E.c_tilde * L
        x = b + d
        if not E.contains(x, 0.0):
            notices.append(f"regime i skipped at d={d:g}: x outside E")
            continue
        deltas = np.geomspace(1e-3 * d, d, n)
        regimes.append(RegimeReport("i", x, deltas,
                                    lmap.vertical_displacement(np.full(n, x), deltas), 1.0, d))
    deltas = np.geomspace(1e-4 * L, 0.5 * L, n)
    regimes.append(RegimeReport("ii", b, deltas,
                                lmap.vertical_displacement(np.full(n, b), deltas), 0.5, 0.0))
    deltas = np.geomspace(2 * L, 20 * L, n)
    regimes.append(RegimeReport("iii", b, deltas,
                                lmap.vertical_displacement(np.full(n, b), deltas), 1.0, 0.0))
    return Lemma36Report(j, L, regimes, prov, notices)


# -- slit geometry --------------------------------------------------------------

def slit_ratios(lmap: LevinMap):
    """``v_j / |J_j|`` per gap."""
    return lmap.heights / lmap.E.lengths


def growth_ratios(lmap: LevinMap, radii=(10.0, 100.0, 1000.0)):
    """``(|phi(iR)| + 1) / (R + 1)`` along the imaginary axis."""
    radii = np.asarray(radii, float)
    return (np.abs(lmap.evaluate(1j * radii)) + 1) / (radii + 1)


# -- rates --------------------------------------------------------------------------

@dataclass
class ModulusReport:
    """Measured ``omega*(delta)`` with its log-log slope."""

    deltas: np.ndarray
    values: np.ndarray
    dist: str
    n_pairs: int
    slope: float = math.nan
    intercept: float = math.nan
    residual: float = math.nan
    notice: str = ""

    def __post_init__(self):
        if len(self.deltas) >= 4 and np.all(self.values > 0):
            self.slope, self.intercept, self.residual = rate_fit(self.deltas, self.values)
        else:
            self.notice = "slope fit skipped: omega* vanishes"

    def rows(self):
        return list(zip(self.deltas, self.values))


@dataclass
class Theorem2Report:
    sigmas: np.ndarray
    kernel_errors: np.ndarray
    omega: np.ndarray
    f_norm: float

    @property
    def ratios(self):
        return self.kernel_errors / (self.f_norm / self.sigmas + self.omega)

    @property
    def spread(self):
        """Largest relative deviation of a ratio from their geometric mean."""
        r = self.ratios
        if np.any(r <= 0):
            return math.nan
        mean = np.exp(np.mean(np.log(r)))
        return float(np.max(np.abs(r / mean - 1)))


@dataclass
class Theorem3Report:
    A: float
    alpha: float
    f_norm: float
    ratios: np.ndarray = field(repr=False)
    ratios_doubled: np.ndarray = field(repr=False)
    notice: str = ""

    @property
    def K(self):
        return float(np.max(self.ratios))

    @property
    def K_doubled(self):
        return float(np.max(self.ratios_doubled))


@dataclass
class RatesResult:
    config: ExperimentConfig
    label: str
    approx: RateReport
    kernel: RateReport | None
    modulus: ModulusReport
    theorem2: Theorem2Report | None
    theorem3: Theorem3Report | None
    provenance: list = field(default_factory=list)
    notices: list = field(default_factory=list)

    def checks(self):
        tol = self.config.slope_tol
        out = []
        if math.isnan(self.approx.slope) or math.isnan(self.modulus.slope):
            return out
        diff = abs(-self.approx.slope - self.modulus.slope)
        out.append(Check("rates.equivalence", diff <= tol,
                         f"A_sigma slope={self.approx.slope:.4f} omega* slope={self.modulus.slope:.4f} "
                         f"|difference|={diff:.4f} tol={tol}"))
        if self.theorem2 is not None and not math.isnan(self.theorem2.spread):
            out.append(Check("rates.theorem2", self.theorem2.spread <= 0.3,
                             f"ratios {np.array2string(self.theorem2.ratios, precision=4)} "
                             f"spread={self.theorem2.spread:.3f}"))
        if self.theorem3 is not None:
            t3 = self.theorem3
            ok = np.isfinite(t3.K) and abs(t3.K_doubled / t3.K - 1) <= 0.3
            out.append(Check("rates.theorem3", bool(ok),
                             f"K={t3.K:.6g} K(2x pairs)={t3.K_doubled:.6g}"))
        return out

    def summary_lines(self):
        out = [f"function={self.label}", f"method={self.approx.method}",
               f"approx_slope={self.approx.slope:.6g}", f"omega_slope={self.modulus.slope:.6g}"]
        if self.kernel is not None:
            out.append(f"kernel_slope={self.kernel.slope:.6g} kernel_type_factor={self.kernel.type_factor:g}")
        if self.theorem3 is not None:
            t3 = self.theorem3
            out.append(f"theorem3_A={t3.A:.6g} theorem3_alpha={t3.alpha:.6g} "
                       f"theorem3_K={t3.K:.6g} theorem3_K_doubled={t3.K_doubled:.6g}")
        return out + [f"notice={n}" for n in self.notices]

    def write(self, out_dir):
        """``rates.csv``, ``omega_star.csv``, ``theorem2.csv``, ``theorem3.csv``, ``summary.txt``."""
        out_dir = Path(out_dir)
        meta = self.provenance + self.summary_lines()
        rows = self.approx.rows() + (self.kernel.rows() if self.kernel else [])
        paths = [write_csv(out_dir / "rates.csv", ("sigma", "error", "method"), rows, "rates", meta)]
        paths.append(write_csv(out_dir / "omega_star.csv", ("delta", "omega_star"),
                               self.modulus.rows(), "omega-star", meta))
        if self.theorem2 is not None:
            t2 = self.theorem2
            paths.append(write_csv(out_dir / "theorem2.csv",
                                   ("sigma", "kernel_error", "omega_star", "ratio"),
                                   zip(t2.sigmas, t2.kernel_errors, t2.omega, t2.ratios),
                                   "theorem2", meta))
        if self.theorem3 is not None:
            t3 = self.theorem3
            paths.append(write_csv(out_dir / "theorem3.csv", ("pair", "ratio"),
                                   enumerate(t3.ratios_doubled), "theorem3", meta))
        lines = self.config.as_lines() + meta + [c.line() for c in self.checks()]
        (out_dir / "summary.txt").write_text("\n".join(lines) + "\n")
        paths.append(out_dir / "summary.txt")
        return paths


def _focus_points(f):
    x0 = f.params.get("x0")
    return () if x0 is None else (float(x0),)


def measure_omega_star(f, E, lmap, deltas, config, dist="rho", region=None):
    lo, hi = core_window(E) if region is None else region
    focus = [x for x in _focus_points(f) if lo <= x <= hi]
    pool = PairPool(E, n_bulk=config.n_bulk, m_max=config.m_max, focus=focus,
                    focus_scale=0.25, lo=lo, hi=hi)
    metric = lmap.rho if dist == "rho" else (lambda a, b: tau(E, a, b))
    values = omega_star(f, metric, deltas, pool)
    return ModulusReport(np.asarray(deltas, float), values, dist, pool.n_pairs)


def measure_rates(f, E, sigmas, method="minimax"):
    """Sup errors over the core window for each ``sigma``."""
    errors = []
    for s in sigmas:
        if method == "minimax":
            _, err = minimax_approx(f, E, s, focus=_focus_points(f))
        elif method == "kernel":
            err = kernel_error(kernel_approximant(f, E, s), f, E)
        else:
            raise ValueError(f"unknown method {method!r}")
        log.info("%s sigma=%g error=%.6e", method, s, err)
        errors.append(err)
    return RateReport(list(map(float, sigmas)), errors, method,
                      type_factor=100.0 if method == "kernel" else 1.0)


def theorem3_ratios(f, E, lmap, A, alpha, n_pairs, seed, m_max=20):
    lo, hi = core_window(E)
    x1, x2, _ = stratified_pairs(E, n_pairs, seed, lo, hi, m_max)
    omega = PowerModulus(A, alpha)
    r = lmap.rho(x1, x2)
    big = np.array([omega_majorant(omega, f.sup_norm, rr) for rr in np.unique(r)])
    Om = big[np.searchsorted(np.unique(r), r)]
    return np.abs(f(x2) - f(x1)) / Om


def run_rates(config: ExperimentConfig, E=None, lmap=None) -> RatesResult:
    """Measure ``A_sigma`` decay and ``omega*`` (dist = rho) for ``config.fn``.

    ``omega*`` is evaluated at ``delta = 1 / sigma``.  A vanishing error
    sequence (constant ``f``) skips the fits and the theorem checks.
    """
    E = config.build_set() if E is None else E
    lmap = solve_parameters(E, order=config.order) if lmap is None else lmap
    _, prov = _provenance(E, lmap, config)
    f = parse_function(config.fn, E, lmap)
    sigmas = np.asarray(config.sigmas, float)
    notices = []
    approx = measure_rates(f, E, sigmas, "minimax")
    resolution = 1e-12 * (1.0 + f.sup_norm)
    if max(approx.errors) <= resolution:
        notices.append("A_sigma vanishes at every sigma: slope fits skipped")
        approx = RateReport(approx.sigmas, [0.0] * len(sigmas), "minimax",
                            notice="errors below resolution")
    deltas = np.sort(1.0 / sigmas)
    modulus = measure_omega_star(f, E, lmap, deltas, config)
    kernel = theorem2 = theorem3 = None
    if config.kernel:
        kernel = measure_rates(f, E, sigmas, "kernel")
        om = modulus.values[np.searchsorted(deltas, 1.0 / sigmas)]
        theorem2 = Theorem2Report(sigmas, np.asarray(kernel.errors), om, f.sup_norm)
    if not math.isnan(approx.slope):
        alpha = -approx.slope
        note = ""
        if not 0 < alpha < 1:
            note = f"fitted exponent {alpha:.4f} clipped into (0, 1)"
            notices.append(note)
            alpha = min(max(alpha, 0.01), 0.99)
        A = float(np.max(np.asarray(approx.errors) * sigmas ** alpha))
        n = config.theorem3_pairs
        seed = config.seed + 1
        r1 = theorem3_ratios(f, E, lmap, A, alpha, n, seed, config.m_max)
        r2 = theorem3_ratios(f, E, lmap, A, alpha, 2 * n, seed, config.m_max)
        theorem3 = Theorem3Report(A, alpha, f.sup_norm, r1, r2, note)
    return RatesResult(config, f.label, approx, kernel, modulus, theorem2, theorem3, prov, notices)
