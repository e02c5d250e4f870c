import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad
from scipy.optimize import linprog

from levinapprox.bandlimited import (ConditioningError, RateReport, WindowError, core_window,
                                     extend_linear, kernel_approximant, kernel_constant,
                                     kernel_cutoff, kernel_error, kernel_tail_mass, kernel_value,
                                     lawson, minimax_approx, rate_fit, sinc_indices,
                                     sinc_power_integral_exact)
from levinapprox.functions import SampledFunction, abs_pow, const, sinc_bump, tau_pow
from levinapprox.realset import RealLineSet, four_gap, gap_free, single_gap


# -- extension --------------------------------------------------------------

def test_extend_linear_examples():
    E = single_gap()
    ext = extend_linear(lambda x: np.ones_like(x), E)
    assert np.all(ext(np.linspace(-3, 3, 31)) == 1)
    ext = extend_linear(lambda x: x, E)
    x = np.linspace(-3, 3, 31)
    assert np.allclose(ext(x), x)
    ext = extend_linear(lambda x: (x > 0).astype(float), E)
    assert ext(0.0) == pytest.approx(0.5)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(0.1, 0.9))
def test_extend_linear_preserves_sup_norm(x0, alpha):
    E = four_gap()
    f = tau_pow(E, x0 if E.contains(x0) else float(E.project(x0)), alpha)
    ext = extend_linear(f, E)
    x = np.linspace(*E.window, 20001)
    assert np.max(np.abs(ext(x))) <= f.sup_norm + 1e-12
    on_E = E.grid(501)
    assert np.array_equal(ext(on_E), f(on_E))


# -- kernel -------------------------------------------------------------------

def test_kernel_constant_matches_exact_rational():
    exact = 1 / (math.pi * float(sinc_power_integral_exact(100)))
    assert kernel_constant() == pytest.approx(exact, rel=1e-12)
    # Laplace estimate (sin t / t)**n ~ exp(-n t**2 / 6)
    assert kernel_value(0.0) == pytest.approx((6 * math.pi / 100) ** -0.5, rel=0.02)


def test_sinc_power_integral_small_cases():
    # int (sin t / t) = pi, int (sin t / t)**2 = pi, int (sin t / t)**4 = 2 pi / 3
    assert sinc_power_integral_exact(1) == 1
    assert sinc_power_integral_exact(2) == 1
    assert sinc_power_integral_exact(4) == pytest.approx(2 / 3)


def test_kernel_unit_integral_independent_quadrature():
    # doubled resolution: split [0, 6] in many pieces, Gauss-Legendre on each
    t, w = np.polynomial.legendre.leggauss(64)
    edges = np.linspace(0.0, 6.0, 121)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (hi - lo) * (t + 1) + lo
        total += 0.5 * (hi - lo) * w @ kernel_value(x)
    assert 2 * total == pytest.approx(1.0, abs=1e-8)


def test_kernel_symmetry_and_zeros():
    t = np.linspace(-5, 5, 1001)
    assert np.array_equal(kernel_value(t), kernel_value(-t))
    assert np.all(kernel_value(t) >= 0)
    k = np.arange(1, 8)
    assert np.all(kernel_value(k * np.pi) < 1e-300)
    assert np.all(kernel_value(-k * np.pi) < 1e-300)


def test_kernel_cutoff_and_tail():
    U = kernel_cutoff()
    assert kernel_value(U) == pytest.approx(1e-12 * kernel_value(0.0), rel=1e-6)
    assert kernel_tail_mass(U) < 1e-12
    assert kernel_tail_mass(0.0) == pytest.approx(1.0, abs=1e-10)


def test_kernel_spectrum_is_bandlimited():
    # |K^(xi)| for |xi| > 100 is tiny relative to the peak
    h = np.pi / 800
    t = np.arange(-2 ** 17, 2 ** 17) * h
    spec = np.abs(np.fft.rfft(np.fft.ifftshift(kernel_value(t)))) * h
    xi = 2 * np.pi * np.fft.rfftfreq(len(t), h)
    assert spec[0] == pytest.approx(1.0, abs=1e-8)
    assert spec[xi > 100 * 1.01].max() < 1e-6 * spec.max()


def test_kernel_reproduces_constants():
    E = four_gap()
    for c in [1.0, -2.5]:
        g = kernel_approximant(const(E, c), E, 8.0)
        x, vals = g.on_uniform_grid(*core_window(E))
        assert np.max(np.abs(vals - c)) < 1e-6
        assert np.max(np.abs(g(np.array([0.0, 0.3])) - c)) < 1e-6


def test_kernel_kills_linear_error_at_centre():
    E = gap_free(-10, 10)
    f = SampledFunction("identity", {}, E, lambda x: x)
    g = kernel_approximant(f, E, 4.0)
    assert abs(g(np.array([0.0]))[0]) < 1e-6


def test_fft_and_direct_sums_agree():
    E = single_gap()
    f = abs_pow(E, 2.0, 0.5)
    g = kernel_approximant(f, E, 4.0)
    x, vals = g.on_uniform_grid(1.0, 3.0)
    idx = np.arange(0, len(x), max(1, len(x) // 40))
    assert np.allclose(g(x[idx]), vals[idx], atol=1e-12)


def test_kernel_approximant_norm_bound():
    E = four_gap()
    f = tau_pow(E, 0.0, 0.5)
    g = kernel_approximant(f, E, 16.0)
    _, vals = g.on_uniform_grid(*core_window(E))
    assert np.max(np.abs(vals)) <= f.sup_norm + 1e-8


def test_kernel_window_error():
    E = gap_free(-1, 1)
    with pytest.raises(WindowError):
        kernel_approximant(const(E, 1.0), E, 1.0)


def test_kernel_rate_on_gap_free_set():
    E = gap_free(-3, 3)
    f = abs_pow(E, 0.0, 0.5)
    s = [4.0, 8.0, 16.0, 32.0]
    errs = [kernel_error(kernel_approximant(f, E, x), f, E) for x in s]
    assert rate_fit(s, errs)[0] == pytest.approx(-0.5, abs=0.1)


# -- minimax -------------------------------------------------------------------

def test_lawson_matches_linear_program():
    rng = np.random.default_rng(0)
    x = np.linspace(-1, 1, 120)
    B = np.vander(x, 6, increasing=True)
    y = np.abs(x) ** 0.5 + 0.01 * rng.standard_normal(len(x))
    _, err, lower, _, _ = lawson(B, y, maxiter=3000, tol=1e-14)
    # LP: minimize t subject to -t <= y - B c <= t
    m, n = B.shape
    c = np.r_[np.zeros(n), 1.0]
    A = np.block([[-B, -np.ones((m, 1))], [B, -np.ones((m, 1))]])
    b = np.r_[-y, y]
    lp = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n + [(0, None)], method="highs")
    opt = lp.x[-1]
    assert lower <= opt * (1 + 1e-9)
    assert opt <= err * (1 + 1e-9)
    assert err == pytest.approx(opt, rel=1e-3)


def test_minimax_reproduces_basis_function():
    E = gap_free(-3, 3)
    sigma = 4.0
    f = sinc_bump(E, sigma)
    approx, err = minimax_approx(f, E, sigma)
    assert err < 1e-10
    coef = np.r_[approx.coef, approx.constant]
    unit = np.zeros_like(coef)
    unit[list(approx.ks).index(0)] = 1.0
    assert np.allclose(coef, unit, atol=1e-8)


def test_minimax_constant_in_space():
    E = four_gap()
    _, err = minimax_approx(const(E, 2.0), E, 4.0)
    assert err < 1e-12


def test_minimax_of_one_decreases_with_basis_width():
    E = gap_free(-3, 3)
    f = const(E, 1.0)
    need = len(sinc_indices(4.0, E.window)) // 2
    # nodes far outside the window are nearly dependent on it; the rank cut handles that
    errs = [minimax_approx(f, E, 4.0, N=N, include_constant=False, max_cond=np.inf)[1]
            for N in (need, 2 * need, 4 * need)]
    assert errs[0] > 1e-6
    assert errs[1] < 1e-3 * errs[0]
    assert errs[2] <= errs[1] * 1.5


def test_minimax_error_decreases_in_sigma():
    E = four_gap()
    f = tau_pow(E, 0.0, 0.5)
    errs = [minimax_approx(f, E, s)[1] for s in (4.0, 8.0, 16.0)]
    assert errs[0] > errs[1] > errs[2]


def test_minimax_certified_bracket():
    E = four_gap()
    f = tau_pow(E, 0.0, 0.5)
    approx, err = minimax_approx(f, E, 8.0)
    assert approx.info["lower_bound"] <= approx.info["grid_error"] <= err
    assert approx.info["lower_bound"] > 0.95 * err
    # an independent random check set stays within the reported error
    rng = np.random.default_rng(5)
    x = rng.uniform(*core_window(E), 20000)
    x = x[E.contains(x, 0.0)]
    assert np.max(np.abs(approx(x) - f(x))) <= err * (1 + 1e-12)


def test_minimax_conditioning_error():
    E = gap_free(-3, 3)
    ks = np.r_[sinc_indices(4.0, E.window), 0]
    with pytest.raises(ConditioningError):
        minimax_approx(const(E, 1.0), E, 4.0, ks=ks)


def test_sinc_indices_span_window():
    with pytest.raises(WindowError):
        sinc_indices(8.0, (-3, 3), N=2)
    ks = sinc_indices(8.0, (-3, 3))
    nodes = ks * np.pi / 8.0
    assert nodes.min() <= -3 and nodes.max() >= 3


# -- rate fitting ----------------------------------------------------------------

def test_rate_fit_exact_power_laws():
    s = [4.0, 8.0, 16.0, 32.0]
    slope, icpt, res = rate_fit(s, [x ** -0.5 for x in s])
    assert slope == pytest.approx(-0.5, abs=1e-12) and res < 1e-12
    slope, icpt, _ = rate_fit(s, [3 / x for x in s])
    assert slope == pytest.approx(-1.0, abs=1e-12)
    assert icpt == pytest.approx(math.log(3), abs=1e-12)


def test_rate_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        rate_fit([1, 2, 3], [1, 1, 1])
    with pytest.raises(ValueError):
        rate_fit([1, 2, 3, 4], [1, 0, 1, 1])
    with pytest.raises(ValueError):
        rate_fit([1, 3, 2, 4], [1, 1, 1, 1])


def test_rate_report():
    r = RateReport([4.0, 8.0, 16.0, 32.0], [0.5, 0.25, 0.125, 0.0625], "minimax")
    assert r.slope == pytest.approx(-1.0)
    assert r.rows()[0] == (4.0, 0.5, "minimax")
    skipped = RateReport([4.0, 8.0, 16.0, 32.0], [0, 0, 0, 0], "minimax")
    assert math.isnan(skipped.slope)
    with pytest.raises(ValueError):
        RateReport([8.0, 4.0], [1, 1], "kernel")
