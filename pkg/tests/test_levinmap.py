import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from levinapprox.experiments import growth_ratios, slit_ratios
from levinapprox.levinmap import LevinMap, MapDomainError, ResolutionError, solve_parameters
from levinapprox.realset import RealLineSet, example1, four_gap, gap_free, single_gap


def closed_form(z):
    """Single-gap map ``sqrt((z**2 - 1) / 2)`` with the branch positive on ``x > 1``."""
    z = np.asarray(z, dtype=complex)
    return np.sqrt(z - 1) * np.sqrt(z + 1) / np.sqrt(2)


@pytest.fixture(scope="module")
def single():
    return solve_parameters(single_gap())


@pytest.fixture(scope="module")
def six():
    return solve_parameters(example1((-3, 3)))


def test_single_gap_parameters(single):
    assert abs(single.tips[0]) < 1e-10
    assert single.heights[0] == pytest.approx(2 ** -0.5, abs=1e-8)
    assert abs(single.bases[0]) < 1e-10
    assert single.evaluate(2.0) == pytest.approx(np.sqrt(1.5), abs=1e-12)
    assert single.evaluate(1j) == pytest.approx(1j, abs=1e-12)
    assert single.evaluate(0.0) == pytest.approx(1j / np.sqrt(2), abs=1e-12)


def test_single_gap_matches_closed_form(single):
    rng = np.random.default_rng(1)
    z = rng.uniform(-10, 10, 200) + 1j * 10 ** rng.uniform(-3, 1, 200)
    assert np.max(np.abs(single.evaluate(z) - closed_form(z))) < 1e-10
    x = np.r_[np.linspace(-10, -1, 50), np.linspace(1, 10, 50)]
    assert np.max(np.abs(single.evaluate(x) - closed_form(x))) < 1e-10


def test_single_gap_boundary_values_on_slit(single):
    # both one-sided limits on the gap sit at height sqrt((1 - x**2) / 2)
    x = np.linspace(-0.99, 0.99, 21)
    assert np.allclose(single.evaluate(x), 1j * np.sqrt((1 - x ** 2) / 2), atol=1e-11)


def test_mirror_symmetry():
    E = RealLineSet([(-3, -1), (1, 3)], (-40, 40))
    m = solve_parameters(E)
    assert m.tips[1] == pytest.approx(-m.tips[0], abs=1e-9)
    assert m.heights[0] == pytest.approx(m.heights[1], rel=1e-10)
    assert m.bases[1] == pytest.approx(-m.bases[0], abs=1e-10)


def test_invariants_six_gap(six):
    E = six.E
    assert np.all((E.a < six.tips) & (six.tips < E.b))
    assert np.all(six.residuals < 1e-10)
    assert np.max(six.closure_residuals(order=256)) < 1e-10
    x = E.grid(500)
    w = six.evaluate(x)
    assert np.max(np.abs(w.imag)) < 1e-9
    assert six.evaluate(1j) == pytest.approx(1j, abs=1e-9)
    # strictly increasing except across a gap, where both endpoints land on u_j
    same_gap = np.isin(x[:-1], E.a) & np.isin(x[1:], E.b)
    steps = np.diff(w.real)
    assert np.all(steps[~same_gap] > 0)
    assert np.allclose(steps[same_gap], 0, atol=1e-12)


def test_quadrature_order_doubling(six):
    m2 = solve_parameters(six.E, order=64)
    assert np.allclose(m2.tips, six.tips, atol=1e-12)
    z = np.array([0.3 + 0.1j, -4.5 + 2j, 10 + 1e-3j, 1j])
    assert np.allclose(m2.evaluate(z), six.evaluate(z), atol=1e-12)


def test_path_integral_oracle():
    """Evaluate differences against scipy quadrature of phi' along a segment in H."""
    m = solve_parameters(four_gap())
    z0, z1 = -2.0 + 0.5j, 1.7 + 0.05j
    f = lambda t: m.derivative(z0 + t * (z1 - z0)) * (z1 - z0)
    re, _ = quad(lambda t: f(t).real, 0, 1, epsabs=1e-13, epsrel=1e-13, limit=400)
    im, _ = quad(lambda t: f(t).imag, 0, 1, epsabs=1e-13, epsrel=1e-13, limit=400)
    diff = m.evaluate(z1) - m.evaluate(z0)
    assert abs(diff - (re + 1j * im)) < 1e-10


def test_slit_images_are_vertical():
    m = solve_parameters(four_gap())
    for j, (a, b) in enumerate(m.E.gaps):
        x = np.linspace(a, b, 17)[1:-1]
        w = m.evaluate(x)
        assert np.allclose(w.real, m.bases[j], atol=1e-10)
        assert np.max(w.imag) <= m.heights[j] + 1e-12
        assert m.evaluate(m.tips[j]) == pytest.approx(m.slit_tips[j], abs=1e-10)


def test_gap_free_identity():
    m = solve_parameters(gap_free())
    assert m.evaluate(1.0 + 2.0j) == 1.0 + 2.0j
    assert m.rho(1.0, 2.0) == 1.0
    d = np.array([1e-3, 0.1, 3.0])
    assert np.allclose(m.vertical_displacement(np.zeros(3), d), d, rtol=1e-14)


def test_rho_values(single):
    assert single.rho(-1.0, 1.0) == pytest.approx(2 ** -0.5, abs=1e-10)
    assert single.rho(2.0, 2.0) == 0.0
    assert single.rho(-2.0, 2.0) == pytest.approx(2 * np.sqrt(1.5), abs=1e-10)
    assert single.rho(1.0, 3.0) == single.rho(3.0, 1.0)


def test_rho_includes_slit_tips():
    m = solve_parameters(four_gap())
    # a pair just around a gap sees the slit tip, so rho exceeds the base span
    a, b = m.E.gaps[3]
    assert m.rho(a, b) == pytest.approx(m.heights[3], rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3.4, 3.4), min_size=3, max_size=3))
def test_rho_inclusion_monotone(xs):
    m = _four_map()
    x1, x2, x3 = np.sort(m.E.project(xs))
    r13 = m.rho(x1, x3)
    assert r13 >= m.rho(x1, x2) - 1e-12
    assert r13 >= m.rho(x2, x3) - 1e-12
    # diameter of a union of two connected images: triangle inequality
    assert r13 <= m.rho(x1, x2) + m.rho(x2, x3) + 1e-12


_cache = {}


def _four_map():
    if "m" not in _cache:
        _cache["m"] = solve_parameters(four_gap())
    return _cache["m"]


def test_rho_lower_bound_linear():
    m = _four_map()
    rng = np.random.default_rng(3)
    x = np.sort(m.E.project(rng.uniform(-3.4, 3.4, (2000, 2))), axis=1)
    keep = x[:, 1] > x[:, 0]
    x = x[keep]
    k = np.min(m.rho(x[:, 0], x[:, 1]) / (x[:, 1] - x[:, 0]))
    assert k > 0.1


def test_vertical_displacement_regime_ii(single):
    # |phi(1 + i d) - phi(1)| / sqrt(2 d) stays in a narrow bracket
    d = np.geomspace(1e-4, 1e-1, 30)
    v = single.vertical_displacement(np.ones_like(d), d)
    exact = np.abs(closed_form(1 + 1j * d))
    assert np.allclose(v, exact, rtol=1e-10)
    ratio = v / np.sqrt(2 * d)
    assert ratio.max() / ratio.min() < 1.2


def test_inverse_roundtrip():
    m = _four_map()
    for z in [0.1 + 0.3j, -2.0 + 1j, 0.28 + 0.01j]:
        assert m.inverse(m.evaluate(z)) == pytest.approx(z, abs=1e-10)


def test_domain_errors(single):
    with pytest.raises(MapDomainError):
        single.evaluate(1 - 1j)
    with pytest.raises(MapDomainError):
        single.evaluate_real(0.0)
    with pytest.raises(ValueError):
        single.vertical_displacement(2.0, 0.0)


def test_map_file_roundtrip(tmp_path, six):
    p = tmp_path / "six.map"
    six.write(p)
    first = p.read_text().splitlines()[0].split()
    assert len(first) == 5
    m = LevinMap.read(p)
    assert m.E.gaps == six.E.gaps
    assert np.array_equal(m.tips, six.tips)
    assert m.scale == six.scale and m.offset == six.offset
    assert m.evaluate(0.3 + 0.2j) == six.evaluate(0.3 + 0.2j)


def test_resolution_error_for_crowded_gaps():
    E = RealLineSet([(0.0, 1.0), (1.0 + 1e-9, 2.0)], (-30, 30))
    with pytest.raises(ResolutionError):
        solve_parameters(E, order=8, closure_tol=1e-14)


def test_slit_height_ratios_and_growth(six):
    r = slit_ratios(six)
    assert r.max() / r.min() < 3
    big = solve_parameters(example1((-6, 6)))
    # the six original gaps are gaps 3..8 of the doubled set
    r_big = slit_ratios(big)[3:9]
    assert np.max(np.abs(r_big / r - 1)) < 0.1
    g, g_big = growth_ratios(six), growth_ratios(big)
    assert np.all((g > 0.5) & (g < 2))
    assert np.max(np.abs(g_big / g - 1)) < 0.1
