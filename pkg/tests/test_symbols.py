import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moyal import (
    ConstructionError,
    GaussianSymbol,
    GridMismatchError,
    GridSymbol,
    GridTooSmallWarning,
    GSParams,
    PhaseGrid,
    PolynomialSymbol,
    SingularThetaError,
    make_theta,
    mi_power_log,
    multiindices,
    parse_multiindex,
    format_multiindex,
    sample,
    trig_interpolate,
)


# theta ----------------------------------------------------------------------

def test_canonical_theta_d2():
    th = make_theta(2, 1.0)
    np.testing.assert_array_equal(th.entries, [[0, 1], [-1, 0]])
    assert th.det == pytest.approx(1.0)
    np.testing.assert_allclose(th.inverse, [[0, -1], [1, 0]], atol=1e-15)


@pytest.mark.parametrize("theta0,det", [(0.5, 0.25), (2.0, 4.0), (1.0, 1.0)])
def test_canonical_det(theta0, det):
    assert make_theta(2, theta0).det == pytest.approx(det, rel=1e-14)


def test_canonical_d4_det():
    assert make_theta(4, 0.5).det == pytest.approx(0.5 ** 4)


def test_not_antisymmetric():
    with pytest.raises(ConstructionError):
        make_theta(entries=[[0, 1], [-1, 0.1]])


@pytest.mark.parametrize("entries", [[[0.0]], [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]])
def test_odd_dimension_rejected(entries):
    with pytest.raises(ConstructionError):
        make_theta(entries=entries)


def test_singular_with_inverse_requested():
    with pytest.raises(SingularThetaError):
        make_theta(entries=np.zeros((2, 2)), inverse=True)
    th = make_theta(entries=np.zeros((2, 2)))
    assert th.is_zero and not th.invertible and th.det == 0.0
    with pytest.raises(SingularThetaError):
        th.require_inverse()


def test_bridge_matrix_canonical():
    br = make_theta(2, 1.0).bridge()
    np.testing.assert_allclose(br.entries, 4 * np.array([[0, 1], [-1, 0]]), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_bridge_twice_returns_theta(vals):
    a = np.zeros((4, 4))
    a[np.triu_indices(4, 1)] = vals
    th = a - a.T
    if abs(np.linalg.det(th)) < 1e-3:
        return
    t = make_theta(entries=th)
    assert t.det > 0
    back = t.bridge().bridge()
    np.testing.assert_allclose(back.entries, t.entries, atol=1e-12 * max(1, np.abs(th).max()) * 1e2)


# grids ----------------------------------------------------------------------

def test_grid_spacing_and_dual():
    g = PhaseGrid(2, 8.0, 64)
    assert g.spacing * g.N == 2 * g.L
    assert g.nyquist == pytest.approx(np.pi * g.N / (2 * g.L))
    assert g.dual().spacing == pytest.approx(np.pi / g.L)
    assert g.dual().dual() == g


@pytest.mark.parametrize("N", [0, 3, 100])
def test_grid_requires_power_of_two(N):
    with pytest.raises(ConstructionError):
        PhaseGrid(2, 8.0, N)


# sampling --------------------------------------------------------------------

def test_sample_gaussian_boundary():
    grid = PhaseGrid(2, 8.0, 64)
    s = sample(GaussianSymbol.isotropic(2), grid)
    X, Y = grid.mesh()
    np.testing.assert_allclose(s.values, np.exp(-X ** 2 - Y ** 2), rtol=1e-14)
    assert s.boundary_ratio == pytest.approx(np.exp(-64), rel=1e-10)
    assert s.adequate


def test_sample_coordinate_polynomial():
    grid = PhaseGrid(2, 4.0, 16)
    s = sample(PolynomialSymbol.coordinate(2, 0), grid)
    np.testing.assert_array_equal(s.values.real, grid.mesh()[0])
    assert not s.adequate


def test_sample_wide_gaussian_warns():
    with pytest.warns(GridTooSmallWarning):
        s = sample(GaussianSymbol.isotropic(2, 0.01), PhaseGrid(2, 8.0, 64))
    assert not s.adequate
    assert s.boundary_ratio == pytest.approx(np.exp(-0.64), rel=1e-10)


def test_sample_grid_mismatch():
    s = sample(GaussianSymbol.isotropic(2), PhaseGrid(2, 8.0, 64))
    with pytest.raises(GridMismatchError):
        sample(s, PhaseGrid(2, 8.0, 32))


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
def test_sample_linear(a, b):
    grid = PhaseGrid(2, 6.0, 32)
    f = GaussianSymbol(np.array([[0.8, 0.1], [0.1, 0.6]]), np.array([0.2, -0.1j]))
    g = GaussianSymbol.isotropic(2, 1.3, [0.1, 0.3])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GridTooSmallWarning)
        lhs = a * sample(f, grid) + b * sample(g, grid)
    rhs = a * f.evaluate_grid(grid) + b * g.evaluate_grid(grid)
    np.testing.assert_allclose(lhs.values, rhs, atol=1e-13 * (1 + abs(a) + abs(b)))


# symbols --------------------------------------------------------------------

def test_polynomial_evaluation_and_derivative():
    p = PolynomialSymbol(2, {(2, 1): 3.0, (0, 0): 1j})
    x = np.array([[1.5, -2.0]])
    assert p.evaluate(x)[0] == pytest.approx(3 * 1.5 ** 2 * -2.0 + 1j)
    dp = p.derivative((1, 1))
    assert dp.coeffs == {(1, 0): 6.0}
    assert p.degree == 3


def test_gaussian_requires_positive_real_part():
    with pytest.raises(ConstructionError):
        GaussianSymbol(np.array([[1.0, 0], [0, -0.1]]), np.zeros(2))
    with pytest.raises(ConstructionError):
        GaussianSymbol(np.array([[1.0, 0.3], [0.0, 1.0]]), np.zeros(2))


def test_gaussian_integral():
    g = GaussianSymbol(np.array([[1.0]]), np.array([0.0]))
    assert g.integral() == pytest.approx(np.sqrt(np.pi))
    g2 = GaussianSymbol(np.array([[0.5, 0.1], [0.1, 0.7]]), np.array([0.3, 0.2j]), 0.1)
    grid = PhaseGrid(2, 10.0, 128)
    assert sample(g2, grid).integral() == pytest.approx(g2.integral(), rel=1e-12)


@pytest.mark.parametrize("order", [1, 3, 5])
def test_gaussian_derivatives_match_finite_differences(order):
    g = GaussianSymbol(np.array([[0.5, 0.1], [0.1, 0.7]]), np.array([0.3, 0.2j]))
    x = np.array([[0.3, -0.4]])
    D = g.derivatives(x, order)
    h = 1e-3
    alpha = (order, 0)
    # central differences of the order-1 lower derivative
    lower = (order - 1, 0)
    xp, xm = x + [h, 0], x - [h, 0]
    fd = (g.derivatives(xp, order)[lower] - g.derivatives(xm, order)[lower]) / (2 * h)
    np.testing.assert_allclose(D[alpha], fd, rtol=1e-5)


def test_gaussian_translate_dilate():
    g = GaussianSymbol.isotropic(2, 0.7, [0.2, 0.1])
    x = np.array([[0.5, -1.0]])
    a = np.array([0.3, 0.4])
    assert g.translate(a).evaluate(x)[0] == pytest.approx(g.evaluate(x - a)[0])
    assert g.dilate(4.0).evaluate(x)[0] == pytest.approx(g.evaluate(x / 4.0)[0])


def test_trig_interpolate_band_limited():
    grid = PhaseGrid(1, np.pi, 32)
    x = grid.axis
    vals = np.cos(3 * x) + 0.5j * np.sin(5 * x)
    pts = np.array([[0.123], [-2.2], [1.7]])
    got = trig_interpolate(vals, grid, pts)
    want = np.cos(3 * pts[:, 0]) + 0.5j * np.sin(5 * pts[:, 0])
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_grid_symbol_rejects_nonfinite():
    grid = PhaseGrid(1, 1.0, 8)
    vals = np.zeros(8, complex)
    vals[3] = np.nan
    with pytest.raises(ConstructionError):
        GridSymbol(grid, vals)


# parameters and multiindices --------------------------------------------------

@pytest.mark.parametrize("alpha,beta", [(0.5, 0.5), (1.0, 1.0), (0.3, 0.9)])
def test_gsparams_nontrivial(alpha, beta):
    GSParams(alpha, beta, 1.0, 1.0)


@pytest.mark.parametrize("alpha,beta", [(0.4, 0.4), (1.0, 0.0), (0.0, 1.0)])
def test_gsparams_trivial(alpha, beta):
    with pytest.raises(ConstructionError):
        GSParams(alpha, beta, 1.0, 1.0)


def test_zero_power_convention():
    assert mi_power_log((0, 0), 0.5) == 0.0
    assert mi_power_log((2, 0), 0.5) == pytest.approx(0.5 * 2 * np.log(2))


def test_multiindices_count():
    assert len(list(multiindices(2, 4))) == 5
    assert len(list(multiindices(3, 2))) == 6


@given(st.lists(st.integers(0, 9), min_size=1, max_size=4))
def test_multiindex_key_roundtrip(n):
    assert parse_multiindex(format_multiindex(tuple(n))) == tuple(n)
