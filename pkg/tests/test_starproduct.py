import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moyal import (
    GaussianSymbol,
    PhaseGrid,
    PolynomialSymbol,
    RepresentationError,
    SpectralOrderError,
    gaussian_star,
    make_theta,
    moyal_coefficients,
    moyal_commutator,
    sample,
    spectral_derivatives,
    star_integral,
    star_series,
)
from oracles import double_integral_star, gaussian_callable

GRID = PhaseGrid(2, 8.0, 64)
X1, X2 = PolynomialSymbol.coordinate(2, 0), PolynomialSymbol.coordinate(2, 1)
F1 = GaussianSymbol(np.array([[0.6, 0.1], [0.1, 0.9]]), np.array([0.3, -0.2]))
G1 = GaussianSymbol(np.array([[1.2, 0.0], [0.0, 0.5]]), np.array([0.4j, 0.1]))


def polys(d=2, max_deg=3):
    keys = st.tuples(*[st.integers(0, max_deg)] * d).filter(lambda n: sum(n) <= max_deg)
    coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
    return st.dictionaries(keys, coef, max_size=4).map(lambda c: PolynomialSymbol(d, c))


# series mode --------------------------------------------------------------------

@pytest.mark.parametrize("theta0", [0.5, 1.0, 2.0])
def test_coordinate_product(theta0):
    res = star_series(X1, X2, make_theta(2, theta0), 10)
    assert res.value.coeffs == {(1, 1): 1.0, (0, 0): 0.5j * theta0}
    assert res.terms_used == 2
    assert res.truncation_bound == 0.0


def test_series_at_zero_theta_is_pointwise():
    zero = make_theta(entries=np.zeros((2, 2)))
    p = PolynomialSymbol(2, {(2, 0): 1.0, (0, 1): 2j})
    q = PolynomialSymbol(2, {(1, 1): 3.0, (0, 0): 1.0})
    assert star_series(p, q, zero, 5).value.almost_equal(p * q)
    got = star_series(F1, G1, zero, 4, GRID).value.values
    np.testing.assert_allclose(got, (F1 * G1).evaluate_grid(GRID), atol=1e-14)


def test_constant_is_identity():
    th = make_theta(2, 1.0)
    one = PolynomialSymbol.constant(2)
    p = PolynomialSymbol(2, {(3, 1): 1.0, (0, 2): -2j})
    assert star_series(one, p, th, 6).value.almost_equal(p)
    assert star_series(p, one, th, 6).value.almost_equal(p)
    np.testing.assert_allclose(star_integral(one, F1, th, GRID).values, F1.evaluate_grid(GRID), atol=1e-12)


def test_terms_used_bounded_by_degree():
    th = make_theta(2, 1.0)
    p = PolynomialSymbol(2, {(2, 1): 1.0})
    q = PolynomialSymbol(2, {(1, 1): 1.0, (0, 2): 1.0})
    res = star_series(p, q, th, 20)
    assert res.terms_used <= min(p.degree, q.degree) + 1


def test_moyal_coefficients_first_order():
    th = make_theta(2, 1.0)
    c = moyal_coefficients(th, 1)
    assert c[0] == {((0, 0), (0, 0)): 1.0}
    # (i/2) theta^{ij} d_i d_j' : theta^{12} = 1, theta^{21} = -1
    assert c[1] == pytest.approx({((1, 0), (0, 1)): 0.5j, ((0, 1), (1, 0)): -0.5j})


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_conjugation_identity(p, q):
    # (p * q)^* = q^* * p^*
    th = make_theta(2, 1.3)
    lhs = star_series(p, q, th, 8).value.conj()
    rhs = star_series(q.conj(), p.conj(), th, 8).value
    assert lhs.almost_equal(rhs, 1e-10)


@settings(max_examples=30, deadline=None)
@given(polys(max_deg=2), polys(max_deg=2), polys(max_deg=2))
def test_polynomial_associativity(p, q, r):
    th = make_theta(2, 0.7)
    a = star_series(star_series(p, q, th, 8).value, r, th, 8).value
    b = star_series(p, star_series(q, r, th, 8).value, th, 8).value
    assert a.almost_equal(b, 1e-10)


def test_spectral_order_cap():
    f = sample(F1, PhaseGrid(2, 8.0, 32))
    with pytest.raises(SpectralOrderError):
        star_series(f, f, make_theta(2, 1.0), 9)
    with pytest.raises(SpectralOrderError):
        spectral_derivatives(f, 9)


def test_mixed_grids_rejected():
    a = sample(F1, PhaseGrid(2, 8.0, 32))
    b = sample(G1, PhaseGrid(2, 8.0, 64))
    with pytest.raises(RepresentationError):
        star_series(a, b, make_theta(2, 1.0), 2)


def test_series_needs_grid_for_gaussians():
    with pytest.raises(RepresentationError):
        star_series(F1, G1, make_theta(2, 1.0), 2)


def test_spectral_derivatives_match_analytic():
    grid = PhaseGrid(2, 8.0, 64)
    D = spectral_derivatives(sample(F1, grid), 4)
    x = grid.points().reshape(-1, 2)
    A = F1.derivatives(x, 4)
    for alpha in [(1, 0), (2, 1), (0, 4), (3, 1)]:
        np.testing.assert_allclose(D[alpha].reshape(-1), A[alpha], atol=1e-9)


def test_term_decay_small_type():
    th = make_theta(2, 0.2)
    f = GaussianSymbol.isotropic(2, 0.4).translate([0.3, -0.2])
    res = star_series(f, f, th, 16, PhaseGrid(2, 8.0, 128))
    # odd orders vanish for f * f; compare consecutive nonzero terms
    tn = np.asarray(res.term_norms)
    tn = tn[tn > 1e-14 * tn[0]]
    ratios = tn[3:] / tn[2:-1]
    assert np.all(ratios < 0.5)
    assert res.truncation_bound < 1e-8


def test_polynomial_times_gaussian_series_matches_integral():
    # exact polynomial action, no windowing
    th = make_theta(2, 1.0)
    p = PolynomialSymbol(2, {(2, 0): 1.0, (1, 1): -0.5j, (0, 0): 2.0})
    ser = star_series(p, F1, th, 4, GRID).value.values
    integ = star_integral(p, F1, th, GRID).values
    np.testing.assert_allclose(integ, ser, atol=1e-10 * np.abs(ser).max())
    ser = star_series(F1, p, th, 4, GRID).value.values
    integ = star_integral(F1, p, th, GRID).values
    np.testing.assert_allclose(integ, ser, atol=1e-10 * np.abs(ser).max())


# integral mode --------------------------------------------------------------------

def test_unit_gaussians_closed_form():
    # e^{-|x|^2} * e^{-|x|^2} = (1/2) e^{-|x|^2} at theta = J
    g = GaussianSymbol.isotropic(2)
    th = make_theta(2, 1.0)
    cf = gaussian_star(g, g, th)
    np.testing.assert_allclose(cf.M, np.eye(2), atol=1e-15)
    assert np.exp(cf.c) == pytest.approx(0.5)
    np.testing.assert_allclose(star_integral(g, g, th, GRID).values, 0.5 * g.evaluate_grid(GRID), atol=1e-14)


def test_closed_form_against_double_integral():
    th = make_theta(2, 0.8)
    M1, b1 = np.array([[0.8, -0.2], [-0.2, 0.6]]), np.array([0.1j, 0.4])
    M2, b2 = np.array([[0.9, 0.0], [0.0, 1.1]]), np.array([-0.2, 0.0])
    grid = PhaseGrid(2, 5.0, 32)
    xs = np.array([[0.0, 0.0], [0.5, -0.3], [-1.2, 0.8], [1.5, 1.5]])
    ref = double_integral_star(gaussian_callable(M1, b1), gaussian_callable(M2, b2), th.entries,
                               grid.L, grid.N, xs)
    cf = gaussian_star(GaussianSymbol(M1, b1), GaussianSymbol(M2, b2), th).evaluate(xs)
    np.testing.assert_allclose(cf, ref, atol=1e-9)


@pytest.mark.parametrize("theta0", [0.3, 1.0, 2.0])
def test_integral_matches_closed_form(theta0):
    th = make_theta(2, theta0)
    got = star_integral(F1, G1, th, GRID).values
    want = gaussian_star(F1, G1, th).evaluate_grid(GRID)
    np.testing.assert_allclose(got, want, atol=1e-9 * np.abs(want).max())


@pytest.mark.parametrize("which", ["f", "g", "both"])
def test_integral_grid_inputs(which):
    th = make_theta(2, 1.0)
    f = sample(F1, GRID) if which in ("f", "both") else F1
    g = sample(G1, GRID) if which in ("g", "both") else G1
    got = star_integral(f, g, th, GRID).values
    want = gaussian_star(F1, G1, th).evaluate_grid(GRID)
    np.testing.assert_allclose(got, want, atol=1e-10 * np.abs(want).max())


@pytest.mark.parametrize("pair", [(0, 1), (1, 2), (0, 2)])
def test_tracial_property(pair):
    fam = [F1, G1, GaussianSymbol.isotropic(2, 0.7, [0.3, 0.3j])]
    f, g = fam[pair[0]], fam[pair[1]]
    th = make_theta(2, 1.0)
    lhs = star_integral(f, g, th, GRID).integral()
    rhs = (f * g).integral()
    assert abs(lhs - rhs) < 1e-8 * abs(rhs)


def test_integral_output_metadata():
    res = star_integral(F1, G1, make_theta(2, 1.0), GRID)
    assert res.adequate and res.boundary_ratio < 1e-14


# commutator ---------------------------------------------------------------------

def test_commutator_series():
    th = make_theta(2, 1.5)
    assert moyal_commutator(X1, X2, th).coeffs == {(0, 0): 1.5j}
    assert moyal_commutator(X1, X1, th).is_zero


def test_commutator_zero_theta():
    zero = make_theta(entries=np.zeros((2, 2)))
    p = PolynomialSymbol(2, {(2, 1): 1.0, (0, 1): 1j})
    assert moyal_commutator(p, X1, zero).is_zero
    com = moyal_commutator(F1, G1, zero, "integral", grid=GRID)
    assert np.abs(com.values).max() < 1e-14


def test_commutator_integral_with_probe():
    th = make_theta(2, 1.0)
    h = GaussianSymbol.isotropic(2, 0.5)
    com = moyal_commutator(X1, X2, th, "integral", grid=GRID, probe=h)
    np.testing.assert_allclose(com.values, 1j * h.evaluate_grid(GRID), atol=1e-10)
    with pytest.raises(RepresentationError):
        moyal_commutator(X1, X2, th, "integral", grid=GRID)
