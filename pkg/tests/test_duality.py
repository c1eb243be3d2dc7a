import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moyal import (
    Delta,
    GaussianSymbol,
    NormalizationError,
    One,
    PhaseGrid,
    PlaneWave,
    PolyGaussianDensity,
    PolynomialSymbol,
    RepresentationError,
    approx_identity_error,
    fourier,
    fourier_functional,
    involute,
    log_slope,
    make_theta,
    monotone_onset,
    pair,
    sample,
    star_functional,
    star_integral,
    twisted_conv_functional,
)

GRID = PhaseGrid(2, 8.0, 64)
F1 = GaussianSymbol(np.array([[0.6, 0.1], [0.1, 0.9]]), np.array([0.3, -0.2]))
G1 = GaussianSymbol(np.array([[1.2, 0.0], [0.0, 0.5]]), np.array([0.4j, 0.1]))
P1 = PolynomialSymbol(2, {(1, 0): 1.0, (0, 2): 0.5j, (0, 0): -0.3})
U1 = PolyGaussianDensity(P1, GaussianSymbol.isotropic(2, 0.8, [0.1, -0.2j]))


def test_delta_on_unit_gaussian():
    assert pair(Delta(np.zeros(2)), GaussianSymbol.isotropic(2)) == pytest.approx(1.0)


def test_one_on_1d_gaussian():
    g = GaussianSymbol(np.array([[1.0]]), np.array([0.0]))
    assert pair(One(1), g) == pytest.approx(np.sqrt(np.pi), rel=1e-14)


@pytest.mark.parametrize("k", [[0.0, 0.0], [0.5, -1.0], [2.0, 0.3]])
def test_plane_wave_is_transform_at_minus_k(k):
    k = np.array(k)
    want = fourier(F1).evaluate(-k[None, :])[0]
    assert pair(PlaneWave(k), F1) == pytest.approx(want, rel=1e-12)
    assert pair(PlaneWave(k), sample(F1, GRID)) == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("u", [Delta([0.3, -0.1], 2j), One(2, 0.5), PlaneWave([0.4, 0.2]), U1],
                         ids=["delta", "one", "wave", "density"])
def test_grid_pairing_matches_closed_form(u):
    assert pair(u, sample(G1, GRID)) == pytest.approx(pair(u, G1), rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
def test_pairing_linear(a, b):
    f, g = sample(F1, GRID), sample(G1, GRID)
    for u in (U1, PlaneWave([0.2, 0.1]), One(2)):
        lhs = pair(u, a * f + b * g)
        rhs = a * pair(u, f) + b * pair(u, g)
        assert abs(lhs - rhs) < 1e-12 * (1 + abs(a) + abs(b))


def test_density_pairing_with_polynomial():
    # <p G, x_1> by quadrature
    x1 = PolynomialSymbol.coordinate(2, 0)
    want = np.sum(U1.density(GRID).values * GRID.mesh()[0]) * GRID.cell_volume
    assert pair(U1, x1) == pytest.approx(want, rel=1e-10)


def test_plane_wave_cannot_pair_polynomial():
    with pytest.raises(RepresentationError):
        pair(PlaneWave([0.0, 0.0]), P1)


def test_dimension_mismatch():
    with pytest.raises(RepresentationError):
        pair(Delta([0.0]), F1)


@pytest.mark.parametrize("u", [Delta([0.3, -0.1]), One(2), PlaneWave([0.4, 0.2]), U1],
                         ids=["delta", "one", "wave", "density"])
def test_fourier_functional(u):
    # <u^, f> = <u, f^>
    assert pair(fourier_functional(u), F1) == pytest.approx(pair(u, fourier(F1)), rel=1e-10)


# products --------------------------------------------------------------------

def test_one_star_f_is_integral_of_product():
    th = make_theta(2, 1.0)
    got = star_functional(One(2), F1, th, "left", G1, GRID)
    assert got == pytest.approx((F1 * G1).integral(), rel=1e-10)


def test_delta_at_zero_theta_is_pointwise():
    zero = make_theta(entries=np.zeros((2, 2)))
    xi = np.array([0.5, -0.25])  # a grid node
    got = star_functional(Delta(xi), F1, zero, "left", G1, GRID)
    want = F1.evaluate(xi[None, :])[0] * G1.evaluate(xi[None, :])[0]
    assert got == pytest.approx(want, rel=1e-12)


@pytest.mark.parametrize("side", ["left", "right"])
def test_twisted_with_delta(side):
    th = make_theta(2, 1.0)
    xi = np.array([0.5, -0.25])
    s = 1 if side == "left" else -1
    Q = GRID.points().reshape(-1, 2)
    want = G1.evaluate(Q - xi) * np.exp(s * 0.5j * (Q @ th.entries) @ xi)
    closed = twisted_conv_functional(Delta(xi), G1, th, side, GRID).values.reshape(-1)
    gridded = twisted_conv_functional(Delta(xi), sample(G1, GRID), th, side, GRID).values.reshape(-1)
    np.testing.assert_allclose(closed, want, atol=1e-13)
    np.testing.assert_allclose(gridded, want, atol=1e-10)


def test_twisted_with_density_matches_grid_path():
    th = make_theta(2, 1.0)
    a = twisted_conv_functional(U1, G1, th, "left", GRID).values
    b = twisted_conv_functional(U1, sample(G1, GRID), th, "left", GRID).values
    np.testing.assert_allclose(a, b, atol=1e-9 * np.abs(a).max())


def test_involute_twice():
    for u in (Delta([0.1, 0.2], 1 + 2j), PlaneWave([0.3, -0.4], 1j), One(2, 2 - 1j), U1):
        uu = involute(involute(u))
        assert pair(uu, G1) == pytest.approx(pair(u, G1), rel=1e-14)


def test_involute_pairing_rule():
    # <u*, f> = conj <u, f*>
    for u in (Delta([0.1, 0.2], 1 + 2j), PlaneWave([0.3, -0.4], 1j), U1):
        assert pair(involute(u), G1) == pytest.approx(np.conj(pair(u, G1.conj())), rel=1e-12)


def test_involution_reverses_product():
    th = make_theta(2, 1.0)
    lhs = star_integral(G1, F1, th, GRID).values.conj()
    rhs = star_integral(F1.conj(), G1.conj(), th, GRID).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_pairing_identity():
    # <f * u*, g> = conj <u * f*, g*>
    th = make_theta(2, 1.0)
    lhs = star_functional(involute(U1), F1, th, "right", G1, GRID)
    rhs = np.conj(star_functional(U1, F1.conj(), th, "left", G1.conj(), GRID))
    assert lhs == pytest.approx(rhs, rel=1e-10)


# approximate identity ---------------------------------------------------------

def test_approx_identity_requires_normalised_e():
    with pytest.raises(NormalizationError):
        approx_identity_error(F1, GaussianSymbol.isotropic(2, 1.0, c=0.1), 2.0, make_theta(2, 1.0), "left", GRID)


def test_approx_identity_at_zero_theta():
    zero = make_theta(entries=np.zeros((2, 2)))
    e = GaussianSymbol.isotropic(2, 0.5)
    res = approx_identity_error(F1, e, 4.0, zero, "left", GRID)
    want = np.max(np.abs(F1.evaluate_grid(GRID) * (e.dilate(4.0).evaluate_grid(GRID) - 1)))
    assert res.err == pytest.approx(want, rel=1e-8)


@pytest.mark.parametrize("side", ["left", "right"])
def test_approx_identity_decays(side):
    th = make_theta(2, 1.0)
    e = GaussianSymbol(0.5 * np.eye(2), np.array([1.0, 0.0]))
    nus = [4.0, 8.0, 16.0, 32.0]
    errs = [approx_identity_error(F1, e, nu, th, side, GRID).err for nu in nus]
    assert monotone_onset(nus, errs) == 4.0
    assert -1.2 < log_slope(nus, errs) < -0.8


def test_log_slope_and_onset():
    nus = [1, 2, 4, 8]
    assert log_slope(nus, [8, 4, 2, 1]) == pytest.approx(-1.0)
    assert monotone_onset(nus, [1, 3, 2, 1]) == 2
    assert monotone_onset(nus, [1, 2, 3, 4]) == 8
