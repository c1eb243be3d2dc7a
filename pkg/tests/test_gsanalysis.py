import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from moyal import (
    DegenerateInputError,
    DivergentSeriesError,
    GaussianSymbol,
    GridSymbol,
    GSParams,
    NormEstimate,
    PhaseGrid,
    decay_norm,
    derivative_growth,
    entire_coeff_check,
    fourier_bound_check,
    fourier_r,
    gs_norm,
    lemma_A1_check,
    truncation_order,
)

GRID1 = PhaseGrid(1, 10.0, 256)
UNIT1 = GaussianSymbol(np.array([[1.0]]), np.array([0.0]))


# norms -----------------------------------------------------------------------

def test_gs_norm_unit_gaussian_order_zero():
    # sup e^{-x^2} e^{x^2} = 1
    est = gs_norm(UNIT1, GSParams(0.5, 0.5, 1.0, 1.0), 0, GRID1)
    assert est.per_order[0] == pytest.approx(1.0, rel=1e-12)
    assert est.value == est.per_order[0]


def test_gs_norm_order_one_closed_form():
    # |f'| e^{x^2/4} = 2|x| e^{-3x^2/4}, max at x^2 = 2/3; B = 1, 1^1 = 1
    est = gs_norm(UNIT1, GSParams(0.5, 0.5, 2.0, 1.0), 1, GRID1)
    want = 2 * math.sqrt(2 / 3) * math.exp(-0.5)
    assert est.per_order[1] == pytest.approx(want, rel=1e-9)


@pytest.mark.parametrize("c", [0.5, 2.0, 3j])
def test_gs_norm_homogeneous(c):
    p = GSParams(0.5, 1.0, 2.0, 2.0)
    base = gs_norm(UNIT1, p, 4, GRID1).value
    scaled = gs_norm(UNIT1.scale(c), p, 4, GRID1).value
    assert scaled == pytest.approx(abs(c) * base, rel=1e-12)


def test_gs_norm_monotone_in_constants():
    small = gs_norm(UNIT1, GSParams(0.5, 1.0, 2.0, 1.0), 4, GRID1).value
    big_B = gs_norm(UNIT1, GSParams(0.5, 1.0, 2.0, 3.0), 4, GRID1).value
    big_A = gs_norm(UNIT1, GSParams(0.5, 1.0, 4.0, 1.0), 4, GRID1).value
    assert big_B <= small and big_A <= small


def test_gs_norm_grid_stable():
    f = GaussianSymbol(np.array([[0.7, 0.1], [0.1, 0.5]]), np.array([0.2, -0.1j]))
    p = GSParams(1.0, 1.0, 2.0, 2.0)
    a = gs_norm(f, p, 4, PhaseGrid(2, 8.0, 64)).value
    b = gs_norm(f, p, 4, PhaseGrid(2, 8.0, 128)).value
    assert abs(a - b) <= 1e-6 * b


def test_decay_norm_order_zero():
    assert decay_norm(UNIT1, 1.0, 0, 0, GRID1).value == pytest.approx(1.0, rel=1e-12)


def test_decay_norm_monotone_in_power():
    vals = [decay_norm(UNIT1, 1.0, N, 2, GRID1).value for N in (0, 1, 2, 4)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_decay_norm_rejects_bad_B():
    with pytest.raises(ValueError):
        decay_norm(UNIT1, 0.0, 1, 1, GRID1)


def test_norm_estimate_json_round_trip():
    est = gs_norm(UNIT1, GSParams(0.5, 0.5, 1.0, 1.0), 3, GRID1)
    back = NormEstimate.from_json(est.to_json())
    assert back == est


def test_derivative_growth_unit_gaussian():
    B, s = derivative_growth(UNIT1, 4, GRID1)
    assert s[0] == pytest.approx(1.0)
    assert all(s[n] <= s[0] * B ** n * (1 + 1e-12) for n in range(5))


# weighted-integral inequality ------------------------------------------------

@pytest.mark.parametrize("k,n", [(1, 0), (1, 2), (2, 1), (3, 3)])
def test_lemma_A1_real_gaussian(k, n):
    assert lemma_A1_check(UNIT1, (k,), (n,), GRID1).holds


def test_lemma_A1_complex_grid_symbol():
    # e^{-x^2}(1 + ix) = e^{-x^2} + i x e^{-x^2}, sampled
    x = GRID1.axis
    f = GridSymbol(GRID1, np.exp(-x ** 2) * (1 + 1j * x))
    for k in range(3):
        for n in range(3):
            assert lemma_A1_check(f, (k,), (n,), GRID1).holds


def test_lemma_A1_equality_at_order_zero():
    res = lemma_A1_check(UNIT1, (0,), (0,), GRID1, factor=1.0)
    assert res.lhs == pytest.approx(res.rhs, rel=1e-12)
    assert res.lhs == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_lemma_A1_dimension_check():
    with pytest.raises(ValueError):
        lemma_A1_check(UNIT1, (1, 0), (0, 0), GRID1)


# Fourier bound -----------------------------------------------------------------

def test_fourier_bound_zero_input():
    grid = PhaseGrid(2, 8.0, 64)
    with pytest.raises(DegenerateInputError):
        fourier_bound_check(GridSymbol(grid, np.zeros(grid.shape, complex)),
                            GSParams(1.0, 1.0, 2.0, 2.0), 2, grid)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_fourier_r_exceeds_threshold(beta):
    assert fourier_r(1.0, beta, 2) > 2 * (math.e / beta) ** beta


def test_fourier_bound_finite_ratio():
    grid = PhaseGrid(2, 8.0, 128)
    res = fourier_bound_check(GaussianSymbol.isotropic(2), GSParams(1.0, 1.0, 2.0, 2.0), 4, grid)
    assert 0 < res.ratio < np.inf
    assert res.r_used == pytest.approx(fourier_r(1.0, 1.0, 2))


# entire coefficients -----------------------------------------------------------

@pytest.mark.parametrize("eps", [0.25, 1.0, 2.0])
def test_entire_type_of_exp_square(eps):
    # e^{eps z^2}: c_{2m} = eps^m / m!, so |c_n| ~ (2 e eps / n)^{n/2}
    coeffs = {(2 * m,): eps ** m / math.factorial(m) for m in range(40)}
    res = entire_coeff_check(coeffs)
    assert res.satisfies
    assert res.b_fit == pytest.approx(2 * eps * math.e, rel=0.15)


def test_polynomial_coefficients_satisfy():
    assert entire_coeff_check({(0,): 1.0, (1,): 2.0, (3,): -1.0}).satisfies


def test_factorial_coefficients_fail():
    coeffs = {(n,): float(math.factorial(n)) for n in range(30)}
    assert not entire_coeff_check(coeffs).satisfies


def test_entire_coeff_empty():
    with pytest.raises(DegenerateInputError):
        entire_coeff_check({})


# truncation order ---------------------------------------------------------------

def test_truncation_order_half():
    # B sqrt(2b) = 1/2, C = 1: tail 2^-M <= 1e-8 first at M = 27
    assert truncation_order(0.5, 0.5, 1.0, 1e-8) == 27


def test_truncation_order_large_tol():
    assert truncation_order(0.5, 0.5, 1.0, 10.0) == 0


def test_truncation_order_divergent():
    with pytest.raises(DivergentSeriesError):
        truncation_order(1.0, 0.5, 1.0, 1e-8)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.95), st.floats(0.1, 10.0), st.floats(1e-12, 1e-2), st.floats(1.5, 100.0))
def test_truncation_order_minimal_and_monotone(q, C, tol, shrink):
    B, b = q, 0.5
    M = truncation_order(B, b, C, tol)
    tail = lambda m: C * q ** (m + 1) / (1 - q)
    assert tail(M) <= tol
    assert M == 0 or tail(M - 1) > tol
    assert truncation_order(B, b, C, tol / shrink) >= M
