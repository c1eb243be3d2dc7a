"""Moyal star product in series, integral and closed Gaussian form.

The series form is

    f * g = sum_n (i/2)^n / n! (d_x theta d_y)^n f(x) g(y) |_{y=x},

so that ``x^1 * x^2 = x^1 x^2 + (i/2) theta^{12}``.  The integral form used
in production is

    (f * g)(x) = (2 pi)^-d int f(x - theta q / 2) g^(q) exp(i q.x) dq,

evaluated by the trapezoid rule on the dual grid.  When ``g`` is a
polynomial the mirrored form with ``f^`` and ``g(x + theta p / 2)`` is used.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (
    GridMismatchError,
    GridTooSmallWarning,
    NumericalError,
    RepresentationError,
    SpectralOrderError,
)
from .spectral import gaussian_fourier, grid_dft, grid_idft, spectrum_on
from .symbols import (
    ADEQUATE_TAIL,
    WARN_TAIL,
    GaussianSymbol,
    GridSymbol,
    Multiindex,
    PhaseGrid,
    PolynomialSymbol,
    Symbol,
    ThetaMatrix,
    grid_boundary_ratio,
    multiindices_upto,
)

BiIndex = Tuple[Multiindex, Multiindex]


@dataclass(frozen=True)
class SeriesResult:
    value: Symbol
    terms_used: int
    term_norms: List[float] = field(default_factory=list)
    truncation_bound: Optional[float] = None


# ---------------------------------------------------------------------------
# bidifferential coefficients
# ---------------------------------------------------------------------------

def moyal_coefficients(theta: ThetaMatrix, order: int) -> List[Dict[BiIndex, complex]]:
    """Coefficients of ``(i/2)^n/n! (d_x theta d_y)^n`` for ``n <= order``.

    Entry ``n`` maps ``(m, k)`` to the coefficient of ``d_x^m d_y^k``.
    """
    d = theta.d
    th = theta.entries
    pairs = [(i, j, th[i, j]) for i in range(d) for j in range(d) if th[i, j] != 0]
    zero = (0,) * d
    out = [{(zero, zero): 1.0 + 0j}]
    for n in range(1, order + 1):
        cur: Dict[BiIndex, complex] = {}
        for (m, k), c in out[-1].items():
            for i, j, t in pairs:
                mm = list(m)
                kk = list(k)
                mm[i] += 1
                kk[j] += 1
                key = (tuple(mm), tuple(kk))
                cur[key] = cur.get(key, 0) + c * t * 0.5j / n
        out.append({key: c for key, c in cur.items() if c != 0})
    return out


def entire_coefficients(theta: ThetaMatrix, order: int) -> Dict[Multiindex, complex]:
    """Taylor coefficients of ``exp((i/2) s.theta t)`` in the ``2d`` variables ``(s, t)``."""
    flat: Dict[Multiindex, complex] = {}
    for layer in moyal_coefficients(theta, order):
        for (m, k), c in layer.items():
            flat[m + k] = c
    return flat


# ---------------------------------------------------------------------------
# derivative tables
# ---------------------------------------------------------------------------

def spectral_derivatives(f: GridSymbol, order: int, filter_rel: float = 1e-15) -> Dict[Multiindex, np.ndarray]:
    """All ``d^alpha f``, ``|alpha| <= order``, by spectral differentiation.

    The Nyquist mode is dropped for odd orders along an axis, and modes below
    ``filter_rel`` of the peak are dropped for ``|alpha| >= 1`` so that
    round-off is not amplified by high powers of the wavenumber.
    """
    grid = f.grid
    if order > grid.N // 4:
        raise SpectralOrderError(f"order {order} exceeds the trusted band N/4 = {grid.N // 4}")
    F = grid_dft(f.values, grid)
    Ff = np.where(np.abs(F) > filter_rel * np.abs(F).max(), F, 0)
    p = grid.frequencies
    out = {(0,) * grid.d: np.array(f.values)}
    for alpha in multiindices_upto(grid.d, order):
        if sum(alpha) == 0:
            continue
        mult = np.ones(())
        for a in alpha:
            fac = (1j * p) ** a
            if a % 2:
                fac = fac.copy()
                fac[0] = 0.0
            mult = np.multiply.outer(mult, fac)
        out[alpha] = grid_idft(Ff * mult, grid)
    return out


def _derivative_table(f: Symbol, order: int, grid: Optional[PhaseGrid]) -> Dict[Multiindex, object]:
    if isinstance(f, PolynomialSymbol):
        return {a: f.derivative(a) for a in multiindices_upto(f.d, order)}
    if isinstance(f, GridSymbol):
        return spectral_derivatives(f, order)
    if isinstance(f, GaussianSymbol):
        if grid is None:
            raise RepresentationError("series mode with a Gaussian factor needs a grid")
        return f.derivatives(grid.points(), order)
    raise RepresentationError(f"series mode cannot differentiate {type(f).__name__}")


def _as_grid_values(x, grid: PhaseGrid) -> np.ndarray:
    if isinstance(x, PolynomialSymbol):
        return x.evaluate_axes([grid.axis] * grid.d)
    return np.asarray(x)


def star_series(f: Symbol, g: Symbol, theta: ThetaMatrix, max_order: int,
                grid: Optional[PhaseGrid] = None) -> SeriesResult:
    """Truncated power series of the star product.

    Two polynomials give an exact polynomial.  Grid symbols on a common grid
    use spectral derivatives (order capped at ``N/4``).  Gaussian factors are
    differentiated analytically on ``grid``; polynomial factors may be mixed
    with grid data.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    if f.d != theta.d or g.d != theta.d:
        raise RepresentationError("symbol and theta dimensions differ")
    if isinstance(f, PolynomialSymbol) and isinstance(g, PolynomialSymbol):
        return _series_polynomial(f, g, theta)

    grids = {s.grid for s in (f, g) if isinstance(s, GridSymbol)}
    if len(grids) > 1:
        raise RepresentationError("grid symbols must share one grid")
    if grids:
        gg = grids.pop()
        if grid is not None and grid != gg:
            raise RepresentationError("grid argument differs from the symbols' grid")
        grid = gg
        if max_order > grid.N // 4:
            raise SpectralOrderError(f"max_order {max_order} exceeds N/4 = {grid.N // 4}")
    if grid is None:
        raise RepresentationError("series mode for non-polynomial symbols needs a grid")

    coeffs = moyal_coefficients(theta, max_order)
    Df = _derivative_table(f, max_order, grid)
    Dg = _derivative_table(g, max_order, grid)
    total = np.zeros(grid.shape, dtype=complex)
    norms: List[float] = []
    for n, layer in enumerate(coeffs):
        term = np.zeros(grid.shape, dtype=complex)
        for (m, k), c in layer.items():
            term += c * _as_grid_values(Df[m], grid) * _as_grid_values(Dg[k], grid)
        if not np.all(np.isfinite(term)):
            raise NumericalError(f"non-finite series term at order {n}")
        total += term
        norms.append(float(np.max(np.abs(term))))
    bound = None
    # skip orders that vanish identically (e.g. odd orders of f * f)
    live = [t for t in norms if t > GRID_NOISE * max(norms)]
    if theta.is_zero:
        bound = 0.0
    elif len(live) >= 3:
        rho = live[-1] / live[-2]
        if rho < 1:
            bound = live[-1] * rho / (1 - rho)
    return SeriesResult(GridSymbol(grid, total), len(coeffs), norms, bound)


def _series_polynomial(f: PolynomialSymbol, g: PolynomialSymbol, theta: ThetaMatrix) -> SeriesResult:
    top = min(f.degree, g.degree)
    if top < 0:
        return SeriesResult(PolynomialSymbol(f.d), 1, [0.0], 0.0)
    coeffs = moyal_coefficients(theta, top)
    total = PolynomialSymbol(f.d)
    norms: List[float] = []
    last = 0
    for n, layer in enumerate(coeffs):
        term = PolynomialSymbol(f.d)
        for (m, k), c in layer.items():
            term = term + (f.derivative(m) * g.derivative(k)).scale(c)
        norms.append(term.coefficient_norm())
        if not term.is_zero:
            last = n
        total = total + term
    return SeriesResult(total, last + 1, norms[: last + 1], 0.0)


# ---------------------------------------------------------------------------
# closed Gaussian form
# ---------------------------------------------------------------------------

def gaussian_star(f: GaussianSymbol, g: GaussianSymbol, theta: ThetaMatrix) -> GaussianSymbol:
    """Exact product of two Gaussian symbols (any antisymmetric theta).

    Obtained by carrying out the Gaussian ``q`` integral of the integral form
    with ``f`` shifted by ``theta q / 2``.
    """
    d = f.d
    A, a, alpha = f.M, f.b, f.c
    G = gaussian_fourier(g)
    T = theta.entries / 2.0
    K = T.T @ A @ T + G.M
    Lm = 2.0 * T.T @ A + 1j * np.eye(d)
    l0 = G.b - T.T @ a
    Ki = np.linalg.inv(K)
    M = A - 0.25 * Lm.T @ Ki @ Lm
    b = a + 0.5 * Lm.T @ Ki @ l0
    logdet = np.sum(np.log(np.linalg.eigvals(K)))
    c = alpha + G.c + 0.25 * l0 @ Ki @ l0 + 0.5 * d * np.log(np.pi) - 0.5 * logdet - d * np.log(2 * np.pi)
    return GaussianSymbol(M, b, c)


# ---------------------------------------------------------------------------
# integral form
# ---------------------------------------------------------------------------

_BATCH_ELEMS = 2 ** 21
# spectra of sampled data carry a round-off floor near 1e-16 of their peak
GRID_NOISE = 1e-15


def _shifted_grid_batch(F: np.ndarray, grid: PhaseGrid, W: np.ndarray) -> np.ndarray:
    """``f(x - w)`` on the grid for each row ``w`` of ``W``; ``F`` is ``grid_dft(f)``."""
    p = grid.frequencies
    out_shape = (len(W),) + grid.shape
    ph = np.ones(out_shape, dtype=complex)
    for a in range(grid.d):
        e = np.exp(-1j * np.outer(W[:, a], p))
        e[:, 0] = np.cos(W[:, a] * p[0])  # Nyquist mode as cosine
        shape = [len(W)] + [1] * grid.d
        shape[a + 1] = grid.N
        ph = ph * e.reshape(shape)
    return grid_idft(F[None] * ph, grid)


def _evaluate_shifted(h: Symbol, grid: PhaseGrid, W: np.ndarray, cache) -> np.ndarray:
    """``h(x - w)`` for a batch of shifts, shape ``(len(W),) + grid.shape``."""
    if isinstance(h, GridSymbol):
        if "F" not in cache:
            cache["F"] = grid_dft(h.values, h.grid)
        return _shifted_grid_batch(cache["F"], grid, W)
    X = grid.points()
    if isinstance(h, GaussianSymbol):
        pts = X[None] - W.reshape((len(W),) + (1,) * grid.d + (grid.d,))
        return h.evaluate(pts)
    if isinstance(h, PolynomialSymbol):
        pts = X[None] - W.reshape((len(W),) + (1,) * grid.d + (grid.d,))
        return h.evaluate(pts)
    raise RepresentationError(f"cannot evaluate {type(h).__name__} off-grid")


def _gaussian_separable(h: GaussianSymbol, grid: PhaseGrid, Q: np.ndarray, W: np.ndarray,
                        K: np.ndarray) -> Optional[np.ndarray]:
    """Fast path for ``d = 2``: ``sum_q K_q h(x - w_q) exp(i q.x)`` as one matrix product.

    ``h(x - w) = h(x) exp(x.(2 M w)) exp(-w.M w - b.w)`` makes every term a
    product of per-axis factors.  Returns ``None`` when the split factors
    would leave the safe floating-point range.
    """
    if grid.d != 2:
        return None
    M, b = h.M, h.b
    V = 2.0 * W @ M.T + 1j * Q  # per-q exponent vector, multiplies x
    logc = np.log(K) - np.einsum("qi,ij,qj->q", W, M, W) - W @ b
    x = grid.axis
    # split the per-q factor evenly between the two axis matrices
    A1 = np.outer(V[:, 0], x) + 0.5 * logc[:, None]
    A2 = np.outer(V[:, 1], x) + 0.5 * logc[:, None]
    hx = h.log_evaluate(grid.points()).real
    if max(A1.real.max(), A2.real.max(), np.abs(hx).max()) > 690:
        return None
    S = np.exp(A1).T @ np.exp(A2)
    return h.evaluate_grid(grid) * S


def _polynomial_separable(h: PolynomialSymbol, grid: PhaseGrid, Q: np.ndarray, W: np.ndarray,
                          K: np.ndarray) -> Optional[np.ndarray]:
    if grid.d != 2:
        return None
    x = grid.axis
    out = np.zeros(grid.shape, dtype=complex)
    P1 = np.exp(1j * np.outer(Q[:, 0], x))
    P2 = np.exp(1j * np.outer(Q[:, 1], x))
    for (n1, n2), c in h.coeffs.items():
        A1 = (x[None, :] - W[:, 0:1]) ** n1 * P1
        A2 = (x[None, :] - W[:, 1:2]) ** n2 * P2
        out += c * ((A1 * K[:, None]).T @ A2)
    return out


def _integral_core(h: Symbol, spec: np.ndarray, theta_sign: float, theta: ThetaMatrix,
                   grid: PhaseGrid, freq_grid: PhaseGrid, cutoff: float) -> np.ndarray:
    """``(2 pi)^-d sum_q w spec(q) h(x - s theta q / 2) exp(i q.x)``."""
    d = grid.d
    absS = np.abs(spec)
    smax = absS.max()
    out = np.zeros(grid.shape, dtype=complex)
    if smax == 0:
        return out
    mask = absS > cutoff * smax
    Q = freq_grid.points()[mask]
    weight = freq_grid.cell_volume / (2 * np.pi) ** d
    K = spec[mask] * weight
    W = theta_sign * 0.5 * Q @ theta.entries.T
    fast = None
    if isinstance(h, GaussianSymbol):
        fast = _gaussian_separable(h, grid, Q, W, K)
    elif isinstance(h, PolynomialSymbol):
        fast = _polynomial_separable(h, grid, Q, W, K)
    if fast is not None:
        return fast
    cache: dict = {}
    step = max(1, _BATCH_ELEMS // int(np.prod(grid.shape)))
    for s in range(0, len(Q), step):
        q = Q[s:s + step]
        vals = _evaluate_shifted(h, grid, W[s:s + step], cache)
        phase = np.ones((len(q),) + (1,) * d, dtype=complex)
        for a in range(d):
            shape = [len(q)] + [1] * d
            shape[a + 1] = grid.N
            phase = phase * np.exp(1j * np.outer(q[:, a], grid.axis)).reshape(shape)
        out += np.tensordot(K[s:s + step], vals * phase, axes=(0, 0))
    return out


def _integrable(s: Symbol) -> bool:
    return isinstance(s, (GaussianSymbol, GridSymbol))


def star_integral(f: Symbol, g: Symbol, theta: ThetaMatrix, grid: PhaseGrid,
                  freq_grid: Optional[PhaseGrid] = None, cutoff: float = 1e-18) -> GridSymbol:
    """Star product by quadrature of the integral form, sampled on ``grid``.

    One factor may be a polynomial (it is evaluated exactly at the shifted
    points); the other must be integrable.  ``freq_grid`` overrides the
    quadrature nodes for the transformed factor (default: the dual grid).
    """
    if f.d != grid.d or g.d != grid.d or theta.d != grid.d:
        raise RepresentationError("symbol, theta and grid dimensions must agree")
    for s in (f, g):
        if isinstance(s, GridSymbol) and s.grid != grid:
            raise GridMismatchError(f"symbol grid {s.grid} differs from {grid}")
    if freq_grid is None:
        freq_grid = grid.dual()
    mirrored = isinstance(g, PolynomialSymbol) or (
        isinstance(f, GridSymbol) and isinstance(g, GaussianSymbol))
    if _integrable(g) and not mirrored:
        spec = spectrum_on(g, freq_grid)
        cut = max(cutoff, GRID_NOISE) if isinstance(g, GridSymbol) else cutoff
        vals = _integral_core(f, spec, 1.0, theta, grid, freq_grid, cut)
    elif _integrable(f) and mirrored:
        spec = spectrum_on(f, freq_grid)
        cut = max(cutoff, GRID_NOISE) if isinstance(f, GridSymbol) else cutoff
        vals = _integral_core(g, spec, -1.0, theta, grid, freq_grid, cut)
    else:
        raise RepresentationError(
            f"integral mode needs an integrable factor, got {type(f).__name__} and {type(g).__name__}"
        )
    if not np.all(np.isfinite(vals)):
        raise NumericalError("non-finite value in star-product quadrature")
    ratio = grid_boundary_ratio(vals)
    if ratio > WARN_TAIL:
        warnings.warn(f"product has boundary/peak ratio {ratio:.3g} on the grid",
                      GridTooSmallWarning, stacklevel=2)
    return GridSymbol(grid, vals, adequate=ratio < ADEQUATE_TAIL, boundary_ratio=ratio)


def moyal_commutator(f: Symbol, g: Symbol, theta: ThetaMatrix, mode: str = "series",
                     grid: Optional[PhaseGrid] = None, max_order: int = 8,
                     probe: Optional[Symbol] = None) -> Symbol:
    """``f * g - g * f``.

    In integral mode two polynomial factors cannot be transformed; pass an
    integrable ``probe`` ``h`` and the commutator is returned through its
    action ``f * (g * h) - g * (f * h)``, which equals ``[f, g] * h``.
    """
    if mode == "series":
        a = star_series(f, g, theta, max_order, grid).value
        b = star_series(g, f, theta, max_order, grid).value
        return a - b
    if mode != "integral":
        raise ValueError("mode must be 'series' or 'integral'")
    if grid is None:
        raise ValueError("integral mode needs a grid")
    if isinstance(f, PolynomialSymbol) and isinstance(g, PolynomialSymbol):
        if probe is None:
            raise RepresentationError("two polynomials in integral mode need an integrable probe")
        gh = star_integral(g, probe, theta, grid)
        fh = star_integral(f, probe, theta, grid)
        return star_integral(f, gh, theta, grid) - star_integral(g, fh, theta, grid)
    return star_integral(f, g, theta, grid) - star_integral(g, f, theta, grid)


__all__ = [
    "SeriesResult", "moyal_coefficients", "entire_coefficients", "spectral_derivatives",
    "star_series", "gaussian_star", "star_integral", "moyal_commutator",
]
