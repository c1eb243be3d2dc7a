"""Functionals with exact pairing rules and the duality extension of the product.

Four functionals are supported:

``Delta(xi)``                 ``f -> a f(xi)``
``PlaneWave(k)``              ``f -> a int f(x) exp(i k.x) dx = a f^(-k)``
``One``                       ``f -> a int f dx``
``PolyGaussianDensity(p, G)`` ``f -> int p G f dx``

Pairings with Gaussian and polynomial symbols are closed form; grid symbols
use the trapezoid rule.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import GridTooSmallWarning, NormalizationError, RepresentationError
from .spectral import gaussian_fourier, twisted_convolution
from .starproduct import star_integral
from .symbols import (
    GaussianSymbol,
    GridSymbol,
    PhaseGrid,
    PolynomialSymbol,
    Symbol,
    ThetaMatrix,
    grid_boundary_ratio,
    multiindices_upto,
    sample,
)


class Functional:
    d: int

    def conj(self) -> "Functional":  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Delta(Functional):
    xi: np.ndarray
    amplitude: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "xi", np.atleast_1d(np.asarray(self.xi, dtype=float)))
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def d(self) -> int:
        return len(self.xi)

    def conj(self) -> "Delta":
        return Delta(self.xi, np.conj(self.amplitude))


@dataclass(frozen=True, eq=False)
class PlaneWave(Functional):
    k: np.ndarray
    amplitude: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "k", np.atleast_1d(np.asarray(self.k, dtype=float)))
        object.__setattr__(self, "amplitude", complex(self.amplitude))

    @property
    def d(self) -> int:
        return len(self.k)

    def conj(self) -> "PlaneWave":
        return PlaneWave(-self.k, np.conj(self.amplitude))


@dataclass(frozen=True, eq=False)
class One(Functional):
    d: int
    amplitude: complex = 1.0

    def conj(self) -> "One":
        return One(self.d, np.conj(self.amplitude))


@dataclass(frozen=True, eq=False)
class PolyGaussianDensity(Functional):
    p: PolynomialSymbol
    G: GaussianSymbol

    def __post_init__(self):
        if self.p.d != self.G.d:
            raise RepresentationError("polynomial and Gaussian dimensions differ")

    @property
    def d(self) -> int:
        return self.G.d

    def conj(self) -> "PolyGaussianDensity":
        return PolyGaussianDensity(self.p.conj(), self.G.conj())

    def density(self, grid: PhaseGrid) -> GridSymbol:
        vals = self.p.evaluate_axes([grid.axis] * grid.d) * self.G.evaluate_grid(grid)
        return GridSymbol(grid, vals)


# ---------------------------------------------------------------------------
# Gaussian moment integrals
# ---------------------------------------------------------------------------

def poly_gauss_integral(p: PolynomialSymbol, M: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``int p(x) exp(-x.M x + B_r.x + C_r) dx`` for every row ``r``.

    Moments come from integrating ``d_i(x^a e^phi)`` by parts:
    ``sum_j M_ij m_{a+e_j} = (B_i m_a + a_i m_{a-e_i}) / 2``.
    """
    M = np.asarray(M, dtype=complex)
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    C = np.asarray(C, dtype=complex).reshape(-1)
    d = M.shape[0]
    Mi = np.linalg.inv(M)
    logZ = (0.5 * d * np.log(np.pi) - 0.5 * np.sum(np.log(np.linalg.eigvals(M)))
            + 0.25 * np.einsum("ri,ij,rj->r", B, Mi, B) + C)
    Z = np.exp(logZ)
    deg = max(p.degree, 0)
    mom = {(0,) * d: np.ones(len(B), dtype=complex)}
    for alpha in multiindices_upto(d, deg):
        if sum(alpha) == 0:
            continue
        j = next(i for i, k in enumerate(alpha) if k > 0)
        prev = list(alpha)
        prev[j] -= 1
        prev = tuple(prev)
        rhs = B * mom[prev][:, None]
        for i in range(d):
            if prev[i] > 0:
                pm = list(prev)
                pm[i] -= 1
                rhs[:, i] = rhs[:, i] + prev[i] * mom[tuple(pm)]
        mom[alpha] = 0.5 * (rhs @ Mi.T)[:, j]
    acc = np.zeros(len(B), dtype=complex)
    for n, c in p.coeffs.items():
        acc = acc + c * mom[n]
    return Z * acc


def _pair_gaussian_batch(u: Functional, M, B, C) -> np.ndarray:
    """Pair ``u`` with ``exp(-x.M x + B_r.x + C_r)`` for each row ``r``."""
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    C = np.asarray(C, dtype=complex).reshape(-1)
    d = B.shape[1]
    one = PolynomialSymbol.constant(d)
    if isinstance(u, Delta):
        xi = u.xi
        return u.amplitude * np.exp(-xi @ M @ xi + B @ xi + C)
    if isinstance(u, PlaneWave):
        return u.amplitude * poly_gauss_integral(one, M, B + 1j * u.k[None, :], C)
    if isinstance(u, One):
        return u.amplitude * poly_gauss_integral(one, M, B, C)
    if isinstance(u, PolyGaussianDensity):
        G = u.G
        return poly_gauss_integral(u.p, M + G.M, B + G.b[None, :], C + G.c)
    raise RepresentationError(f"unknown functional {type(u).__name__}")


def _quadrature_weights(f: GridSymbol) -> float:
    ratio = grid_boundary_ratio(f.values)
    if ratio > 1e-8:
        warnings.warn(f"grid symbol has boundary/peak ratio {ratio:.3g}; pairing truncates its tail",
                      GridTooSmallWarning, stacklevel=3)
    return f.grid.cell_volume


def pair(u: Functional, f: Symbol) -> complex:
    """The value ``<u, f>``."""
    if u.d != f.d:
        raise RepresentationError("functional and symbol dimensions differ")
    if isinstance(f, GaussianSymbol):
        return complex(_pair_gaussian_batch(u, f.M, f.b[None, :], np.array([f.c]))[0])
    if isinstance(f, PolynomialSymbol):
        if isinstance(u, Delta):
            return complex(u.amplitude * f.evaluate(u.xi[None, :])[0])
        if isinstance(u, PolyGaussianDensity):
            G = u.G
            return complex(poly_gauss_integral(u.p * f, G.M, G.b[None, :], np.array([G.c]))[0])
        raise RepresentationError(f"{type(u).__name__} cannot be paired with a polynomial")
    if isinstance(f, GridSymbol):
        if isinstance(u, Delta):
            return complex(u.amplitude * f.evaluate(u.xi[None, :])[0])
        grid = f.grid
        if isinstance(u, PlaneWave):
            w = _quadrature_weights(f)
            ph = np.exp(1j * grid.points() @ u.k)
            return complex(u.amplitude * np.sum(f.values * ph) * w)
        if isinstance(u, One):
            w = _quadrature_weights(f)
            return complex(u.amplitude * np.sum(f.values) * w)
        if isinstance(u, PolyGaussianDensity):
            return complex(np.sum(u.density(grid).values * f.values) * grid.cell_volume)
    raise RepresentationError(f"cannot pair {type(u).__name__} with {type(f).__name__}")


def as_symbol(u: PolyGaussianDensity, grid: PhaseGrid) -> GridSymbol:
    """The density of a regular functional, sampled on ``grid``."""
    return u.density(grid)


# ---------------------------------------------------------------------------
# transforms of functionals
# ---------------------------------------------------------------------------

def _density_fourier(p: PolynomialSymbol, G: GaussianSymbol) -> PolyGaussianDensity:
    """Transform of ``p G`` as polynomial times Gaussian: ``(x^n G)^ = (i d_p)^n G^``."""
    Gh = gaussian_fourier(G)
    d = G.d
    # d^alpha G^ = P_alpha G^ with P_{a+e_j} = g_j P_a + d_j P_a, g = b - 2 M p
    gvec = []
    for j in range(d):
        lin = {(0,) * d: Gh.b[j]}
        for i in range(d):
            e = [0] * d
            e[i] = 1
            lin[tuple(e)] = lin.get(tuple(e), 0) - 2 * Gh.M[j, i]
        gvec.append(PolynomialSymbol(d, lin))
    P = {(0,) * d: PolynomialSymbol.constant(d)}
    top = max(p.degree, 0)
    for alpha in multiindices_upto(d, top):
        if sum(alpha) == 0:
            continue
        j = next(i for i, k in enumerate(alpha) if k > 0)
        prev = list(alpha)
        prev[j] -= 1
        prev = tuple(prev)
        e = [0] * d
        e[j] = 1
        P[alpha] = gvec[j] * P[prev] + P[prev].derivative(tuple(e))
    out = PolynomialSymbol(d)
    for n, c in p.coeffs.items():
        out = out + P[n].scale(c * 1j ** sum(n))
    return PolyGaussianDensity(out, Gh)


def fourier_functional(u: Functional) -> Functional:
    """The functional ``f -> <u, f^>``."""
    d = u.d
    if isinstance(u, Delta):
        return PlaneWave(-u.xi, u.amplitude)
    if isinstance(u, PlaneWave):
        return Delta(u.k, (2 * np.pi) ** d * u.amplitude)
    if isinstance(u, One):
        return Delta(np.zeros(d), (2 * np.pi) ** d * u.amplitude)
    if isinstance(u, PolyGaussianDensity):
        return _density_fourier(u.p, u.G)
    raise RepresentationError(f"unknown functional {type(u).__name__}")


# ---------------------------------------------------------------------------
# products with functionals
# ---------------------------------------------------------------------------

def star_functional(u: Functional, f: Symbol, theta: ThetaMatrix, side: str, g_probe: Symbol,
                    grid: PhaseGrid) -> complex:
    """``<u * f, g>`` (left) or ``<f * u, g>`` (right) through the duality rules.

    ``<u * f, g> = <u, f * g>`` and ``<f * u, g> = <u, g * f>``; the inner
    product is computed in integral mode.
    """
    if side == "left":
        inner = star_integral(f, g_probe, theta, grid)
    elif side == "right":
        inner = star_integral(g_probe, f, theta, grid)
    else:
        raise ValueError("side must be 'left' or 'right'")
    return pair(u, inner)


def twisted_conv_functional(v: Functional, g: Symbol, theta: ThetaMatrix, side: str,
                            grid: PhaseGrid) -> GridSymbol:
    """``<v, g(q - .) exp(+-(i/2) q.theta .)>`` at every node ``q`` of ``grid``.

    The ``+`` sign (``side='left'``) gives ``v * g`` and the ``-`` sign gives
    ``g * v`` for the twisted convolution with matrix ``theta``.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    s = 1.0 if side == "left" else -1.0
    Q = grid.points().reshape(-1, grid.d)
    th = theta.entries
    if isinstance(g, GaussianSymbol):
        M, b, c = g.M, g.b, g.c
        # g(q - r) exp(s i/2 q.theta r) as a Gaussian in r
        B = 2 * Q @ M.T - b[None, :] + s * 0.5j * Q @ th
        C = -np.einsum("qi,ij,qj->q", Q, M, Q) + Q @ b + c
        vals = _pair_gaussian_batch(v, M, B, C)
        return GridSymbol(grid, vals.reshape(grid.shape))
    if isinstance(g, GridSymbol):
        if isinstance(v, Delta):
            shifted = g.evaluate(Q - v.xi[None, :])
            phase = np.exp(s * 0.5j * (Q @ th) @ v.xi)
            return GridSymbol(grid, (v.amplitude * shifted * phase).reshape(grid.shape))
        if isinstance(v, PolyGaussianDensity):
            dens = v.density(grid)
            if side == "left":
                return twisted_convolution(dens, g, theta, grid)
            return twisted_convolution(g, dens, theta, grid)
    raise RepresentationError(f"no exact rule for {type(v).__name__} against {type(g).__name__}")


def involute(u: Union[Functional, Symbol]):
    """The involution: pointwise conjugation of symbols, ``<u*, f> = conj <u, f*>``."""
    if isinstance(u, (Functional, Symbol)):
        return u.conj()
    raise RepresentationError(f"cannot involute {type(u).__name__}")


# ---------------------------------------------------------------------------
# approximation of the identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproxIdentityResult:
    nu: float
    err: float
    omega_check: float

    def as_dict(self) -> dict:
        return {"nu": self.nu, "err": self.err, "omega_check": self.omega_check}


def approx_identity_error(f: Symbol, e: GaussianSymbol, nu: float, theta: ThetaMatrix,
                          side: str, grid: PhaseGrid) -> ApproxIdentityResult:
    """Sup-norm distance between ``f * e_nu`` (or ``e_nu * f``) and ``f``.

    ``e_nu(x) = e(x / nu)``.  The transform of ``e_nu`` is concentrated in
    ``|q| ~ 1/nu``, so its quadrature uses the dual grid contracted by ``nu``.
    ``omega_check`` is ``|int omega_nu - 1|`` with
    ``omega_nu(q) = (nu / 2 pi)^d e^(nu q)`` on that grid.
    """
    if not isinstance(e, GaussianSymbol):
        raise RepresentationError("the approximating symbol must be Gaussian")
    if nu < 1:
        raise ValueError("nu must be >= 1")
    e0 = complex(e.evaluate(np.zeros((1, e.d)))[0])
    if abs(e0 - 1) > 1e-12:
        raise NormalizationError(f"e(0) = {e0}, expected 1")
    e_nu = e.dilate(nu)
    fgrid = grid.dual().scaled(1.0 / nu)
    eh = gaussian_fourier(e)
    omega = (nu / (2 * np.pi)) ** e.d * eh.evaluate(nu * fgrid.points())
    omega_check = abs(np.sum(omega) * fgrid.cell_volume - 1)
    edge = np.abs(eh.evaluate(np.array([[grid.dual().L] + [0.0] * (e.d - 1)])))[0]
    if edge > 1e-6 * np.abs(eh.evaluate(np.zeros((1, e.d))))[0]:
        warnings.warn("frequency grid truncates the transform of e", GridTooSmallWarning, stacklevel=2)
    if side == "right":
        prod = star_integral(f, e_nu, theta, grid, freq_grid=fgrid)
    elif side == "left":
        prod = star_integral(e_nu, f, theta, grid)
    else:
        raise ValueError("side must be 'left' or 'right'")
    fv = sample(f, grid).values
    err = float(np.max(np.abs(prod.values - fv)))
    return ApproxIdentityResult(float(nu), err, float(omega_check))


def log_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


def monotone_onset(nus: Sequence[float], errs: Sequence[float]) -> Optional[float]:
    """Smallest ``nu`` after which the error decreases monotonically."""
    errs = list(errs)
    for i in range(len(errs)):
        if all(errs[j + 1] < errs[j] for j in range(i, len(errs) - 1)):
            return float(nus[i])
    return None


__all__ = [
    "Functional", "Delta", "PlaneWave", "One", "PolyGaussianDensity", "pair", "poly_gauss_integral",
    "fourier_functional", "star_functional", "twisted_conv_functional", "involute",
    "ApproxIdentityResult", "approx_identity_error", "log_slope", "monotone_onset", "as_symbol",
]
