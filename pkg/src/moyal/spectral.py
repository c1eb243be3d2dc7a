"""Fourier transforms, twisted convolution and the symplectic bridge.

Convention: ``f^(p) = int f(x) exp(-i p.x) dx`` and
``f(x) = (2 pi)^-d int f^(p) exp(i p.x) dp``.  Every factor of ``2 pi``
that depends on this choice lives in this module.

A grid ``x_j = -L + j h`` is paired with the dual grid
``p_m = (pi / L)(m - N/2)``; the dual of the dual is the original grid.
"""
from __future__ import annotations

import math
import os
import warnings
from typing import Optional

import numpy as np
import scipy.fft as sfft

from .errors import (
    GridTooSmallWarning,
    GridMismatchError,
    RepresentationError,
    SingularThetaError,
)
from .symbols import (
    GaussianSymbol,
    GridSymbol,
    PhaseGrid,
    PolynomialSymbol,
    Symbol,
    ThetaMatrix,
)

FORWARD = "forward"
INVERSE = "inverse"


def fft_workers() -> int:
    """Worker count for FFTs, capped by ``MOYAL_THREADS`` (default 1)."""
    raw = os.environ.get("MOYAL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _checker(N: int, d: int, offset: int = 0) -> np.ndarray:
    """``(-1)**(sum_a (j_a - offset))`` on an ``N**d`` grid."""
    s = (-1.0) ** ((np.arange(N) - offset) % 2)
    out = np.ones(())
    for _ in range(d):
        out = np.multiply.outer(out, s)
    return out


def grid_dft(values: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """Trapezoid approximation of ``f^`` at the dual-grid nodes.

    Batched over leading axes.
    """
    d, N = grid.d, grid.N
    axes = tuple(range(-d, 0))
    sj = _checker(N, d)
    sm = _checker(N, d, N // 2)
    F = sfft.fftn(values * sj, axes=axes, workers=fft_workers())
    return grid.cell_volume * sm * F


def grid_idft(F: np.ndarray, grid: PhaseGrid) -> np.ndarray:
    """Inverse of :func:`grid_dft`; ``grid`` is the position grid."""
    d, N = grid.d, grid.N
    axes = tuple(range(-d, 0))
    sj = _checker(N, d)
    sm = _checker(N, d, N // 2)
    f = sfft.ifftn(F * sm, axes=axes, workers=fft_workers())
    return sj * f / grid.cell_volume


def gaussian_fourier(f: GaussianSymbol) -> GaussianSymbol:
    """Closed-form transform of ``exp(-x.A x + a.x + alpha)``."""
    A, a = f.M, f.b
    Ai = np.linalg.inv(A)
    d = f.d
    logdet = np.sum(np.log(np.linalg.eigvals(A)))
    c = f.c + 0.25 * a @ Ai @ a + 0.5 * d * np.log(np.pi) - 0.5 * logdet
    return GaussianSymbol(Ai / 4.0, -0.5j * Ai @ a, c)


def fourier(f: Symbol, direction: str = FORWARD) -> Symbol:
    """Fourier transform of a grid or Gaussian symbol.

    Grid symbols map between a grid and its dual; the inverse direction
    expects a symbol on a dual grid and returns one on the original grid.
    """
    if direction not in (FORWARD, INVERSE):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    if isinstance(f, PolynomialSymbol):
        raise RepresentationError("the transform of a polynomial is not a function")
    if isinstance(f, GaussianSymbol):
        F = gaussian_fourier(f)
        if direction == FORWARD:
            return F
        # inverse: (2 pi)^-d F(-x)
        return GaussianSymbol(F.M, -F.b, F.c - f.d * np.log(2 * np.pi))
    if isinstance(f, GridSymbol):
        if direction == FORWARD:
            return GridSymbol(f.grid.dual(), grid_dft(f.values, f.grid))
        target = f.grid.dual()
        return GridSymbol(target, grid_idft(f.values, target))
    raise RepresentationError(f"cannot transform {type(f).__name__}")


def spectrum_on(g: Symbol, freq_grid: PhaseGrid, grid: Optional[PhaseGrid] = None) -> np.ndarray:
    """Values of ``g^`` on the nodes of ``freq_grid``."""
    if isinstance(g, GaussianSymbol):
        return gaussian_fourier(g).evaluate_grid(freq_grid)
    if isinstance(g, GridSymbol):
        if freq_grid == g.grid.dual():
            return grid_dft(g.values, g.grid)
        return dft_at(g, [freq_grid.axis] * g.d)
    raise RepresentationError(f"no spectrum for {type(g).__name__}")


def dft_at(g: GridSymbol, freq_axes) -> np.ndarray:
    """Separable direct sum ``h^d sum_x g(x) exp(-i p.x)`` on a tensor grid of ``p``."""
    grid = g.grid
    res = g.values
    h = grid.spacing
    for a, pa in enumerate(freq_axes):
        E = h * np.exp(-1j * np.outer(pa, grid.axis))
        res = np.moveaxis(np.tensordot(E, res, axes=([1], [a])), 0, a)
    return res


# ---------------------------------------------------------------------------
# twisted convolution
# ---------------------------------------------------------------------------

def _grid_values(F: Symbol, grid: PhaseGrid) -> np.ndarray:
    if isinstance(F, GridSymbol):
        if F.grid != grid:
            raise GridMismatchError(f"{F.grid} vs {grid}")
        return F.values
    if isinstance(F, GaussianSymbol):
        return F.evaluate_grid(grid)
    raise RepresentationError(f"twisted convolution needs integrable symbols, got {type(F).__name__}")


def _extended_values(G: Symbol, grid: PhaseGrid) -> np.ndarray:
    """``G`` on the doubled grid ``[-2L, 2L)`` (zero outside the box for grid data)."""
    big = PhaseGrid(grid.d, 2 * grid.L, 2 * grid.N)
    if isinstance(G, GaussianSymbol):
        return G.evaluate_grid(big)
    vals = _grid_values(G, grid)
    out = np.zeros(big.shape, dtype=complex)
    sl = tuple(slice(grid.N // 2, grid.N // 2 + grid.N) for _ in range(grid.d))
    out[sl] = vals
    return out


def twisted_convolution(F: Symbol, G: Symbol, theta: ThetaMatrix, grid: PhaseGrid,
                        cutoff: float = 1e-18) -> GridSymbol:
    """``(F * G)(q) = int F(p) G(q - p) exp(i/2 q.theta p) dp`` on ``grid``.

    Direct trapezoid sum over the nodes ``p`` where ``|F(p)|`` exceeds
    ``cutoff`` times its maximum.
    """
    if theta.d != grid.d:
        raise GridMismatchError("theta and grid dimensions differ")
    for S in (F, G):
        if isinstance(S, GridSymbol) and S.grid != grid:
            raise GridMismatchError(f"symbol grid {S.grid} differs from {grid}")
    Fv = _grid_values(F, grid)
    Gx = _extended_values(G, grid)
    N, d = grid.N, grid.d
    ax = grid.axis
    th = theta.entries
    absF = np.abs(Fv)
    fmax = absF.max()
    out = np.zeros(grid.shape, dtype=complex)
    if fmax == 0:
        return GridSymbol(grid, out)
    idx = np.argwhere(absF > cutoff * fmax)
    w = grid.cell_volume
    for j in idx:
        p = ax[j]
        u = th @ p  # q.theta p = sum_a q_a u_a
        sl = tuple(slice(N - ja, 2 * N - ja) for ja in j)
        block = Gx[sl]
        if theta.is_zero:
            out += (w * Fv[tuple(j)]) * block
            continue
        phase = np.ones(())
        for a in range(d):
            phase = np.multiply.outer(phase, np.exp(0.5j * ax * u[a]))
        out += (w * Fv[tuple(j)]) * block * phase
    return GridSymbol(grid, out)


# ---------------------------------------------------------------------------
# symplectic transforms
# ---------------------------------------------------------------------------

def _signed_permutation(S: np.ndarray):
    """Return ``(perm, scale)`` if ``S`` has one nonzero per row/column."""
    d = S.shape[0]
    perm, scale = [], []
    for i in range(d):
        nz = np.flatnonzero(S[i])
        if len(nz) != 1:
            return None
        perm.append(int(nz[0]))
        scale.append(float(S[i, nz[0]]))
    if sorted(perm) != list(range(d)):
        return None
    return perm, np.array(scale)


def _spectrum_linear(g: GridSymbol, S: np.ndarray, out_grid: PhaseGrid) -> np.ndarray:
    """``g^(S xi)`` for every node ``xi`` of ``out_grid`` by direct summation."""
    grid = g.grid
    sp = _signed_permutation(S)
    h = grid.spacing
    if sp is not None:
        perm, scale = sp
        # p_i = scale_i * xi_{perm_i}; sum over x_i with p_i gives an axis in xi_{perm_i}
        res = g.values
        for i in range(grid.d):
            E = h * np.exp(-1j * scale[i] * np.outer(out_grid.axis, grid.axis))
            res = np.moveaxis(np.tensordot(E, res, axes=([1], [i])), 0, i)
        # axis i of res now indexes xi_{perm_i}; reorder so axis k indexes xi_k
        inv = np.argsort(perm)
        return np.transpose(res, inv)
    xi = out_grid.points().reshape(-1, grid.d)
    P = xi @ S.T
    x = grid.points().reshape(-1, grid.d)
    vals = g.values.reshape(-1)
    out = np.empty(len(P), dtype=complex)
    step = max(1, 2 ** 22 // max(1, len(x)))
    for s in range(0, len(P), step):
        out[s:s + step] = np.exp(-1j * P[s:s + step] @ x.T) @ vals * grid.cell_volume
    return out.reshape(out_grid.shape)


def symplectic_fourier(g: Symbol, theta: ThetaMatrix, sign: int = -1) -> Symbol:
    """Symplectic transforms ``int g(x) exp(-+2i x.theta^{-1} xi) dx``.

    ``sign=-1`` gives ``F_theta g(xi) = g^(2 theta^{-1} xi)`` and ``sign=+1``
    gives ``g^(-2 theta^{-1} xi)``.  Gaussian input yields a Gaussian;
    grid input yields samples on the same grid.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    if not theta.invertible:
        raise SingularThetaError("symplectic transform needs an invertible theta")
    S = (-2.0 * sign) * theta.inverse
    if isinstance(g, GaussianSymbol):
        return gaussian_fourier(g).linear_map(S)
    if isinstance(g, GridSymbol):
        reach = float(np.abs(S).sum(axis=1).max()) * g.grid.L
        if reach > g.grid.nyquist * (1 + 1e-9):
            warnings.warn(f"transform nodes reach frequency {reach:.3g} beyond the grid band "
                          f"{g.grid.nyquist:.3g}; see self_dual_grid", GridTooSmallWarning, stacklevel=2)
        return GridSymbol(g.grid, _spectrum_linear(g, S, g.grid))
    raise RepresentationError(f"symplectic transform needs an integrable symbol, got {type(g).__name__}")


def inversion_constant(theta: ThetaMatrix) -> float:
    """``c = pi**d det(theta)``.

    ``F_theta F_theta g = c g`` and ``Fbar_theta F_theta g = c g(-.)``; the two
    coincide on even symbols.
    """
    theta.require_inverse()
    return math.pi ** theta.d * theta.det


def self_dual_grid(theta: ThetaMatrix, N: int) -> PhaseGrid:
    """Grid on which ``xi -> 2 theta^{-1} xi`` maps the nodes onto the dual grid.

    For ``theta = theta0 J`` this is ``L = sqrt(pi N theta0 / 4)``; the
    symplectic transforms are then exact discrete Fourier transforms and a
    round trip loses nothing to aliasing.
    """
    theta.require_inverse()
    s = np.abs(np.linalg.eigvals(theta.entries)).max()
    return PhaseGrid(theta.d, math.sqrt(math.pi * N * s / 4.0), N)


def star_via_twisted(u, g: Symbol, theta: ThetaMatrix, side: str = "left",
                     grid: Optional[PhaseGrid] = None) -> GridSymbol:
    """Star product through twisted convolution at ``-4 theta^{-1}``.

    ``side='left'`` returns ``u * g`` and ``side='right'`` returns ``g * u``.
    ``u`` may be a symbol or a functional from :mod:`moyal.duality`.
    """
    from .duality import Functional, twisted_conv_functional

    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if not theta.invertible:
        raise SingularThetaError("the bridge needs an invertible theta")
    if grid is None:
        grid = next((s.grid for s in (u, g) if isinstance(s, GridSymbol)), None)
        if grid is None:
            raise ValueError("a grid is required when no grid symbol is supplied")
    bridge = theta.bridge()
    pref = 1.0 / inversion_constant(theta)
    Gt = symplectic_fourier(g, theta, -1 if side == "left" else 1)
    if isinstance(Gt, GridSymbol) and Gt.grid != grid:
        raise GridMismatchError("g must live on the output grid")
    if isinstance(u, Functional):
        res = twisted_conv_functional(u, Gt, bridge, side, grid)
    elif side == "left":
        res = twisted_convolution(u, Gt, bridge, grid)
    else:
        res = twisted_convolution(Gt, u, bridge, grid)
    return res.scale(pref)


def convolution(F: Symbol, G: Symbol, grid: PhaseGrid) -> GridSymbol:
    """Ordinary convolution on ``grid`` via zero-padded FFTs."""
    from scipy.signal import fftconvolve

    Fv = _grid_values(F, grid)
    Gv = _grid_values(G, grid)
    full = fftconvolve(Fv, Gv, mode="full") * grid.cell_volume
    # index i+j of the full result corresponds to x_i + x_j = -2L + (i+j)h
    sl = tuple(slice(grid.N // 2, grid.N // 2 + grid.N) for _ in range(grid.d))
    return GridSymbol(grid, full[sl])


__all__ = [
    "FORWARD", "INVERSE", "fourier", "gaussian_fourier", "grid_dft", "grid_idft",
    "spectrum_on", "dft_at", "twisted_convolution", "symplectic_fourier", "inversion_constant", "self_dual_grid",
    "star_via_twisted", "convolution", "fft_workers",
]
