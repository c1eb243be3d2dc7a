"""Gel'fand-Shilov norm estimates and coefficient diagnostics.

Norms are suprema over a finite range of derivative orders.  Each order's
supremum is taken on the grid and then polished by a short local search
around the best node, so that the estimate is insensitive to the grid
resolution.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from .errors import (
    DegenerateInputError,
    DivergentSeriesError,
    GridTooSmallWarning,
    RepresentationError,
    SpectralOrderError,
)
from .spectral import gaussian_fourier, grid_dft
from .starproduct import spectral_derivatives
from .symbols import (
    GaussianSymbol,
    GridSymbol,
    GSParams,
    Multiindex,
    PhaseGrid,
    PolynomialSymbol,
    Symbol,
    mi_power_log,
    multiindices,
    multiindices_upto,
    trig_interpolate,
)

REFINE_ROUNDS = 3
REFINE_POINTS = 21


@dataclass(frozen=True)
class NormEstimate:
    value: float
    n_max: int
    per_order: List[float]
    saturated: bool
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"params": dict(self.params), "n_max": self.n_max, "per_order": list(self.per_order),
                "value": self.value, "saturated": self.saturated}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NormEstimate":
        raw = json.loads(text)
        return cls(float(raw["value"]), int(raw["n_max"]), [float(v) for v in raw["per_order"]],
                   bool(raw["saturated"]), dict(raw.get("params", {})))


# ---------------------------------------------------------------------------
# derivative access
# ---------------------------------------------------------------------------

class _Derivs:
    """Uniform access to ``d^alpha f`` on the grid and at arbitrary points."""

    def __init__(self, f: Symbol, grid: PhaseGrid, n_max: int):
        if f.d != grid.d:
            raise RepresentationError("symbol and grid dimensions differ")
        if n_max > grid.N // 4:
            raise SpectralOrderError(f"n_max {n_max} exceeds N/4 = {grid.N // 4}")
        self.f, self.grid, self.n_max = f, grid, n_max
        if isinstance(f, GridSymbol):
            if f.grid != grid:
                raise RepresentationError("grid symbol lives on a different grid")
            self.table = spectral_derivatives(f, n_max)
        elif isinstance(f, GaussianSymbol):
            self.table = f.derivatives(grid.points(), n_max)
        elif isinstance(f, PolynomialSymbol):
            axes = [grid.axis] * grid.d
            self.table = {a: f.derivative(a).evaluate_axes(axes) for a in multiindices_upto(f.d, n_max)}
        else:
            raise RepresentationError(f"cannot differentiate {type(f).__name__}")

    def at(self, alpha: Multiindex, pts: np.ndarray) -> np.ndarray:
        f = self.f
        if isinstance(f, GaussianSymbol):
            return f.derivatives(pts, sum(alpha))[alpha]
        if isinstance(f, PolynomialSymbol):
            return f.derivative(alpha).evaluate(pts)
        return trig_interpolate(self.table[alpha], self.grid, pts)


def _uniform(pts: np.ndarray) -> np.ndarray:
    return np.max(np.abs(pts), axis=-1)


def _gs_logweight(params: GSParams) -> Callable[[np.ndarray], np.ndarray]:
    s = params.weight_sign
    if params.alpha == 0:
        def w(pts):
            r = _uniform(pts) / params.A
            return np.where(r <= 1, 0.0, s * np.inf)
        return w
    p = 1.0 / params.alpha

    def w(pts):
        return s * (_uniform(pts) / params.A) ** p
    return w


def _sup_norm(f: Symbol, grid: PhaseGrid, n_max: int, logweight, B: float, beta: float,
              refine: bool = True, floor_mask: bool = False) -> List[float]:
    """Per-order suprema ``max_{|n|=k} sup_x |d^n f| w(x) / (B^k n^(beta n))``."""
    D = _Derivs(f, grid, n_max)
    flat_pts = grid.points().reshape(-1, grid.d)
    lw = logweight(flat_pts)
    keep = None
    if floor_mask and isinstance(f, GridSymbol):
        # outside the numerical support a growing weight only amplifies round-off
        mag = np.abs(f.values).reshape(-1)
        keep = mag > 1e-13 * mag.max()
    h = grid.spacing
    per_order = []
    for k in range(n_max + 1):
        best, best_alpha, x0 = -np.inf, None, None
        for alpha in multiindices(grid.d, k):
            a = np.abs(D.table[alpha]).reshape(-1)
            if keep is not None:
                a = np.where(keep, a, 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                lv = np.log(a) + lw
            lv = np.where(np.isnan(lv), -np.inf, lv) - mi_power_log(alpha, beta)
            i = int(np.argmax(lv))
            if lv[i] > best:
                best, best_alpha, x0 = float(lv[i]), alpha, flat_pts[i]
        if refine and best_alpha is not None and np.isfinite(best):
            width = h
            shift = mi_power_log(best_alpha, beta)
            for _ in range(REFINE_ROUNDS):
                offs = np.linspace(-width, width, REFINE_POINTS)
                local = np.stack(np.meshgrid(*([offs] * grid.d), indexing="ij"), -1).reshape(-1, grid.d) + x0
                with np.errstate(divide="ignore", invalid="ignore"):
                    lv = np.log(np.abs(D.at(best_alpha, local))) + logweight(local) - shift
                lv = np.where(np.isnan(lv), -np.inf, lv)
                j = int(np.argmax(lv))
                if lv[j] > best:
                    best, x0 = float(lv[j]), local[j]
                width *= 2.0 / (REFINE_POINTS - 1)
        val = best - k * math.log(B)
        per_order.append(float(np.exp(val)) if val > -np.inf else 0.0)
    return per_order


def _estimate(per_order: List[float], n_max: int, params: dict) -> NormEstimate:
    value = float(max(per_order))
    saturated = n_max > 0 and per_order[-1] > max(per_order[:-1])
    return NormEstimate(value, n_max, per_order, bool(saturated), params)


def gs_norm(f: Symbol, params: GSParams, n_max: int, grid: PhaseGrid, refine: bool = True) -> NormEstimate:
    """``sup_{x, |n| <= n_max} |d^n f| exp(+-|x/A|^(1/alpha)) / (B^|n| n^(beta n))``.

    ``|x|`` is the uniform norm and ``0^0 = 1``.  ``weight_sign=-1`` gives the
    multiplier norm with a decaying weight.
    """
    per_order = _sup_norm(f, grid, n_max, _gs_logweight(params), params.B, params.beta,
                          refine=refine, floor_mask=params.weight_sign > 0)
    return _estimate(per_order, n_max, params.as_dict())


def decay_norm(f: Symbol, B: float, N_pow: int, n_max: int, grid: PhaseGrid, refine: bool = True) -> NormEstimate:
    """``sup (1 + |x|)^N |d^n f| / (B^|n| n^(n/2))`` over the grid and ``|n| <= n_max``."""
    if B <= 0:
        raise ValueError("B must be positive")

    def lw(pts):
        return N_pow * np.log1p(_uniform(pts))
    per_order = _sup_norm(f, grid, n_max, lw, B, 0.5, refine=refine, floor_mask=N_pow > 0)
    return _estimate(per_order, n_max, {"B": B, "N": N_pow})


def derivative_growth(f: Symbol, n_max: int, grid: PhaseGrid) -> Tuple[float, List[float]]:
    """Smallest ``B`` with ``s_n <= s_0 B^n`` for ``n <= n_max``.

    ``s_n = max_{|m| = n} sup |d^m f| / m^(m/2)`` is the order-``n`` stratum of
    the norm with ``n^(n/2)`` denominators.
    """
    s = _sup_norm(f, grid, n_max, lambda p: np.zeros(len(p)), 1.0, 0.5)
    B = max((s[n] / s[0]) ** (1.0 / n) for n in range(1, n_max + 1)) if n_max > 0 else 0.0
    return float(B), s


# ---------------------------------------------------------------------------
# weighted-integral inequality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class A1Result:
    lhs: float
    rhs: float
    holds: bool
    factor: float = math.sqrt(2)

    def as_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "factor": self.factor}


def _monomial_derivative(n: int, k: int) -> Tuple[float, int]:
    """``d^k x^n = coef * x^(n-k)``."""
    if k > n:
        return 0.0, 0
    return float(math.perm(n, k)), n - k


def _roots_1d(fun: Callable[[np.ndarray], np.ndarray], a: float, b: float, samples: int) -> List[float]:
    xs = np.linspace(a, b, samples)
    ys = fun(xs)
    roots = []
    for i in range(len(xs) - 1):
        if ys[i] == 0:
            roots.append(float(xs[i]))
        elif ys[i] * ys[i + 1] < 0:
            roots.append(float(brentq(lambda t: float(fun(np.array([t]))[0]), xs[i], xs[i + 1], xtol=1e-15)))
    return roots


def _gauss_legendre_1d(fun, breaks: Sequence[float], order: int = 48) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        if b <= a:
            continue
        # split long panels so each stays well resolved
        m = max(1, int(math.ceil((b - a) / 1.0)))
        edges = np.linspace(a, b, m + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            x = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
            total += 0.5 * (hi - lo) * float(np.sum(weights * fun(x)))
    return total


def lemma_A1_check(f: Symbol, k: Multiindex, n: Multiindex, grid: PhaseGrid,
                   factor: float = math.sqrt(2), rel_slack: float = 1e-6) -> A1Result:
    """Compare ``int |d^k x^n| |f|`` with ``factor * int |x^n| |d^k f|``.

    In one dimension both integrals use Gauss-Legendre panels split at the
    kinks of the integrands (the origin and the real zeros of ``f`` and
    ``d^k f``).  In higher dimension a tensor trapezoid rule on ``grid`` is
    used.
    """
    k = tuple(int(v) for v in np.atleast_1d(k))
    n = tuple(int(v) for v in np.atleast_1d(n))
    d = grid.d
    if len(k) != d or len(n) != d:
        raise ValueError("multiindices must match the grid dimension")
    order = sum(k)
    D = _Derivs(f, grid, min(max(order, 0), grid.N // 4))
    f0 = np.abs(D.table[(0,) * d])
    tail = 0.0
    for ax in range(d):
        tail = max(tail, float(np.max(np.take(f0, [0], axis=ax))))
    if f0.max() > 0 and tail > 1e-8 * f0.max():
        warnings.warn(f"symbol mass reaches the grid boundary (ratio {tail / f0.max():.3g})",
                      GridTooSmallWarning, stacklevel=2)

    mono = [_monomial_derivative(nj, kj) for nj, kj in zip(n, k)]
    if d == 1 and not isinstance(f, GridSymbol):
        (cm, pm), = mono
        L = grid.L
        g0 = lambda x: D.at((0,), x[:, None])
        gk = lambda x: D.at(k, x[:, None])
        breaks = {-L, L, 0.0}
        for fun in (g0, gk):
            probe = fun(np.linspace(-L, L, 64))
            if np.max(np.abs(np.imag(probe))) <= 1e-14 * max(1e-300, np.max(np.abs(probe))):
                breaks.update(_roots_1d(lambda x, fun=fun: np.real(fun(x)), -L, L, 4 * grid.N))
        breaks = sorted(breaks)
        lhs = 0.0 if cm == 0 else _gauss_legendre_1d(lambda x: cm * np.abs(x) ** pm * np.abs(g0(x)), breaks)
        rhs = factor * _gauss_legendre_1d(lambda x: np.abs(x) ** n[0] * np.abs(gk(x)), breaks)
    else:
        axes = [grid.axis] * d
        w_l = np.ones(())
        w_r = np.ones(())
        for (cm, pm), nj, a in zip(mono, n, axes):
            w_l = np.multiply.outer(w_l, cm * np.abs(a) ** pm if cm else np.zeros_like(a))
            w_r = np.multiply.outer(w_r, np.abs(a) ** nj)
        vol = grid.cell_volume
        lhs = float(np.sum(w_l * f0) * vol)
        rhs = factor * float(np.sum(w_r * np.abs(D.table[k])) * vol)
    return A1Result(float(lhs), float(rhs), bool(lhs <= rhs * (1 + rel_slack)), factor)


# ---------------------------------------------------------------------------
# Fourier bound
# ---------------------------------------------------------------------------

def fourier_r(alpha: float, beta: float, d: int, margin: float = 1.01) -> float:
    """``margin * max((alpha d / e)^alpha, 2 (e / beta)^beta)`` with ``0^0 = 1``."""
    t1 = (alpha * d / math.e) ** alpha if alpha > 0 else 1.0
    t2 = 2.0 * (math.e / beta) ** beta if beta > 0 else 2.0
    return margin * max(t1, t2)


@dataclass(frozen=True)
class FourierBoundResult:
    ratio: float
    r_used: float
    norm_f: float
    norm_fhat: float

    def as_dict(self) -> dict:
        return {"ratio": self.ratio, "r_used": self.r_used, "norm_f": self.norm_f, "norm_fhat": self.norm_fhat}


def fourier_bound_check(f: Symbol, params: GSParams, n_max: int,
                        grids: Union[PhaseGrid, Tuple[PhaseGrid, PhaseGrid]]) -> FourierBoundResult:
    """Ratio of the transformed norm (indices swapped, constants ``rB, rA``) to the original norm.

    ``grids`` is the position grid, or a pair ``(x_grid, p_grid)``; by
    default the transform is examined on the dual grid.
    """
    if params.weight_sign != 1:
        raise ValueError("the Fourier bound concerns the test-function norm (weight_sign=+1)")
    if isinstance(grids, PhaseGrid):
        xg, pg = grids, grids.dual()
    else:
        xg, pg = grids
    r = fourier_r(params.alpha, params.beta, xg.d)
    nf = gs_norm(f, params, n_max, xg).value
    if not nf > 0:
        raise DegenerateInputError("the symbol has zero norm")
    if isinstance(f, GaussianSymbol):
        fh = gaussian_fourier(f)
    elif isinstance(f, GridSymbol):
        if pg != xg.dual():
            raise RepresentationError("sampled symbols are transformed onto the dual grid only")
        fh = GridSymbol(pg, grid_dft(f.values, f.grid))
    else:
        raise RepresentationError("polynomials have no function transform")
    swapped = GSParams(params.beta, params.alpha, r * params.B, r * params.A, 1)
    nfh = gs_norm(fh, swapped, n_max, pg).value
    return FourierBoundResult(float(nfh / nf), float(r), float(nf), float(nfh))


# ---------------------------------------------------------------------------
# entire-function coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EntireCoeffResult:
    satisfies: bool
    C_fit: float
    b_fit: float
    b_lower: float = float("nan")
    b_upper: float = float("nan")

    def as_dict(self) -> dict:
        return {"satisfies": self.satisfies, "C_fit": self.C_fit, "b_fit": self.b_fit,
                "b_lower": self.b_lower, "b_upper": self.b_upper}


MIN_ORDERS_FOR_TREND = 6


def _order_envelope(coeffs: Mapping[Multiindex, complex]) -> Dict[int, float]:
    """``max_{|n| = k} log(|c_n| n^(n/2))`` for each order ``k`` present."""
    env: Dict[int, float] = {}
    for n, c in coeffs.items():
        if c == 0:
            continue
        n = tuple(np.atleast_1d(n))
        y = math.log(abs(c)) + mi_power_log(n, 0.5)
        k = int(sum(n))
        env[k] = max(env.get(k, -math.inf), y)
    return env


def _slope_b(orders: Sequence[int], ys: Sequence[float]) -> float:
    half = np.asarray(orders, float) / 2.0
    if len(set(half)) < 2:
        return float("nan")
    slope = np.polyfit(half, np.asarray(ys, float), 1)[0]
    return float(math.exp(slope))


def entire_coeff_check(coeffs: Mapping[Multiindex, complex], ratio_tol: float = 2.0) -> EntireCoeffResult:
    """Fit ``|c_n| <= C (b / n)^(n/2)`` to a finite coefficient family.

    ``b_fit`` is the least-squares growth rate over the upper half of the
    orders present and ``C_fit`` the smallest constant making the bound hold
    for every coefficient with that ``b``.  Any finite family obeys some
    bound, so ``satisfies`` asks whether the family looks like a truncation of
    an entire function of order two and finite type: the rate fitted on the
    lower half of the orders must agree with the upper-half rate within
    ``ratio_tol``.  Families spanning fewer than six orders pass trivially.
    """
    if not coeffs:
        raise DegenerateInputError("empty coefficient map")
    env = _order_envelope(coeffs)
    if not env:
        return EntireCoeffResult(True, 0.0, 0.0)
    orders = sorted(env)
    ys = [env[k] for k in orders]
    if len(orders) == 1:
        k = orders[0]
        b = 1.0
        C = math.exp(ys[0] - 0.5 * k * math.log(b))
        return EntireCoeffResult(True, C, b, b, b)
    half = len(orders) // 2
    b_up = _slope_b(orders[half:] if len(orders) - half >= 2 else orders, ys[half:] if len(orders) - half >= 2 else ys)
    b_lo = _slope_b(orders[: max(half, 2)], ys[: max(half, 2)])
    b_fit = b_up
    C = max(math.exp(y - 0.5 * k * math.log(b_fit)) for k, y in zip(orders, ys))
    if len(orders) < MIN_ORDERS_FOR_TREND:
        ok = True
    else:
        r = b_up / b_lo
        ok = (1.0 / ratio_tol) <= r <= ratio_tol
    return EntireCoeffResult(bool(ok), float(C), float(b_fit), float(b_lo), float(b_up))


def truncation_order(B: float, b: float, C_pref: float, tol: float) -> int:
    """Smallest ``M`` with ``C (B sqrt(2b))^(M+1) / (1 - B sqrt(2b)) <= tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = B * math.sqrt(2.0 * b)
    if not q < 1:
        raise DivergentSeriesError(f"B sqrt(2b) = {q:.6g} >= 1: no geometric tail bound")
    if C_pref <= 0 or q == 0:
        return 0

    def tail(M):
        return C_pref * q ** (M + 1) / (1 - q)
    M = max(0, int(math.ceil(math.log(tol * (1 - q) / C_pref) / math.log(q) - 1)))
    while M > 0 and tail(M - 1) <= tol:
        M -= 1
    while tail(M) > tol:
        M += 1
    return M


__all__ = [
    "NormEstimate", "gs_norm", "decay_norm", "derivative_growth", "A1Result", "lemma_A1_check",
    "fourier_r", "FourierBoundResult", "fourier_bound_check", "EntireCoeffResult",
    "entire_coeff_check", "truncation_order",
]
