"""Phase-space symbols, the noncommutativity matrix and sampling grids.

A symbol is one of three concrete forms:

* :class:`GridSymbol` -- samples on a periodic :class:`PhaseGrid`,
* :class:`PolynomialSymbol` -- a finite sum ``sum c_n x**n``,
* :class:`GaussianSymbol` -- ``exp(-x.M x + b.x + c)``.

All objects are immutable; arrays are copied and flagged read-only on
construction.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    ConstructionError,
    GridMismatchError,
    GridTooSmallWarning,
    RepresentationError,
    SingularThetaError,
)

Multiindex = Tuple[int, ...]

ADEQUATE_TAIL = 1e-14
WARN_TAIL = 1e-6


def _frozen(a, dtype=None) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# theta
# ---------------------------------------------------------------------------

def symplectic_unit(d: int) -> np.ndarray:
    """Block-diagonal matrix with ``[[0, 1], [-1, 0]]`` blocks."""
    if d < 2 or d % 2:
        raise ConstructionError(f"dimension must be even and >= 2, got {d}")
    J = np.zeros((d, d))
    for k in range(0, d, 2):
        J[k, k + 1] = 1.0
        J[k + 1, k] = -1.0
    return J


@dataclass(frozen=True, eq=False)
class ThetaMatrix:
    """Real antisymmetric ``d x d`` matrix with optional inverse.

    Use :func:`make_theta` rather than calling the constructor directly.
    """

    entries: np.ndarray
    inverse: Optional[np.ndarray]
    det: float

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @property
    def invertible(self) -> bool:
        return self.inverse is not None

    @property
    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def require_inverse(self) -> np.ndarray:
        if self.inverse is None:
            raise SingularThetaError("theta is singular; operation needs its inverse")
        return self.inverse

    def bridge(self) -> "ThetaMatrix":
        """The dual matrix ``-4 theta^{-1}`` governing the transformed product."""
        return make_theta(entries=-4.0 * self.require_inverse(), inverse=True)

    def scaled(self, factor: float) -> "ThetaMatrix":
        return make_theta(entries=factor * self.entries)

    def __repr__(self) -> str:
        return f"ThetaMatrix(d={self.d}, entries={self.entries.tolist()}, det={self.det:.6g})"


def make_theta(
    d: Optional[int] = None,
    theta0: Optional[float] = None,
    entries=None,
    inverse: Union[bool, str] = "auto",
) -> ThetaMatrix:
    """Build a validated :class:`ThetaMatrix`.

    Either ``d`` and ``theta0`` (canonical form ``theta0 * J``) or explicit
    ``entries`` must be supplied. ``inverse`` may be ``"auto"`` (computed
    when the matrix is nonsingular), ``True`` (required) or ``False``.
    """
    if entries is None:
        if d is None or theta0 is None:
            raise ConstructionError("need either (d, theta0) or explicit entries")
        th = float(theta0) * symplectic_unit(int(d))
    else:
        th = np.asarray(entries, dtype=float)
        if th.ndim != 2 or th.shape[0] != th.shape[1]:
            raise ConstructionError(f"theta must be square, got shape {th.shape}")
        if d is not None and th.shape[0] != d:
            raise ConstructionError("entries do not match the requested dimension")
        if th.shape[0] < 2 or th.shape[0] % 2:
            raise ConstructionError(f"dimension must be even and >= 2, got {th.shape[0]}")
        scale = max(1.0, float(np.max(np.abs(th))))
        if np.max(np.abs(th + th.T)) > 1e-14 * scale:
            raise ConstructionError("theta must be antisymmetric")
        th = 0.5 * (th - th.T)
    if not np.all(np.isfinite(th)):
        raise ConstructionError("theta entries must be finite")

    det = float(np.linalg.det(th)) if th.size else 0.0
    scale = float(np.max(np.abs(th))) if th.size else 0.0
    singular = scale == 0.0 or abs(det) <= 1e-13 * scale ** th.shape[0]
    inv = None
    if inverse is True and singular:
        raise SingularThetaError("theta is singular but an inverse was requested")
    if inverse in (True, "auto") and not singular:
        inv = np.linalg.inv(th)
        inv = 0.5 * (inv - inv.T)
        if np.max(np.abs(th @ inv - np.eye(th.shape[0]))) > 1e-12:
            if inverse is True:
                raise SingularThetaError("theta is too ill-conditioned to invert")
            inv = None
    if singular:
        det = 0.0
    return ThetaMatrix(_frozen(th, float), None if inv is None else _frozen(inv, float), det)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseGrid:
    """Uniform periodic grid on ``[-L, L)^d`` with ``N`` nodes per axis."""

    d: int
    L: float
    N: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ConstructionError(f"grid dimension must be a positive integer, got {self.d}")
        if int(self.N) != self.N or self.N < 2 or (self.N & (self.N - 1)):
            raise ConstructionError(f"N must be a power of two >= 2, got {self.N}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ConstructionError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def spacing(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def axis(self) -> np.ndarray:
        return -self.L + self.spacing * np.arange(self.N)

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.d

    @property
    def nyquist(self) -> float:
        """Largest frequency of the dual grid, ``pi N / (2L)``."""
        return math.pi * self.N / (2.0 * self.L)

    @property
    def frequencies(self) -> np.ndarray:
        """Axis of the dual grid, spacing ``pi / L``, ordered from ``-nyquist``."""
        return self.dual().axis

    def dual(self) -> "PhaseGrid":
        return PhaseGrid(self.d, self.nyquist, self.N)

    def scaled(self, factor: float) -> "PhaseGrid":
        return PhaseGrid(self.d, self.L * factor, self.N)

    def mesh(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.d), indexing="ij"))

    def points(self) -> np.ndarray:
        """Node coordinates, shape ``(N,)*d + (d,)``."""
        return np.stack(self.mesh(), axis=-1)

    def uniform_norm(self) -> np.ndarray:
        """``max_j |x_j|`` at every node."""
        return np.max(np.abs(self.points()), axis=-1)


# ---------------------------------------------------------------------------
# multiindex helpers
# ---------------------------------------------------------------------------

def multiindices(d: int, order: int) -> Iterable[Multiindex]:
    """All multiindices of length ``d`` with ``|n| == order``, lexicographic."""
    if d == 1:
        yield (order,)
        return
    for first in range(order, -1, -1):
        for rest in multiindices(d - 1, order - first):
            yield (first,) + rest


def multiindices_upto(d: int, order: int) -> Iterable[Multiindex]:
    for k in range(order + 1):
        yield from multiindices(d, k)


def mi_power_log(n: Multiindex, beta: float) -> float:
    """``log(n**(beta*n))`` with ``0**0 = 1``."""
    return float(sum(beta * k * math.log(k) for k in n if k > 0))


def parse_multiindex(key: str) -> Multiindex:
    try:
        return tuple(int(s) for s in key.split(","))
    except ValueError as exc:
        raise ConstructionError(f"bad multiindex key {key!r}") from exc


def format_multiindex(n: Multiindex) -> str:
    return ",".join(str(int(k)) for k in n)


def _as_points(x, d: int) -> Tuple[np.ndarray, Tuple[int, ...]]:
    x = np.asarray(x)
    if x.ndim == 0 or x.shape[-1] != d:
        if d == 1:
            x = x[..., None]
        else:
            raise ConstructionError(f"points must have trailing dimension {d}")
    lead = x.shape[:-1]
    return x.reshape(-1, d), lead


# ---------------------------------------------------------------------------
# symbols
# ---------------------------------------------------------------------------

class Symbol:
    """Common interface of the three symbol variants."""

    d: int

    def __call__(self, x) -> np.ndarray:
        return self.evaluate(x)

    def evaluate(self, x) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def conj(self) -> "Symbol":  # pragma: no cover - abstract
        raise NotImplementedError

    def scale(self, lam: complex) -> "Symbol":  # pragma: no cover - abstract
        raise NotImplementedError

    def __mul__(self, other):
        if np.isscalar(other):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)


@dataclass(frozen=True, eq=False)
class GridSymbol(Symbol):
    """Samples of a band-limited periodic function on a :class:`PhaseGrid`."""

    grid: PhaseGrid
    values: np.ndarray
    adequate: bool = True
    boundary_ratio: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise ConstructionError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ConstructionError("grid values must be finite")
        object.__setattr__(self, "values", _frozen(vals))

    @property
    def d(self) -> int:
        return self.grid.d

    def conj(self) -> "GridSymbol":
        return GridSymbol(self.grid, np.conj(self.values), self.adequate, self.boundary_ratio)

    def scale(self, lam) -> "GridSymbol":
        return GridSymbol(self.grid, lam * self.values, self.adequate, self.boundary_ratio)

    def with_values(self, values) -> "GridSymbol":
        return GridSymbol(self.grid, values, self.adequate, self.boundary_ratio)

    def _check(self, other: "GridSymbol"):
        if not isinstance(other, GridSymbol):
            raise RepresentationError("grid arithmetic needs two grid symbols")
        if other.grid != self.grid:
            raise GridMismatchError(f"{self.grid} vs {other.grid}")

    def __add__(self, other):
        if isinstance(other, GridSymbol):
            self._check(other)
            return self.with_values(self.values + other.values)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, GridSymbol):
            self._check(other)
            return self.with_values(self.values - other.values)
        return NotImplemented

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def integral(self) -> complex:
        return complex(np.sum(self.values) * self.grid.cell_volume)

    def evaluate(self, x) -> np.ndarray:
        """Trigonometric interpolation at arbitrary points."""
        pts, lead = _as_points(x, self.d)
        return trig_interpolate(self.values, self.grid, pts).reshape(lead)


def _dft_coefficients(values: np.ndarray) -> np.ndarray:
    """Normalised DFT with the frequency axis centred (index N/2 is zero)."""
    N = values.shape[0]
    c = np.fft.fftn(values) / values.size
    return np.fft.fftshift(c), np.arange(N) - N // 2


def trig_interpolate(values: np.ndarray, grid: PhaseGrid, pts: np.ndarray) -> np.ndarray:
    """Evaluate the band-limited interpolant of ``values`` at ``pts``.

    The Nyquist mode is taken as a cosine, so real data interpolates to real
    values.
    """
    c, k = _dft_coefficients(values)
    N = grid.N
    t = (pts + grid.L) / grid.spacing  # node-index coordinates, shape (P, d)
    out = None
    # contract one axis at a time: c[k1, ..., kd] -> per point
    res = c
    for a in range(grid.d):
        E = np.exp(2j * np.pi * np.outer(t[:, a], k) / N)
        E[:, 0] = np.cos(np.pi * t[:, a])  # Nyquist as cosine
        if a == 0:
            res = E @ res.reshape(N, -1)  # (P, N^(d-1))
            res = res.reshape((len(t),) + (N,) * (grid.d - 1))
        else:
            res = np.einsum("pk,pk...->p...", E, res)
    out = res
    return np.asarray(out)


@dataclass(frozen=True, eq=False)
class PolynomialSymbol(Symbol):
    """Finite sum ``sum_n c_n x**n`` keyed by multiindex tuples."""

    d: int
    coeffs: Mapping[Multiindex, complex] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ConstructionError("polynomial dimension must be positive")
        clean = {}
        for n, c in dict(self.coeffs).items():
            n = tuple(int(k) for k in n)
            if len(n) != self.d or any(k < 0 for k in n):
                raise ConstructionError(f"bad multiindex {n} for d={self.d}")
            c = complex(c)
            if not np.isfinite(c):
                raise ConstructionError("polynomial coefficients must be finite")
            if c != 0:
                clean[n] = clean.get(n, 0) + c
        clean = {n: c for n, c in sorted(clean.items()) if c != 0}
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def constant(cls, d: int, value: complex = 1.0) -> "PolynomialSymbol":
        return cls(d, {(0,) * d: value})

    @classmethod
    def coordinate(cls, d: int, j: int) -> "PolynomialSymbol":
        """The coordinate function ``x^{j+1}`` (``j`` zero-based)."""
        n = [0] * d
        n[j] = 1
        return cls(d, {tuple(n): 1.0})

    @property
    def degree(self) -> int:
        return max((sum(n) for n in self.coeffs), default=-1)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def evaluate(self, x) -> np.ndarray:
        pts, lead = _as_points(x, self.d)
        out = np.zeros(len(pts), dtype=complex)
        for n, c in self.coeffs.items():
            out += c * np.prod(pts ** np.array(n), axis=-1)
        return out.reshape(lead)

    def evaluate_axes(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        """Evaluate on the tensor grid spanned by ``axes``."""
        shape = tuple(len(a) for a in axes)
        out = np.zeros(shape, dtype=complex)
        for n, c in self.coeffs.items():
            term = np.array(c, dtype=complex)
            for a, k in zip(axes, n):
                term = np.multiply.outer(term, a ** k)
            out += term
        return out

    def derivative(self, alpha: Multiindex) -> "PolynomialSymbol":
        out = {}
        for n, c in self.coeffs.items():
            if any(k < a for k, a in zip(n, alpha)):
                continue
            fac = 1
            for k, a in zip(n, alpha):
                fac *= math.perm(k, a)
            out[tuple(k - a for k, a in zip(n, alpha))] = c * fac
        return PolynomialSymbol(self.d, out)

    def conj(self) -> "PolynomialSymbol":
        return PolynomialSymbol(self.d, {n: np.conj(c) for n, c in self.coeffs.items()})

    def scale(self, lam) -> "PolynomialSymbol":
        return PolynomialSymbol(self.d, {n: lam * c for n, c in self.coeffs.items()})

    def __add__(self, other):
        if isinstance(other, PolynomialSymbol):
            if other.d != self.d:
                raise ConstructionError("dimension mismatch")
            out = dict(self.coeffs)
            for n, c in other.coeffs.items():
                out[n] = out.get(n, 0) + c
            return PolynomialSymbol(self.d, out)
        if np.isscalar(other):
            return self + PolynomialSymbol.constant(self.d, other)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PolynomialSymbol) or np.isscalar(other):
            return self + (-1.0) * other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, PolynomialSymbol):
            if other.d != self.d:
                raise ConstructionError("dimension mismatch")
            out: dict = {}
            for n, a in self.coeffs.items():
                for m, b in other.coeffs.items():
                    k = tuple(i + j for i, j in zip(n, m))
                    out[k] = out.get(k, 0) + a * b
            return PolynomialSymbol(self.d, out)
        if np.isscalar(other):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def almost_equal(self, other: "PolynomialSymbol", tol: float = 0.0) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(k, 0) - other.coeffs.get(k, 0)) <= tol for k in keys)

    def coefficient_norm(self) -> float:
        """``sum |c_n|``; bounds the sup of the polynomial on the unit box."""
        return float(sum(abs(c) for c in self.coeffs.values()))


@dataclass(frozen=True, eq=False)
class GaussianSymbol(Symbol):
    """``exp(-x.M x + b.x + c)`` with ``Re M`` positive definite."""

    M: np.ndarray
    b: np.ndarray
    c: complex = 0.0

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M, dtype=complex))
        d = M.shape[0]
        if M.shape != (d, d):
            raise ConstructionError(f"M must be square, got {M.shape}")
        b = np.asarray(self.b, dtype=complex).reshape(-1) if np.ndim(self.b) else np.full(d, complex(self.b))
        if b.shape != (d,):
            raise ConstructionError(f"b must have length {d}")
        scale = max(1.0, float(np.max(np.abs(M))))
        if np.max(np.abs(M - M.T)) > 1e-12 * scale:
            raise ConstructionError("M must be symmetric")
        M = 0.5 * (M + M.T)
        try:
            np.linalg.cholesky(M.real)
        except np.linalg.LinAlgError:
            raise ConstructionError("real part of M must be positive definite") from None
        c = complex(self.c)
        if not (np.all(np.isfinite(M)) and np.all(np.isfinite(b)) and np.isfinite(c)):
            raise ConstructionError("Gaussian parameters must be finite")
        object.__setattr__(self, "M", _frozen(M))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "c", c)

    @classmethod
    def isotropic(cls, d: int, s: float = 1.0, b=None, c: complex = 0.0) -> "GaussianSymbol":
        return cls(s * np.eye(d), np.zeros(d) if b is None else b, c)

    @property
    def d(self) -> int:
        return self.M.shape[0]

    def log_evaluate(self, x) -> np.ndarray:
        pts, lead = _as_points(x, self.d)
        q = np.einsum("pi,ij,pj->p", pts, self.M, pts)
        return (-q + pts @ self.b + self.c).reshape(lead)

    def evaluate(self, x) -> np.ndarray:
        return np.exp(self.log_evaluate(x))

    def evaluate_grid(self, grid: PhaseGrid) -> np.ndarray:
        return self.evaluate(grid.points())

    def peak_point(self) -> np.ndarray:
        """Location of the maximum of ``|f|``."""
        return 0.5 * np.linalg.solve(self.M.real, self.b.real)

    def peak_log_abs(self) -> float:
        x = self.peak_point()
        return float(np.real(self.log_evaluate(x[None, :]))[0])

    def conj(self) -> "GaussianSymbol":
        return GaussianSymbol(np.conj(self.M), np.conj(self.b), np.conj(self.c))

    def scale(self, lam) -> "GaussianSymbol":
        lam = complex(lam)
        if lam == 0:
            raise RepresentationError("the zero function is not a Gaussian symbol")
        return GaussianSymbol(self.M, self.b, self.c + np.log(lam))

    def dilate(self, nu: float) -> "GaussianSymbol":
        """``x -> f(x / nu)``."""
        return GaussianSymbol(self.M / nu ** 2, self.b / nu, self.c)

    def translate(self, a) -> "GaussianSymbol":
        """``x -> f(x - a)``."""
        a = np.asarray(a, dtype=float)
        M, b = self.M, self.b
        return GaussianSymbol(M, b + 2 * M @ a, self.c - a @ M @ a - b @ a)

    def linear_map(self, S) -> "GaussianSymbol":
        """``x -> f(S x)``."""
        S = np.asarray(S)
        return GaussianSymbol(S.T @ self.M @ S, S.T @ self.b, self.c)

    def __mul__(self, other):
        if isinstance(other, GaussianSymbol):
            return GaussianSymbol(self.M + other.M, self.b + other.b, self.c + other.c)
        return Symbol.__mul__(self, other)

    __rmul__ = __mul__

    def log_integral(self) -> complex:
        """``log int f dx`` (principal branch of the determinant root)."""
        Mi = np.linalg.inv(self.M)
        return (
            0.5 * self.d * np.log(np.pi)
            - 0.5 * np.sum(np.log(np.linalg.eigvals(self.M)))
            + 0.25 * self.b @ Mi @ self.b
            + self.c
        )

    def integral(self) -> complex:
        return complex(np.exp(self.log_integral()))

    def derivatives(self, x, order: int) -> dict:
        """All derivatives ``d^alpha f`` with ``|alpha| <= order`` at points ``x``.

        Uses the Hermite-type recurrence
        ``F_{a+e_j} = g_j F_a - 2 sum_i M_ji a_i F_{a-e_i}`` with
        ``g = b - 2 M x``.
        """
        pts, lead = _as_points(x, self.d)
        base = np.exp(self.log_evaluate(pts))
        g = self.b[None, :] - 2 * pts @ self.M.T
        out = {(0,) * self.d: base}
        for alpha in multiindices_upto(self.d, order):
            if sum(alpha) == 0:
                continue
            j = next(i for i, k in enumerate(alpha) if k > 0)
            prev = list(alpha)
            prev[j] -= 1
            prev = tuple(prev)
            val = g[:, j] * out[prev]
            for i in range(self.d):
                if prev[i] > 0:
                    pm = list(prev)
                    pm[i] -= 1
                    val = val - 2 * self.M[j, i] * prev[i] * out[tuple(pm)]
            out[alpha] = val
        return {k: v.reshape(lead) for k, v in out.items()}

    def derivative_at(self, x, alpha: Multiindex) -> np.ndarray:
        return self.derivatives(x, sum(alpha))[tuple(alpha)]


@dataclass(frozen=True)
class GSParams:
    """Parameters ``(alpha, beta, A, B)`` of a Gel'fand-Shilov norm."""

    alpha: float
    beta: float
    A: float
    B: float
    weight_sign: int = 1

    def __post_init__(self):
        a, b = float(self.alpha), float(self.beta)
        if a < 0 or b < 0:
            raise ConstructionError("alpha and beta must be nonnegative")
        if not (self.A > 0 and self.B > 0):
            raise ConstructionError("A and B must be positive")
        if self.weight_sign not in (1, -1):
            raise ConstructionError("weight_sign must be +1 or -1")
        s = a + b
        if not (s > 1 + 1e-15 or (abs(s - 1) <= 1e-15 and a > 0 and b > 0)):
            raise ConstructionError(
                f"(alpha, beta) = ({a}, {b}) gives a trivial space; need alpha + beta > 1 "
                "or alpha + beta = 1 with both positive"
            )

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "A": self.A, "B": self.B,
                "weight_sign": self.weight_sign}


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _boundary_points(grid: PhaseGrid) -> np.ndarray:
    """Nodes on the faces of the closed box ``[-L, L]^d``."""
    ax = np.append(grid.axis, grid.L)
    faces = []
    for a in range(grid.d):
        for val in (-grid.L, grid.L):
            axes = [ax] * grid.d
            axes[a] = np.array([val])
            m = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, grid.d)
            faces.append(m)
    return np.concatenate(faces)


def gaussian_boundary_ratio(f: GaussianSymbol, grid: PhaseGrid) -> float:
    """Largest boundary value of ``|f|`` relative to its peak."""
    lb = np.real(f.log_evaluate(_boundary_points(grid)))
    return float(np.exp(np.max(lb) - f.peak_log_abs()))


def sample(f: Symbol, grid: PhaseGrid) -> GridSymbol:
    """Evaluate ``f`` at every node of ``grid``.

    Gaussian inputs record the boundary-to-peak ratio; the result is flagged
    adequate when that ratio is below ``1e-14`` and a
    :class:`GridTooSmallWarning` is issued above ``1e-6``.
    """
    if f.d != grid.d:
        raise GridMismatchError(f"symbol dimension {f.d} does not match grid dimension {grid.d}")
    if isinstance(f, GridSymbol):
        if f.grid != grid:
            raise GridMismatchError(f"symbol lives on {f.grid}, requested {grid}")
        return f
    if isinstance(f, PolynomialSymbol):
        vals = f.evaluate_axes([grid.axis] * grid.d)
        return GridSymbol(grid, vals, adequate=False, boundary_ratio=float("inf"))
    if isinstance(f, GaussianSymbol):
        ratio = gaussian_boundary_ratio(f, grid)
        if ratio > WARN_TAIL:
            warnings.warn(
                f"Gaussian has boundary/peak ratio {ratio:.3g} on [-{grid.L}, {grid.L})^{grid.d}",
                GridTooSmallWarning,
                stacklevel=2,
            )
        return GridSymbol(grid, f.evaluate_grid(grid), adequate=ratio < ADEQUATE_TAIL, boundary_ratio=ratio)
    raise RepresentationError(f"cannot sample {type(f).__name__}")


def grid_boundary_ratio(values: np.ndarray) -> float:
    """Boundary-to-peak ratio of sampled data (outermost node layers)."""
    a = np.abs(values)
    peak = float(np.max(a))
    if peak == 0:
        return 0.0
    edge = 0.0
    for ax in range(a.ndim):
        edge = max(edge, float(np.max(np.take(a, [0], axis=ax))))
    return edge / peak


__all__ = [
    "ThetaMatrix", "make_theta", "symplectic_unit", "PhaseGrid", "Symbol", "GridSymbol",
    "PolynomialSymbol", "GaussianSymbol", "GSParams", "sample", "multiindices",
    "multiindices_upto", "mi_power_log", "trig_interpolate", "gaussian_boundary_ratio",
    "grid_boundary_ratio", "parse_multiindex", "format_multiindex",
]
