"""JSON and binary formats for symbols, functionals and norm reports.

Complex numbers are written as ``[re, im]`` pairs; plain numbers are
accepted on input.  Polynomial coefficient maps use multiindex keys
``"n1,n2,..."``.

Binary grid layout (little-endian)::

    magic "MOYL" | version u32 | d u32 | N u32 | L f64 | N**d complex128 (row-major)
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any, Union

import numpy as np

from .errors import ConfigError
from .symbols import (
    GaussianSymbol,
    GridSymbol,
    PhaseGrid,
    PolynomialSymbol,
    Symbol,
    format_multiindex,
    parse_multiindex,
)

MAGIC = b"MOYL"
VERSION = 1
HEADER = struct.Struct("<4sIIId")


def _cplx_out(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _cplx_in(v, field: str = "value") -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    if isinstance(v, dict) and set(v) <= {"re", "im"}:
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    raise ConfigError(f"expected a number or [re, im] pair, got {v!r}", field=field)


def symbol_to_json(f: Symbol) -> dict:
    if isinstance(f, PolynomialSymbol):
        return {"type": "polynomial", "d": f.d,
                "coeffs": {format_multiindex(n): _cplx_out(c) for n, c in f.coeffs.items()}}
    if isinstance(f, GaussianSymbol):
        return {"type": "gaussian",
                "M": [[_cplx_out(z) for z in row] for row in f.M],
                "b": [_cplx_out(z) for z in f.b],
                "c": _cplx_out(f.c)}
    raise TypeError("grid symbols use the binary format (write_grid)")


def symbol_from_json(obj: dict, field: str = "symbol") -> Symbol:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigError("symbol spec must be an object with a 'type'", field=field)
    kind = obj["type"]
    try:
        if kind == "polynomial":
            coeffs = {parse_multiindex(k): _cplx_in(v, f"{field}.coeffs.{k}") for k, v in obj["coeffs"].items()}
            d = int(obj.get("d", len(next(iter(coeffs))) if coeffs else 0))
            return PolynomialSymbol(d, coeffs)
        if kind == "gaussian":
            M = _matrix_in(obj["M"], f"{field}.M")
            d = M.shape[0]
            b = _vector_in(obj.get("b", [0.0] * d), f"{field}.b")
            c = _cplx_in(obj.get("c", 0.0), f"{field}.c")
            return GaussianSymbol(M, b, c)
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r}", field=field) from None
    except ConfigError:
        raise
    except Exception as exc:  # construction errors become config errors here
        raise ConfigError(str(exc), field=field) from exc
    raise ConfigError(f"unknown symbol type {kind!r}", field=f"{field}.type")


def _vector_in(v, field: str) -> np.ndarray:
    if not isinstance(v, list):
        raise ConfigError("expected a list", field=field)
    return np.array([_cplx_in(t, f"{field}[{i}]") for i, t in enumerate(v)], dtype=complex)


def _matrix_in(v, field: str) -> np.ndarray:
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise ConfigError("expected a list of rows", field=field)
    return np.array([[_cplx_in(t, f"{field}[{i}][{j}]") for j, t in enumerate(r)] for i, r in enumerate(v)],
                    dtype=complex)


# ---------------------------------------------------------------------------
# binary grids
# ---------------------------------------------------------------------------

def grid_to_bytes(f: GridSymbol) -> bytes:
    g = f.grid
    head = HEADER.pack(MAGIC, VERSION, g.d, g.N, g.L)
    body = np.ascontiguousarray(f.values, dtype="<c16").tobytes(order="C")
    return head + body


def grid_from_bytes(data: bytes) -> GridSymbol:
    if len(data) < HEADER.size:
        raise ValueError("truncated grid header")
    magic, version, d, N, L = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported grid format version {version}")
    grid = PhaseGrid(d, L, N)
    count = N ** d
    body = data[HEADER.size:]
    if len(body) != 16 * count:
        raise ValueError(f"expected {16 * count} payload bytes, got {len(body)}")
    vals = np.frombuffer(body, dtype="<c16").reshape(grid.shape)
    return GridSymbol(grid, vals.astype(complex))


def write_grid(path: Union[str, Path], f: GridSymbol) -> None:
    Path(path).write_bytes(grid_to_bytes(f))


def read_grid(path: Union[str, Path]) -> GridSymbol:
    return grid_from_bytes(Path(path).read_bytes())


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

def functional_to_json(u) -> dict:
    from .duality import Delta, One, PlaneWave, PolyGaussianDensity

    if isinstance(u, Delta):
        return {"type": "delta", "xi": u.xi.tolist(), "amplitude": _cplx_out(u.amplitude)}
    if isinstance(u, PlaneWave):
        return {"type": "plane_wave", "k": u.k.tolist(), "amplitude": _cplx_out(u.amplitude)}
    if isinstance(u, One):
        return {"type": "one", "d": u.d, "amplitude": _cplx_out(u.amplitude)}
    if isinstance(u, PolyGaussianDensity):
        return {"type": "poly_gaussian", "p": symbol_to_json(u.p), "G": symbol_to_json(u.G)}
    raise TypeError(f"unknown functional {type(u).__name__}")


def functional_from_json(obj: dict, field: str = "functional"):
    from .duality import Delta, One, PlaneWave, PolyGaussianDensity

    if not isinstance(obj, dict) or "type" not in obj:
        raise ConfigError("functional spec must be an object with a 'type'", field=field)
    kind = obj["type"]
    amp = _cplx_in(obj.get("amplitude", 1.0), f"{field}.amplitude")
    try:
        if kind == "delta":
            return Delta(np.asarray(obj["xi"], float), amp)
        if kind == "plane_wave":
            return PlaneWave(np.asarray(obj["k"], float), amp)
        if kind == "one":
            return One(int(obj["d"]), amp)
        if kind == "poly_gaussian":
            p = symbol_from_json(obj["p"], f"{field}.p")
            G = symbol_from_json(obj["G"], f"{field}.G")
            if not isinstance(p, PolynomialSymbol) or not isinstance(G, GaussianSymbol):
                raise ConfigError("poly_gaussian needs a polynomial 'p' and a Gaussian 'G'", field=field)
            return PolyGaussianDensity(p, G)
    except KeyError as exc:
        raise ConfigError(f"missing key {exc.args[0]!r}", field=field) from None
    raise ConfigError(f"unknown functional type {kind!r}", field=f"{field}.type")


def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


__all__ = [
    "symbol_to_json", "symbol_from_json", "grid_to_bytes", "grid_from_bytes", "write_grid",
    "read_grid", "functional_to_json", "functional_from_json", "dumps", "HEADER", "MAGIC",
]
