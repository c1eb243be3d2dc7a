"""Verification suites driven by JSON experiment configs."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .duality import approx_identity_error, log_slope
from .errors import ConfigError, MoyalError
from .gsanalysis import (
    derivative_growth,
    entire_coeff_check,
    fourier_bound_check,
    gs_norm,
    truncation_order,
)
from .io import symbol_from_json
from .spectral import inversion_constant, self_dual_grid, star_via_twisted, symplectic_fourier
from .starproduct import entire_coefficients, star_integral, star_series
from .symbols import (
    GaussianSymbol,
    GSParams,
    PhaseGrid,
    Symbol,
    ThetaMatrix,
    make_theta,
    sample,
)

SCHEMA = 1
EXPERIMENTS = ("star-compare", "trace", "associativity", "bridge", "approx-id", "norms",
               "fourier-bound", "series-tail")

DEFAULT_TOLERANCES = {
    "star-compare": {"sup_err": 1e-6, "series": 1e-8, "slope": 0.2},
    "trace": {"rel_err": 1e-8},
    "associativity": {"rel_err": 1e-6},
    "bridge": {"rel_err": 1e-7, "inversion": 1e-10},
    "approx-id": {"omega": 1e-10},
    "norms": {"stability": 1e-6},
    "fourier-bound": {"stability": 0.05},
    "series-tail": {"ratio_slack": 0.1},
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    theta: ThetaMatrix
    grid: PhaseGrid
    symbols: List[Symbol]
    tolerances: Dict[str, float]
    params: Dict[str, object] = field(default_factory=dict)
    output: str = "moyal"
    theta_spec: Dict[str, object] = field(default_factory=dict)


def _require(obj: dict, key: str, field_name: Optional[str] = None):
    if key not in obj:
        raise ConfigError(f"missing required field {key!r}", field=field_name or key)
    return obj[key]


def parse_config(text: str, grid_N: Optional[int] = None, grid_L: Optional[float] = None,
                 theta0: Optional[float] = None) -> ExperimentConfig:
    """Parse and validate an experiment config, applying command-line overrides."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    exp = _require(raw, "experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp!r}; choose from {', '.join(EXPERIMENTS)}",
                          field="experiment")

    gspec = dict(raw.get("grid", {}))
    if not isinstance(raw.get("grid", {}), dict):
        raise ConfigError("grid must be an object", field="grid")
    if grid_N is not None:
        gspec["N"] = grid_N
    if grid_L is not None:
        gspec["L"] = grid_L

    tspec = raw.get("theta", {"theta0": 1.0})
    if not isinstance(tspec, dict):
        raise ConfigError("theta must be an object", field="theta")
    tspec = dict(tspec)
    if theta0 is not None:
        tspec = {"theta0": theta0, "d": tspec.get("d", gspec.get("d", 2))}
    try:
        if "entries" in tspec:
            theta = make_theta(entries=tspec["entries"])
        else:
            theta = make_theta(int(tspec.get("d", gspec.get("d", 2))), float(tspec.get("theta0", 1.0)))
    except MoyalError as exc:
        raise ConfigError(str(exc), field="theta") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field="theta") from None

    try:
        grid = PhaseGrid(int(gspec.get("d", theta.d)), float(gspec.get("L", 8.0)), int(gspec.get("N", 128)))
    except MoyalError as exc:
        raise ConfigError(str(exc), field="grid") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field="grid") from None
    if grid.d != theta.d:
        raise ConfigError("grid and theta dimensions differ", field="grid.d")

    specs = raw.get("symbols")
    if not isinstance(specs, list) or not specs:
        raise ConfigError("symbols must be a non-empty list", field="symbols")
    symbols = [symbol_from_json(s, f"symbols[{i}]") for i, s in enumerate(specs)]
    for i, s in enumerate(symbols):
        if s.d != grid.d:
            raise ConfigError(f"symbol dimension {s.d} differs from grid dimension {grid.d}",
                              field=f"symbols[{i}]")

    tol = dict(DEFAULT_TOLERANCES[exp])
    user_tol = raw.get("tolerances", {})
    if not isinstance(user_tol, dict):
        raise ConfigError("tolerances must be an object", field="tolerances")
    for k, v in user_tol.items():
        if not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError("tolerances must be positive numbers", field=f"tolerances.{k}")
        tol[k] = float(v)
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("params must be an object", field="params")
    output = raw.get("output", "moyal")
    if not isinstance(output, str) or not output:
        raise ConfigError("output must be a non-empty path prefix", field="output")
    return ExperimentConfig(exp, theta, grid, symbols, tol, dict(params), output,
                            {"entries": theta.entries.tolist()})


# ---------------------------------------------------------------------------
# report plumbing
# ---------------------------------------------------------------------------

class _Report:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.checks: List[dict] = []
        self.fields: Dict[str, object] = {}
        self.plot_header: List[str] = []
        self.plot_rows: List[List[float]] = []

    def check(self, name: str, value: float, tolerance, passed: bool, **extra):
        entry = {"name": name, "value": _num(value), "tolerance": tolerance, "passed": bool(passed)}
        entry.update({k: _num(v) for k, v in extra.items()})
        self.checks.append(entry)

    def fail(self, name: str, exc: Exception):
        self.checks.append({"name": name, "passed": False, "error": f"{type(exc).__name__}: {exc}"})

    def to_dict(self) -> dict:
        cfg = self.cfg
        out = {
            "schema": SCHEMA,
            "experiment": cfg.experiment,
            "grid": {"d": cfg.grid.d, "L": cfg.grid.L, "N": cfg.grid.N},
            "theta": cfg.theta.entries.tolist(),
            "tolerances": dict(sorted(cfg.tolerances.items())),
            "checks": self.checks,
            "passed": all(c["passed"] for c in self.checks) and bool(self.checks),
        }
        out.update({k: _num(v) for k, v in self.fields.items()})
        return out

    def plot_csv(self) -> str:
        lines = [",".join(self.plot_header)]
        for row in self.plot_rows:
            lines.append(",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def _num(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_num(t) for t in v]
    if isinstance(v, dict):
        return {k: _num(t) for k, t in v.items()}
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _sup(a: np.ndarray) -> float:
    return float(np.max(np.abs(a)))


def _guarded(rep: _Report, name: str, fn: Callable[[], None]):
    try:
        fn()
    except (MoyalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        rep.fail(name, exc)


def _pairs(n: int, mode: str) -> List[Tuple[int, int]]:
    if mode == "all":
        return [(i, j) for i in range(n) for j in range(n)]
    return [(i, i + 1) for i in range(0, n - 1, 2)]


def _need(cfg: ExperimentConfig, count: int):
    if len(cfg.symbols) < count:
        raise ConfigError(f"{cfg.experiment} needs at least {count} symbols", field="symbols")


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def series_regime(f: Symbol, g: Symbol, theta: ThetaMatrix, grid: PhaseGrid, growth_order: int = 12,
                  coeff_order: int = 24) -> dict:
    """Constants of the absolute-convergence regime for the pair ``(f, g)``.

    ``B`` is the derivative-growth constant of the two factors, ``b`` the
    fitted type of the bidifferential operator's coefficients and
    ``q = B sqrt(2b)`` the predicted geometric ratio.
    """
    Bf, _ = derivative_growth(f, growth_order, grid)
    Bg, _ = derivative_growth(g, growth_order, grid)
    fit = entire_coeff_check(entire_coefficients(theta, coeff_order))
    B = max(Bf, Bg)
    return {"B": B, "b": fit.b_fit, "q": B * math.sqrt(2 * fit.b_fit), "entire_ok": fit.satisfies}


def run_star_compare(cfg: ExperimentConfig, rep: _Report):
    _need(cfg, 2)
    f, g = cfg.symbols[:2]
    grid, theta = cfg.grid, cfg.theta
    tol = cfg.tolerances
    eps = cfg.params.get("epsilons")

    def body():
        reg = series_regime(f, g, theta, grid)
        probe = star_series(f, g, theta, min(grid.N // 4, 16), grid)
        q = reg["q"]
        C = max(t / q ** n for n, t in enumerate(probe.term_norms))
        M = truncation_order(reg["B"], reg["b"], C, tol["series"])
        fs, gs = sample(f, grid), sample(g, grid)
        ser = star_series(fs, gs, theta, M)
        integ = star_integral(f, g, theta, grid)
        err = _sup(ser.value.values - integ.values)
        rep.fields.update({"order": M, "sup_err": err, "q": q})
        rep.check("integral_vs_series", err, tol["sup_err"], err < tol["sup_err"], order=M)
        rep.plot_header = ["order", "term_norm"]
        rep.plot_rows = [[n, t] for n, t in enumerate(ser.term_norms)]

    if not eps:
        _guarded(rep, "integral_vs_series", body)
    else:
        # theta = eps * theta / |theta|: deviation from fg + first-order term
        def semi():
            devs = []
            for e in eps:
                th = theta.scaled(float(e) / max(abs(theta.entries).max(), 1e-300))
                first = star_series(f, g, th, 1, grid).value.values
                full = star_integral(f, g, th, grid).values
                devs.append(_sup(full - first))
            slope = log_slope(eps, devs)
            rep.fields["slope"] = slope
            rep.plot_header = ["epsilon", "deviation"]
            rep.plot_rows = [[e, dv] for e, dv in zip(eps, devs)]
            rep.check("semiclassical_slope", slope, tol["slope"], abs(slope - 2.0) <= tol["slope"])
        _guarded(rep, "semiclassical_slope", semi)


def run_trace(cfg: ExperimentConfig, rep: _Report):
    _need(cfg, 2)
    grid, theta = cfg.grid, cfg.theta
    worst = 0.0
    rep.plot_header = ["pair", "rel_err"]
    for k, (i, j) in enumerate(_pairs(len(cfg.symbols), cfg.params.get("pairs", "consecutive"))):
        f, g = cfg.symbols[i], cfg.symbols[j]

        def body():
            nonlocal worst
            lhs = star_integral(f, g, theta, grid).integral()
            rhs = star_integral(f, g, _zero_theta(theta), grid).integral()
            rel = abs(lhs - rhs) / abs(rhs)
            worst = max(worst, rel)
            rep.plot_rows.append([k, rel])
            rep.check(f"trace[{i},{j}]", rel, cfg.tolerances["rel_err"], rel < cfg.tolerances["rel_err"])
        _guarded(rep, f"trace[{i},{j}]", body)
    rep.fields["rel_err"] = worst


def _zero_theta(theta: ThetaMatrix) -> ThetaMatrix:
    return make_theta(entries=np.zeros_like(theta.entries))


def run_associativity(cfg: ExperimentConfig, rep: _Report):
    _need(cfg, 3)
    grid, theta = cfg.grid, cfg.theta
    worst = 0.0
    rep.plot_header = ["triple", "rel_err"]
    for k in range(0, len(cfg.symbols) - 2, 3):
        f, g, h = cfg.symbols[k:k + 3]

        def body():
            nonlocal worst
            left = star_integral(star_integral(f, g, theta, grid), h, theta, grid)
            right = star_integral(f, star_integral(g, h, theta, grid), theta, grid)
            rel = _sup(left.values - right.values) / _sup(right.values)
            worst = max(worst, rel)
            rep.plot_rows.append([k // 3, rel])
            rep.check(f"associativity[{k // 3}]", rel, cfg.tolerances["rel_err"], rel < cfg.tolerances["rel_err"])
        _guarded(rep, f"associativity[{k // 3}]", body)
    rep.fields["rel_err"] = worst


def run_bridge(cfg: ExperimentConfig, rep: _Report):
    _need(cfg, 2)
    grid, theta = cfg.grid, cfg.theta
    worst = 0.0
    rep.plot_header = ["pair", "rel_err"]
    for k, (i, j) in enumerate(_pairs(len(cfg.symbols), cfg.params.get("pairs", "consecutive"))):
        u, g = cfg.symbols[i], cfg.symbols[j]

        def body():
            nonlocal worst
            direct = star_integral(u, g, theta, grid).values
            left = star_via_twisted(u, g, theta, "left", grid).values
            right = star_via_twisted(g, u, theta, "right", grid).values
            scale = _sup(direct)
            rel = max(_sup(left - direct), _sup(right - direct)) / scale
            worst = max(worst, rel)
            rep.plot_rows.append([k, rel])
            rep.check(f"bridge[{i},{j}]", rel, cfg.tolerances["rel_err"], rel < cfg.tolerances["rel_err"])
        _guarded(rep, f"bridge[{i},{j}]", body)
    rep.fields["rel_err"] = worst

    def inversion():
        g = cfg.symbols[0]
        if not isinstance(g, GaussianSymbol):
            raise ConfigError("the inversion check needs a Gaussian first symbol", field="symbols[0]")
        sd = self_dual_grid(theta, grid.N)
        gs = sample(g, sd)
        c = inversion_constant(theta)
        scale = _sup(gs.values)
        # F_theta is an involution up to c; Fbar_theta F_theta reflects x -> -x
        twice = sample(symplectic_fourier(symplectic_fourier(gs, theta, -1), theta, -1), sd)
        mixed = sample(symplectic_fourier(symplectic_fourier(gs, theta, -1), theta, 1), sd)
        err_twice = _sup(twice.values / c - gs.values) / scale
        err_mixed = _sup(mixed.values / c - _reflect(gs).values) / scale
        err = max(err_twice, err_mixed)
        rep.fields["inversion_err"] = err
        rep.check("symplectic_inversion", err, cfg.tolerances["inversion"], err < cfg.tolerances["inversion"])
    _guarded(rep, "symplectic_inversion", inversion)


def _reflect(g):
    """``x -> g(-x)`` for samples on a symmetric periodic grid."""
    v = g.values
    for ax in range(g.grid.d):
        v = np.roll(np.flip(v, axis=ax), 1, axis=ax)
    return g.with_values(v)


def run_approx_id(cfg: ExperimentConfig, rep: _Report):
    _need(cfg, 2)
    f, e = cfg.symbols[:2]
    nus = [float(v) for v in cfg.params.get("nu", [4, 8, 16, 32])]
    side = cfg.params.get("side", "right")
    lo, hi = cfg.params.get("slope_range", [-1.3, -0.8])

    def body():
        res = [approx_identity_error(f, e, nu, cfg.theta, side, cfg.grid) for nu in nus]
        errs = [r.err for r in res]
        slope = log_slope(nus, errs)
        omega = max(r.omega_check for r in res)
        rep.fields.update({"slope": slope, "omega_check": omega, "errors": errs})
        rep.plot_header = ["nu", "err"]
        rep.plot_rows = [[r.nu, r.err] for r in res]
        rep.check("rate_slope", slope, [lo, hi], lo <= slope <= hi)
        rep.check("omega_check", omega, cfg.tolerances["omega"], omega < cfg.tolerances["omega"])
    _guarded(rep, "approx_identity", body)


def _gs_params(cfg: ExperimentConfig) -> Tuple[GSParams, int]:
    p = cfg.params
    try:
        gp = GSParams(float(p.get("alpha", 0.5)), float(p.get("beta", 0.5)), float(p.get("A", 2.0)),
                      float(p.get("B", 2.0)), int(p.get("weight_sign", 1)))
    except MoyalError as exc:
        raise ConfigError(str(exc), field="params") from None
    return gp, int(p.get("n_max", 4))


def run_norms(cfg: ExperimentConfig, rep: _Report):
    gp, n_max = _gs_params(cfg)
    fine = PhaseGrid(cfg.grid.d, cfg.grid.L, 2 * cfg.grid.N)
    rep.plot_header = ["symbol", "value", "value_fine"]
    values = []
    for i, f in enumerate(cfg.symbols):
        def body():
            a = gs_norm(f, gp, n_max, cfg.grid)
            b = gs_norm(f, gp, n_max, fine)
            rel = abs(a.value - b.value) / max(abs(b.value), 1e-300)
            values.append(a.to_dict())
            rep.plot_rows.append([i, a.value, b.value])
            rep.check(f"stability[{i}]", rel, cfg.tolerances["stability"], rel < cfg.tolerances["stability"],
                      saturated=a.saturated)
        _guarded(rep, f"stability[{i}]", body)
    rep.fields["norms"] = values


def run_fourier_bound(cfg: ExperimentConfig, rep: _Report):
    gp, n_max = _gs_params(cfg)
    fine = PhaseGrid(cfg.grid.d, cfg.grid.L, 2 * cfg.grid.N)

    def body():
        coarse = [fourier_bound_check(f, gp, n_max, cfg.grid) for f in cfg.symbols]
        refined = [fourier_bound_check(f, gp, n_max, fine) for f in cfg.symbols]
        m1 = max(r.ratio for r in coarse)
        m2 = max(r.ratio for r in refined)
        change = abs(m2 - m1) / m1
        rep.fields.update({"max_ratio": m1, "max_ratio_fine": m2, "r_used": coarse[0].r_used,
                           "ratios": [r.ratio for r in coarse]})
        rep.plot_header = ["symbol", "ratio", "ratio_fine"]
        rep.plot_rows = [[i, a.ratio, b.ratio] for i, (a, b) in enumerate(zip(coarse, refined))]
        rep.check("finite", m1, None, bool(np.isfinite(m1)))
        rep.check("refinement_change", change, cfg.tolerances["stability"], change < cfg.tolerances["stability"])
    _guarded(rep, "fourier_bound", body)


def run_series_tail(cfg: ExperimentConfig, rep: _Report):
    _need(cfg, 2)
    f, g = cfg.symbols[:2]
    grid, theta = cfg.grid, cfg.theta
    max_order = int(cfg.params.get("max_order", grid.N // 4))
    start = int(cfg.params.get("start", 5))
    tols = [float(t) for t in cfg.params.get("tail_tolerances", [1e-4, 1e-6, 1e-8])]

    def body():
        reg = series_regime(f, g, theta, grid)
        q = reg["q"]
        ser = star_series(f, g, theta, max_order, grid)
        tn = np.asarray(ser.term_norms)
        ratios = tn[1:] / tn[:-1]
        worst = float(ratios[start:].max())
        bound = q * (1 + cfg.tolerances["ratio_slack"])
        rep.fields.update({"B": reg["B"], "b": reg["b"], "q": q, "max_ratio": worst})
        rep.plot_header = ["order", "term_norm"]
        rep.plot_rows = [[n, t] for n, t in enumerate(tn)]
        rep.check("term_ratio", worst, bound, worst <= bound)
        C = float(max(tn / q ** np.arange(len(tn))))
        full = star_integral(f, g, theta, grid).values
        for t in tols:
            M = truncation_order(reg["B"], reg["b"], C, t)
            part = star_series(f, g, theta, M, grid).value.values
            rem = _sup(full - part)
            pred = C * q ** (M + 1) / (1 - q)
            rep.check(f"tail[{t:g}]", rem, pred, rem <= pred, order=M)
    _guarded(rep, "series_tail", body)


SUITES = {
    "star-compare": run_star_compare,
    "trace": run_trace,
    "associativity": run_associativity,
    "bridge": run_bridge,
    "approx-id": run_approx_id,
    "norms": run_norms,
    "fourier-bound": run_fourier_bound,
    "series-tail": run_series_tail,
}


def run_experiment(cfg: ExperimentConfig) -> Tuple[dict, str]:
    """Run one suite; returns the report dictionary and the CSV plot text."""
    rep = _Report(cfg)
    SUITES[cfg.experiment](cfg, rep)
    return rep.to_dict(), rep.plot_csv()


__all__ = ["ExperimentConfig", "parse_config", "run_experiment", "EXPERIMENTS", "SCHEMA", "series_regime"]
