"""Command-line driver: ``moyal run`` and ``moyal describe``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .errors import ConfigError, UsageError
from .experiments import parse_config, run_experiment
from .io import dumps

_CONVENTIONS = """\
Conventions
  Fourier transform   f^(p) = int f(x) exp(-i p.x) dx
  inverse             f(x) = (2 pi)^-d int f^(p) exp(+i p.x) dp
  grids               x_j = -L + j h, h = 2L/N, N a power of two; dual grid L' = pi N / (2L)
  multiindices        x^n = prod x_i^{n_i} with 0^0 = 1; n! = prod n_i!
  theta               antisymmetric d x d; canonical form theta0 * J with J = [[0, 1], [-1, 0]] blocks
"""

TOPICS = {
    "star-series": """\
Moyal series
  (f * g)(x) = sum_n (i/2)^n / n! [ (d_x . theta . d_y)^n f(x) g(y) ]_{y=x}
  Polynomial pairs are multiplied exactly; grid data use spectral derivatives
  (order <= N/4); Gaussians use analytic derivatives.
  Example: x1 * x2 = x1 x2 + (i/2) theta0.
""",
    "star-integral": """\
Integral form
  (f * g)(x) = (2 pi)^-d int f(x - theta q / 2) g^(q) exp(i q.x) dq
  mirrored:   (f * g)(x) = (2 pi)^-d int f^(p) g(x + theta p / 2) exp(i p.x) dp
  Evaluated by quadrature on the dual grid; Gaussian pairs also have a closed form.
""",
    "commutator": """\
Star commutator
  [f, g]_* = f * g - g * f;  [x1, x2]_* = i theta0 exactly.
  Integral mode applies both orderings to a probe h: f*(g*h) - g*(f*h).
""",
    "fourier": """\
Fourier transform of symbols
  f^(p) = int f(x) exp(-i p.x) dx
  grid form: F_m = h^d (-1)^(m - N/2) FFT[(-1)^j f_j], p_m = (pi / L)(m - N/2)
  Gaussian exp(-x.A.x + a.x + c) maps to a Gaussian with matrix A^-1 / 4.
""",
    "twisted": """\
Twisted convolution
  (F *^ G)(q) = int F(p) G(q - p) exp((i/2) q.theta.p) dp
  F(f * g) = (2 pi)^-d  f^ *^ g^;  at theta = 0 this is the ordinary convolution.
""",
    "symplectic": """\
Symplectic Fourier transform
  (F_theta g)(xi)    = int g(x) exp(-2 i x.theta^-1.xi) dx = g^(2 theta^-1 xi)
  (Fbar_theta g)(xi) = int g(x) exp(+2 i x.theta^-1.xi) dx
  Fbar_theta F_theta = pi^d det(theta) * id
""",
    "bridge": """\
Star product through twisted convolution
  u * g = (pi^d det theta)^-1  u *^_{-4 theta^-1} F_theta g
  g * u = (pi^d det theta)^-1  Fbar_theta g *^_{-4 theta^-1} u
""",
    "duality": """\
Duality
  <u * f, g> := <u, f * g>,  <f * u, g> := <u, g * f>
  built on the tracial identity int (f * g) = int f g.
  Functionals: delta(xi), plane wave exp(i k.x), the constant 1, polynomial x Gaussian densities.
""",
    "involution": """\
Involution
  u -> u^* with <u^*, f> = conj(<u, conj f>);  (f * g)^* = g^* * f^*.
""",
    "approx-id": """\
Approximation of identity
  e_nu(x) = e(x / nu) with e(0) = 1;  err(nu) = sup | f * e_nu - f |, expected O(1/nu).
  The rate is the slope of log err against log nu.
""",
    "norms": """\
Gel'fand-Shilov norm
  ||f||_{A,B} = sup_{x,n} | exp(A |x|^{1/alpha}) d^n f(x) | / (B^|n| n^{beta n})
  estimated over 0 <= |n| <= n_max; saturated when the last order dominates.
""",
    "decay-norm": """\
Decay-weighted norm
  sup_{x,n} (1 + |x|)^N_pow | d^n f(x) | / B^|n|
""",
    "lemma-a1": """\
L-infinity bound from L2 bounds (d = 1)
  sup |x^k d^n f| <= sqrt(2) ( ||x^k d^n f||_2 ||d(x^k d^n f)||_2 )^{1/2}
  real-valued f satisfy the bound without the sqrt(2).
""",
    "fourier-bound": """\
Fourier bound surrogate
  ratio = ||f^||_{rB, rA; beta, alpha} / ||f||_{A, B; alpha, beta}
  r = 1.01 * max{ (alpha d / e)^alpha, 2 (e / beta)^beta }
""",
    "entire": """\
Entire coefficients
  |c_n| <= C b^|n| / n^{|n|/2}: order at most two with finite type b.
  b and C are fitted from the upper half of the coefficient envelope.
""",
    "truncation": """\
Series truncation
  terms ~ C q^n with q = B sqrt(2 b) < 1
  tail after order M <= C q^(M+1) / (1 - q); truncation_order returns the least such M below tol.
""",
    "conventions": _CONVENTIONS,
}


def describe(topic: str) -> str:
    if topic not in TOPICS:
        raise UsageError(f"unknown topic {topic!r}; available: {', '.join(sorted(TOPICS))}")
    text = TOPICS[topic]
    if topic != "conventions":
        text = text + "\n" + _CONVENTIONS
    return text


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="moyal", description="Moyal star product toolkit")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment config")
    run.add_argument("config", type=Path)
    run.add_argument("--grid-N", dest="grid_N", type=int)
    run.add_argument("--grid-L", dest="grid_L", type=float)
    run.add_argument("--theta0", type=float)
    run.add_argument("--output", help="override the output path prefix")
    desc = sub.add_parser("describe", help="show formulas and conventions")
    desc.add_argument("topic")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "describe":
            sys.stdout.write(describe(args.topic))
            return 0
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc.strerror}") from None
        cfg = parse_config(text, args.grid_N, args.grid_L, args.theta0)
        report, plot = run_experiment(cfg)
        prefix = args.output or cfg.output
        if not Path(prefix).is_absolute() and args.output is None:
            prefix = str(args.config.parent / prefix)
        try:
            Path(prefix).parent.mkdir(parents=True, exist_ok=True)
            Path(f"{prefix}.report.json").write_text(dumps(report))
            Path(f"{prefix}.plot.csv").write_text(plot)
        except OSError as exc:
            raise UsageError(f"cannot write output {prefix!r}: {exc.strerror}") from None
        for c in report["checks"]:
            print(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}")
        return 0 if report["passed"] else 1
    except (ConfigError, UsageError) as exc:
        print(f"moyal: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
