"""Batch command-line front end.

Subcommands: sample | density | delta-check | jacobian-check | hciz | f1 |
verify.  Exit codes: 0 success or pass, 1 failed verification, 2 usage
error.  Identical invocations (including seed) produce byte-identical
outputs.

Matrix literals: rows separated by ";", entries by ",", complex entries as
``re+imi`` (examples: ``2``, ``1+2i``, ``-0.5i``).  Vector and coefficient
literals are comma-separated; polynomial coefficients are given highest
degree first.  The seed resolution order is: ``--seed`` flag, config file,
the RMTLAB_SEED environment variable, then the default 0xD1AC.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__, delta1d, ensembles, jacobians, specialfn, statcheck
from .ensembles import DEFAULT_SEED, RngStream

SUBCOMMANDS = (
    "sample",
    "density",
    "delta-check",
    "jacobian-check",
    "hciz",
    "f1",
    "verify",
)

_ENV_SEED = "RMTLAB_SEED"


class UsageError(Exception):
    """Invalid configuration; message names the offending key."""


def fmt(x):
    """Floating-point text with 17 significant digits (round-trip exact)."""
    return f"{float(x):.17g}"


def parse_complex_entry(text):
    try:
        return complex(text.strip().replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad matrix entry {text!r}") from None


def parse_matrix(spec):
    """Matrix from an ``a,b;c,d`` literal or a JSON-style nested list."""
    if not isinstance(spec, str):
        try:
            mat = np.array(spec, dtype=complex)
        except (TypeError, ValueError):
            raise UsageError(f"bad matrix value {spec!r}") from None
        if mat.ndim == 1:
            mat = np.diag(mat)
        if mat.ndim != 2:
            raise UsageError("matrix must be two-dimensional")
        return mat
    rows = [r for r in spec.strip().split(";") if r.strip()]
    if not rows:
        raise UsageError("empty matrix literal")
    data = [[parse_complex_entry(e) for e in row.split(",")] for row in rows]
    width = len(data[0])
    if any(len(r) != width for r in data):
        raise UsageError("ragged matrix literal")
    return np.array(data, dtype=complex)


def parse_vector(spec):
    if not isinstance(spec, str):
        try:
            return np.array(spec, dtype=float).reshape(-1)
        except (TypeError, ValueError):
            raise UsageError(f"bad vector value {spec!r}") from None
    try:
        return np.array([float(v) for v in spec.split(",") if v.strip() != ""])
    except ValueError:
        raise UsageError(f"bad vector literal {spec!r}") from None


def _matrix_text(mat):
    return ";".join(
        ",".join(
            fmt(z.real) + (f"+{fmt(z.imag)}i" if z.imag >= 0 else f"{fmt(z.imag)}i")
            if z.imag != 0
            else fmt(z.real)
            for z in row
        )
        for row in np.asarray(mat, dtype=complex)
    )


def _emit(payload, out_path):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_seed(args_seed, config):
    if args_seed is not None:
        return int(args_seed)
    if "seed" in config:
        return int(config["seed"])
    env = os.environ.get(_ENV_SEED)
    if env is not None:
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"bad {_ENV_SEED} value {env!r}") from None
    return DEFAULT_SEED


def _base_payload(args, seed):
    echo = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "config") and v is not None
    }
    echo["seed"] = seed
    return {"version": __version__, "seed": seed, "config": echo}


# ----------------------------------------------------------------------
# sample
# ----------------------------------------------------------------------

def _build_spec(args):
    kind = args.ensemble
    sigma = parse_matrix(args.sigma) if args.sigma else None
    if kind == "ginibre":
        return ensembles.Ginibre(args.m, args.n)
    if kind == "wishart":
        return ensembles.Wishart(args.m, args.n, sigma)
    if kind == "induced":
        return ensembles.Induced(args.m, args.n)
    if kind == "sum-wishart":
        comps = tuple((args.n, sigma) for _ in range(args.k))
        return ensembles.SumWishart(args.m, comps)
    if kind == "haar":
        return ensembles.HaarUnitary(args.m)
    raise UsageError(f"unknown ensemble {kind!r}")


def _cmd_sample(args, seed):
    try:
        spec = _build_spec(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rng = RngStream(seed)
    hermitian = isinstance(
        spec, (ensembles.Wishart, ensembles.Induced, ensembles.SumWishart)
    )
    flatten = args.matrix_out or not hermitian
    meta = (
        f"# ensemble={args.ensemble} m={args.m} n={args.n or ''} "
        f"k={getattr(args, 'k', 1)} seed={seed} samples={args.samples}"
    )
    draws = [ensembles.sample(spec, rng) for _ in range(args.samples)]
    if flatten:
        m, n = draws[0].shape
        header = ",".join(
            f"re_{i}{j},im_{i}{j}" for i in range(m) for j in range(n)
        )
        lines = [meta, header]
        for d in draws:
            flat = d.flatten()
            lines.append(",".join(f"{fmt(z.real)},{fmt(z.imag)}" for z in flat))
    else:
        values = np.stack([np.linalg.eigvalsh(d)[::-1] for d in draws])
        if args.hist:
            hist = statcheck.Histogram.from_samples(values[:, 0], bins=args.hist)
            lines = [meta, "bin_lo,bin_hi,count,density"]
            for lo, hi, count, dens in hist.rows():
                lines.append(f"{fmt(lo)},{fmt(hi)},{count},{fmt(dens)}")
        else:
            lines = [meta, ",".join(f"eig{j + 1}" for j in range(values.shape[1]))]
            for row in values:
                lines.append(",".join(fmt(v) for v in row))
    _write_csv(lines, args.out)
    return 0


# ----------------------------------------------------------------------
# density
# ----------------------------------------------------------------------

def _cmd_density(args, seed):
    payload = _base_payload(args, seed)
    sigma = parse_matrix(args.sigma) if args.sigma else None
    try:
        if args.kind == "wishart-matrix":
            if not args.matrix:
                raise UsageError("density wishart-matrix requires --matrix")
            w = parse_matrix(args.matrix)
            value = ensembles.logdensity_wishart_matrix(w, args.n, sigma)
        elif args.kind in ("wishart-eigs", "induced-eigs"):
            if not args.eigs:
                raise UsageError(f"density {args.kind} requires --eigs")
            lam = parse_vector(args.eigs)
            value = ensembles.logdensity_eigs(
                lam, args.kind.split("-")[0], args.n, lam.size
            )
        else:
            raise UsageError(f"unknown density kind {args.kind!r}")
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload["logdensity"] = value
    _emit(payload, args.out)
    return 0


# ----------------------------------------------------------------------
# delta-check
# ----------------------------------------------------------------------

_ORDER_BAND = 0.15
_EXACT_RESIDUAL = 1e-9


def _measured_order(residuals, eps_grid):
    res = np.abs(np.asarray(residuals, dtype=float))
    if np.all(res < _EXACT_RESIDUAL):
        return None  # identity holds exactly at every width
    res = np.maximum(res, 1e-300)
    slope, _ = np.polyfit(np.log(np.asarray(eps_grid)), np.log(res), 1)
    return float(slope)


def _delta_convergence(residual_fn, eps_grid):
    residuals = [residual_fn(e) for e in eps_grid]
    order = _measured_order(residuals, eps_grid)
    ok = order is None or abs(order - 2.0) <= _ORDER_BAND
    return {
        "eps_grid": list(eps_grid),
        "residuals": residuals,
        "measured_order": order,
        "pass": bool(ok),
    }


def _cmd_delta_check(args, seed):
    payload = _base_payload(args, seed)
    eps_grid = list(delta1d.EPS_GRID)
    f = delta1d.TestFunction(
        parse_vector(args.f) if args.f else [1.0], envelope=args.envelope
    )
    op = args.op
    if op == "sampling":
        result = _delta_convergence(
            lambda e: delta1d.sampling_residual(f, args.a, e), eps_grid
        )
    elif op == "derivative":
        target = (-1.0) ** args.order * f.derivative(0.0, args.order)
        result = _delta_convergence(
            lambda e: delta1d.derivative_pairing(f, args.order, e) - target,
            eps_grid,
        )
        result["target"] = target
    elif op == "scaling":
        if args.a == 0:
            raise UsageError("scaling requires a nonzero --a")
        result = _delta_convergence(
            lambda e: delta1d.scaling_check(args.a, f, e)[0]
            - delta1d.scaling_check(args.a, f, e)[1],
            eps_grid,
        )
    elif op == "composition":
        if not args.g:
            raise UsageError("composition requires --g")
        try:
            g = delta1d.PolynomialG(parse_vector(args.g))
            lhs, rhs = delta1d.composition_roots(g, f, eps_grid[-1])
        except delta1d.DegenerateCompositionError as exc:
            raise UsageError(str(exc)) from None
        result = _delta_convergence(
            lambda e: delta1d.composition_roots(g, f, e)[0]
            - delta1d.composition_roots(g, f, e)[1],
            eps_grid,
        )
        result["lhs"] = lhs
        result["rhs"] = rhs
    elif op == "convolution":
        shift_a, shift_b = args.a, args.b

        def residual(e):
            prof = delta1d.convolution_shift(shift_a, shift_b, e, e)
            return prof.pair(f) - float(f(prof.center))

        result = _delta_convergence(residual, eps_grid)
        prof = delta1d.convolution_shift(shift_a, shift_b, 0.1, 0.1)
        result["peak"] = prof.peak
        result["max_profile_error"] = prof.max_error
    elif op == "pv":
        values = {}
        ok = True
        for w in (1.0, -1.0, 2.0, -2.0):
            v = delta1d.pv_sinc(w)
            values[fmt(w)] = v
            ok &= abs(v - math.copysign(math.pi, w)) <= 1e-3
        result = {"values": values, "pass": bool(ok)}
    elif op == "dirichlet":
        t_grid = (10.0, 40.0, 160.0)
        target = float(f(0.0))
        errors = [abs(delta1d.dirichlet_delta(f, t) - target) for t in t_grid]
        monotone = all(
            errors[i + 1] <= errors[i] + 1e-9 for i in range(len(errors) - 1)
        )
        result = {
            "T_grid": list(t_grid),
            "errors": errors,
            "target": target,
            "pass": bool(monotone),
        }
    else:
        raise UsageError(f"unknown delta op {op!r}")
    payload["result"] = result
    _emit(payload, args.out)
    return 0 if result["pass"] else 1


# ----------------------------------------------------------------------
# jacobian-check
# ----------------------------------------------------------------------

def _cmd_jacobian_check(args, seed):
    payload = _base_payload(args, seed)
    kind = args.kind
    tol = 1e-9
    try:
        if kind in ("symmetric", "hermitian"):
            a = parse_matrix(args.matrix)
            computed = jacobians.delta_scale_congruence(a, kind)
            expected = jacobians.congruence_scale_expected(a, kind)
        elif kind == "vector":
            a = parse_matrix(args.matrix)
            computed = jacobians.delta_scale_vector(a.real)
            expected = abs(np.linalg.det(a.real))
        elif kind == "complex-vector":
            a = parse_matrix(args.matrix)
            computed = jacobians.delta_scale_complex_vector(a)
            expected = abs(np.linalg.det(a)) ** 2
        elif kind == "rect":
            if not args.matrix_b:
                raise UsageError("rect requires --matrix-b")
            a = parse_matrix(args.matrix)
            b = parse_matrix(args.matrix_b)
            computed = jacobians.delta_scale_rect(a, b, field=args.field)
            n, m = b.shape[0], a.shape[0]
            if args.field == "real":
                expected = (
                    abs(np.linalg.det(a.real)) ** n * abs(np.linalg.det(b.real)) ** m
                )
            else:
                expected = (
                    abs(np.linalg.det(a)) ** (2 * n) * abs(np.linalg.det(b)) ** (2 * m)
                )
        elif kind in ("fourier-symmetric", "fourier-hermitian"):
            which = kind.split("-")[1]
            computed = jacobians.fourier_constant(args.m, which)
            expected = jacobians.fourier_constant_expected(args.m, which)
            tol = 1e-3
        else:
            raise UsageError(f"unknown jacobian kind {kind!r}")
    except (ValueError, jacobians.SingularTransformError) as exc:
        raise UsageError(str(exc)) from None
    rel = abs(computed - expected) / max(abs(expected), 1e-300)
    ok = rel <= tol
    payload.update(
        {
            "computed": computed,
            "expected": expected,
            "relative_error": rel,
            "tolerance": tol,
            "pass": bool(ok),
        }
    )
    _emit(payload, args.out)
    return 0 if ok else 1


# ----------------------------------------------------------------------
# hciz / f1 / verify
# ----------------------------------------------------------------------

def _cmd_hciz(args, seed):
    payload = _base_payload(args, seed)
    a = parse_vector(args.a)
    b = parse_vector(args.b)
    try:
        closed = specialfn.hciz_closed_form(a, b)
        mc = specialfn.hciz_monte_carlo(
            np.diag(a).astype(complex),
            np.diag(b).astype(complex),
            args.samples,
            RngStream(seed),
        )
    except (ValueError, specialfn.DegenerateSpectrumError) as exc:
        raise UsageError(str(exc)) from None
    ok = mc.agrees_with(closed)
    payload.update(
        {
            "closed_form": closed,
            "monte_carlo": {
                "value": mc.value,
                "stderr": mc.stderr,
                "n_samples": mc.n_samples,
            },
            "pass": bool(ok),
        }
    )
    _emit(payload, args.out)
    return 0 if ok else 1


def _cmd_f1(args, seed):
    payload = _base_payload(args, seed)
    lam = parse_matrix(args.lam)
    try:
        if args.kummer:
            check = specialfn.kummer_residual(
                args.a, args.c, lam, args.samples, RngStream(seed)
            )
            ok = check.passed()
            payload.update(
                {
                    "lhs": {"value": check.lhs.value, "stderr": check.lhs.stderr},
                    "rhs": {"value": check.rhs.value, "stderr": check.rhs.stderr},
                    "residual": check.residual,
                    "combined_stderr": check.combined_stderr,
                    "n_samples": args.samples,
                    "pass": bool(ok),
                }
            )
        else:
            est = specialfn.matrix_1f1(
                args.a, args.c, lam, args.samples, RngStream(seed)
            )
            ok = True
            payload.update(
                {
                    "value": est.value,
                    "stderr": est.stderr,
                    "n_samples": est.n_samples,
                    "pass": True,
                }
            )
    except (ValueError, specialfn.RejectionStarvedError) as exc:
        raise UsageError(str(exc)) from None
    _emit(payload, args.out)
    return 0 if ok else 1


def _cmd_verify(args, seed):
    payload = _base_payload(args, seed)
    params = {}
    if args.n is not None:
        params["n"] = args.n
    if args.k is not None:
        params["k"] = args.k
    try:
        verdict = statcheck.verify_suite(
            args.suite, n_samples=args.samples, seed=seed, **params
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    payload["verdict"] = verdict
    _emit(payload, args.out)
    return 0 if verdict["pass"] else 1


# ----------------------------------------------------------------------
# Parser assembly
# ----------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="rmtlab",
        description="Matrix delta-function calculus and random-matrix checks.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand")

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    p = sub.add_parser("sample", help="draw from an ensemble, write CSV")
    add_common(p)
    p.add_argument(
        "--ensemble",
        choices=("ginibre", "wishart", "induced", "sum-wishart", "haar"),
        required=False,
    )
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=1, help="summands for sum-wishart")
    p.add_argument("--sigma", default=None, help="covariance matrix literal")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument(
        "--matrix-out", action="store_true", help="emit flattened matrices"
    )
    p.add_argument("--hist", type=int, default=None, help="histogram bins")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("density", help="evaluate an unnormalized log-density")
    add_common(p)
    p.add_argument(
        "--kind", choices=("wishart-matrix", "wishart-eigs", "induced-eigs")
    )
    p.add_argument("--matrix", default=None)
    p.add_argument("--eigs", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--sigma", default=None)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("delta-check", help="mollified 1-D delta identities")
    add_common(p)
    p.add_argument(
        "--op",
        choices=(
            "sampling",
            "derivative",
            "scaling",
            "composition",
            "convolution",
            "pv",
            "dirichlet",
        ),
    )
    p.add_argument("--f", default=None, help="test function coefficients")
    p.add_argument("--envelope", type=float, default=None)
    p.add_argument("--g", default=None, help="composition polynomial coefficients")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--order", type=int, default=1)
    p.set_defaults(func=_cmd_delta_check)

    p = sub.add_parser("jacobian-check", help="delta transformation scales")
    add_common(p)
    p.add_argument(
        "--kind",
        choices=(
            "vector",
            "complex-vector",
            "rect",
            "symmetric",
            "hermitian",
            "fourier-symmetric",
            "fourier-hermitian",
        ),
    )
    p.add_argument("--matrix", default=None)
    p.add_argument("--matrix-b", default=None)
    p.add_argument("--field", choices=("real", "complex"), default="real")
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(func=_cmd_jacobian_check)

    p = sub.add_parser("hciz", help="closed form vs Haar Monte Carlo")
    add_common(p)
    p.add_argument("--a", default=None, help="first spectrum, comma separated")
    p.add_argument("--b", default=None, help="second spectrum, comma separated")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=_cmd_hciz)

    p = sub.add_parser("f1", help="matrix-argument confluent hypergeometric")
    add_common(p)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--lam", "--lambda", dest="lam", default=None)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--kummer", action="store_true")
    p.set_defaults(func=_cmd_f1)

    p = sub.add_parser("verify", help="named statistical suites")
    add_common(p)
    p.add_argument("--suite", choices=tuple(statcheck.SUITES), default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(func=_cmd_verify)

    return parser


_CONFIG_ALIASES = {"lambda": "lam"}


def _apply_config(args, parser):
    """Overlay config-file values under explicit flags."""
    if not args.config:
        return args
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"config: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("config: top level must be an object")
    known = set(vars(args))
    defaults = {
        a.dest: a.default
        for a in parser._actions  # noqa: SLF001 - argparse has no public view
    }
    for key, value in raw.items():
        dest = _CONFIG_ALIASES.get(key, key.replace("-", "_"))
        if dest == "subcommand":
            if value != args.subcommand:
                raise UsageError(
                    f"config: subcommand {value!r} does not match {args.subcommand!r}"
                )
            continue
        if dest not in known:
            raise UsageError(f"config: unknown key {key!r}")
        if getattr(args, dest) == defaults.get(dest, None):
            setattr(args, dest, value)
    return args


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return 2
    try:
        sub = next(
            p for a in parser._subparsers._group_actions  # noqa: SLF001
            for n, p in a.choices.items() if n == args.subcommand
        )
        args = _apply_config(args, sub)
        _validate_required(args)
        seed = _resolve_seed(args.seed, {})
        return args.func(args, seed)
    except UsageError as exc:
        print(f"rmtlab: error: {exc}", file=sys.stderr)
        return 2


def _validate_required(args):
    need = {
        "sample": ("ensemble", "m", "samples"),
        "density": ("kind", "n"),
        "delta-check": ("op",),
        "jacobian-check": ("kind",),
        "hciz": ("a", "b"),
        "f1": ("a", "c", "lam"),
        "verify": ("suite",),
    }[args.subcommand]
    for key in need:
        if getattr(args, key, None) is None:
            raise UsageError(f"missing required option '{key}'")
    for key in ("m", "n", "samples", "k"):
        val = getattr(args, key, None)
        if val is not None and isinstance(val, int) and val < 1:
            raise UsageError(f"option '{key}' must be a positive integer")
    if args.subcommand == "sample" and args.ensemble != "haar" and args.n is None:
        raise UsageError("missing required option 'n'")


def console_main():
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
