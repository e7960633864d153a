"""Command-line front end.

    spherecalc verify {identities,spectral,concentration,all} [--n N] [--samples S] ...
    spherecalc eval <operator> --field SPEC --point SPEC [--n N] ...
    spherecalc scaling <preset> --n-list 10,20,40,80 [--samples S]

Exit codes: 0 success (every applicable check passed), 1 a check failed,
2 bad configuration or input.
"""

import argparse
import json
import os
import sys

import numpy as np

from .fields import FieldSpecError, PolynomialField, parse_field, parse_vector
from .integrate import SamplerConfig
from .polynomial import DegreeGuardError, harmonic_decompose
from .reports import FAIL, INAPPLICABLE, PASS, to_csv, to_jsonl
from .spectral import project_affine
from .sphere_ops import (
    HomogeneousExtensionParams,
    d_ij,
    hom_gradient,
    hom_laplacian,
    second_order_modulus,
    spherical_gradient,
    spherical_hessian,
    spherical_laplacian,
)
from .suites import SUITES, run_suite
from .concentration import SCALING_PRESETS, tail_scaling_report

DEFAULT_N = 10
DEFAULT_SAMPLES = 1_000_000
DEFAULT_SEED = 42
EVAL_OPERATORS = ("grad_s", "hess_s", "lap_s", "d_ij", "mod2", "hom_grad", "hom_lap", "project_affine", "decompose")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


def _default_seed():
    env = os.environ.get("SPHERECALC_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"SPHERECALC_SEED must be an integer, got {env!r}") from None


def _samples(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid sample count {text!r}") from None
    if value < 1 or value != int(value):
        raise argparse.ArgumentTypeError(f"sample count must be a positive integer, got {text!r}")
    return int(value)


def _common(p):
    p.add_argument("--n", type=int, default=None, help=f"dimension of the ambient space (default {DEFAULT_N})")
    p.add_argument("--samples", type=_samples, default=DEFAULT_SAMPLES, help="Monte Carlo samples (default 1e6)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default 42, or $SPHERECALC_SEED)")
    p.add_argument("--workers", type=int, default=0, help="worker threads (default: all cores)")
    p.add_argument("--field", default=None, help="field as JSON or a preset such as poly:x1^2, linear:v=e1")
    p.add_argument("--out", default=None, help="also write the output to this path")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--tol", type=float, default=None, help="relative tolerance for exact-path checks")


def build_parser():
    parser = argparse.ArgumentParser(prog="spherecalc", description="Calculus and concentration checks on spheres.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a named check suite")
    v.add_argument("suite", choices=SUITES)
    _common(v)

    e = sub.add_parser("eval", help="evaluate one operator at a point")
    e.add_argument("operator", choices=EVAL_OPERATORS)
    _common(e)
    e.add_argument("--point", default="e1", help="point as e<k> or comma-separated coordinates")
    e.add_argument("--i", type=int, default=1, help="first index for d_ij (1-based)")
    e.add_argument("--j", type=int, default=1, help="second index for d_ij (1-based)")
    e.add_argument("--d", type=float, default=2.0, help="homogeneity order for hom_grad/hom_lap")

    s = sub.add_parser("scaling", help="tail quantiles of a normalized family across dimensions")
    s.add_argument("preset", choices=sorted(SCALING_PRESETS))
    _common(s)
    s.add_argument("--n-list", default="10,20,40,80", help="comma-separated dimensions")
    return parser


def _config(args, n):
    if n < 2:
        raise ConfigError(f"n must be >= 2, got {n}")
    if args.workers < 0:
        raise ConfigError("--workers must be >= 0")
    seed = args.seed if args.seed is not None else _default_seed()
    return SamplerConfig(n=n, samples=args.samples, seed=seed, workers=args.workers)


def _field(args, n):
    if args.field is None:
        return None
    try:
        f = parse_field(args.field, n)
    except (FieldSpecError, ValueError) as exc:
        raise ConfigError(f"bad --field: {exc}") from None
    if f.n != n:
        raise ConfigError(f"--field has dimension {f.n} but --n is {n}")
    return f


def _emit(text, args):
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _dimension(args):
    if args.n is not None:
        return args.n
    if args.field and args.field.strip().startswith(("poly:", "polynomial:")):
        from .polynomial import parse_polynomial

        try:
            return max(parse_polynomial(args.field.split(":", 1)[1]).n, 2)
        except ValueError as exc:
            raise ConfigError(f"bad --field: {exc}") from None
    return DEFAULT_N


def cmd_verify(args):
    n = _dimension(args)
    config = _config(args, n)
    field = _field(args, n)
    try:
        reports = run_suite(args.suite, config, field)
    except (ValueError, DegreeGuardError) as exc:
        raise ConfigError(str(exc)) from None
    if args.tol is not None:
        for r in reports:
            r.retolerance(args.tol)
    _emit(to_csv(reports) if args.format == "csv" else to_jsonl(reports), args)
    counts = {s: sum(r.status == s for r in reports) for s in (PASS, FAIL, INAPPLICABLE)}
    sys.stderr.write(f"{len(reports)} checks: {counts[PASS]} pass, {counts[FAIL]} fail, "
                     f"{counts[INAPPLICABLE]} inapplicable\n")
    for r in reports:
        if r.status == FAIL:
            sys.stderr.write(f"FAIL {r.name}: lhs={r.lhs!r} rhs={r.rhs!r} stderr={r.stderr!r}\n")
    return EXIT_FAIL if counts[FAIL] else EXIT_OK


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


def cmd_eval(args):
    n = _dimension(args)
    f = _field(args, n)
    if f is None:
        raise ConfigError("eval needs --field")
    try:
        x = parse_vector(args.point, n)
    except (FieldSpecError, ValueError) as exc:
        raise ConfigError(f"bad --point: {exc}") from None
    op = args.operator
    out = {"operator": op, "n": n}
    if op in ("hom_grad", "hom_lap"):
        if not np.any(x):
            raise ConfigError("homogeneous extensions are undefined at x = 0")
        params = HomogeneousExtensionParams(args.d)
        out["x"] = x.tolist()
        out["d"] = args.d
        out["value"] = _jsonable(hom_gradient(f, params, x) if op == "hom_grad" else hom_laplacian(f, params, x))
    elif op in ("project_affine", "decompose"):
        if op == "decompose":
            if not isinstance(f, PolynomialField):
                raise ConfigError("decompose needs a polynomial field")
            try:
                dec = harmonic_decompose(f.poly)
            except DegreeGuardError as exc:
                raise ConfigError(str(exc)) from None
            out["components"] = {f"d{d}": h.to_string() for d, h in dec}
            out["decomposition"] = dec.to_list()
        else:
            proj = project_affine(f, _config(args, n))
            out.update(m=proj.m, v=proj.v.tolist(), exact=proj.exact)
            if proj.residual_poly is not None:
                out["residual"] = proj.residual_poly.to_string()
    else:
        norm = np.linalg.norm(x)
        if norm == 0:
            raise ConfigError("--point must be nonzero")
        theta = x / norm
        out["theta"] = theta.tolist()
        if op == "grad_s":
            value = spherical_gradient(f, theta)
        elif op == "hess_s":
            value = spherical_hessian(f, theta)
        elif op == "lap_s":
            value = spherical_laplacian(f, theta)
        elif op == "mod2":
            value = second_order_modulus(f, theta)
        else:
            i, j = args.i - 1, args.j - 1
            if not (0 <= i < n and 0 <= j < n):
                raise ConfigError(f"--i/--j must lie in 1..{n}")
            out.update(i=args.i, j=args.j)
            value = d_ij(f, theta, i, j)
        out["value"] = _jsonable(value)
    _emit(json.dumps(out, sort_keys=True) + "\n", args)
    return EXIT_OK


def cmd_scaling(args):
    try:
        n_list = [int(s) for s in args.n_list.split(",") if s.strip()]
    except ValueError:
        raise ConfigError(f"bad --n-list {args.n_list!r}") from None
    if not n_list or min(n_list) < 2:
        raise ConfigError("--n-list needs dimensions >= 2")
    config = _config(args, n_list[0])
    table = tail_scaling_report(args.preset, n_list, config)
    _emit(table.to_csv() if args.format == "csv" else json.dumps(table.to_dict(), sort_keys=True) + "\n", args)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "eval": cmd_eval, "scaling": cmd_scaling}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        sys.stderr.write(f"spherecalc: error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
