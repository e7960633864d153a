"""Acceptance criteria, one test each.  Every test prints a single
``PASS``/``FAIL`` line with the measured quantities.

    pytest tests/test_acceptance.py -v        (or: python tests/test_acceptance.py)
"""

import itertools
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import quadrature_s2
from spherecalc.concentration import check_theorem, tail_scaling_report
from spherecalc.fields import PlaneWaveField, PolynomialField
from spherecalc.integrate import SamplerConfig, mc_integrate
from spherecalc.polynomial import Polynomial, parse_polynomial, sphere_moment
from spherecalc.spectral import SpectralField, check_hessian_energy_identity, check_sharp_constants
from spherecalc.sphere_ops import spherical_laplacian
from spherecalc.suites import (
    identity_fields,
    integral_identities,
    pointwise_identities,
    random_harmonic,
    random_polynomial,
    random_unit,
)

SEED = 20240611

pytestmark = pytest.mark.slow


@pytest.fixture
def verdict(capsys):
    """Print one PASS/FAIL line for the criterion, bypassing output capture."""

    def report(label, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}")
        return ok

    return report


def test_eigenvalue_law(verdict):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    worst = 0.0
    for n in (3, 5, 10, 20):
        for d in (1, 2, 3):
            f = PolynomialField(random_harmonic(n, d, rng))
            T = random_unit(n, rng, 100)
            target = -d * (n + d - 2) * f.evaluate(T)
            err = np.abs(spherical_laplacian(f, T) - target) / np.maximum(np.abs(target), 1e-300)
            # points where the harmonic itself nearly vanishes are judged against its size on the sample
            floor = np.abs(spherical_laplacian(f, T) - target) / np.abs(target).max()
            worst = max(worst, float(np.where(np.abs(target) > 1e-6 * np.abs(target).max(), err, floor).max()))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 1.0
    assert verdict("1 eigenvalue law", ok, f"worst rel err {worst:.2e} (tol 1e-9), {elapsed:.2f}s (limit 1s)")


def test_hessian_energy_identity(verdict):
    rng = np.random.default_rng(SEED)
    t0 = time.perf_counter()
    lines, ok = [], True
    for k in range(10):
        n = (3, 5, 8)[k % 3]
        p = random_polynomial(n, 4, rng)
        r = check_hessian_energy_identity(SpectralField(p), SamplerConfig(n=n, samples=1_000_000, seed=SEED + k))
        z = abs(r.lhs - r.rhs) / r.stderr if r.stderr else 0.0
        lines.append(f"{z:.2f}")
        ok &= r.passed
    closed = []
    for text, n, value in (("x1", 5, 4 / 5), ("x1", 10, 9 / 10), ("x1*x2", 4, 2.0)):
        r = check_hessian_energy_identity(SpectralField(parse_polynomial(text, n)), path="exact")
        rel = max(abs(r.lhs - value), abs(r.rhs - value)) / value
        closed.append(rel)
        ok &= rel <= 1e-9
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60
    assert verdict("2 integrated Hessian identity", ok,
                   f"MC |z| = [{', '.join(lines)}] (limit 4); closed-form rel err {max(closed):.1e} (tol 1e-9); "
                   f"{elapsed:.1f}s (limit 60s)")


def test_sharp_constants(verdict):
    worst, ok = 0.0, True
    for n in (4, 10):
        lin = SpectralField(parse_polynomial("x1", n))
        quad = SpectralField(parse_polynomial("x1*x2", n))
        for f, which, c in ((lin, "poincare", 1 / (n - 1)), (quad, "grad_vs_hess", 1 / (n + 2)),
                            (lin, "plain", 1 / (n - 1)), (quad, "l2_vs_hess", 1 / (2 * n * (n + 2)))):
            r = check_sharp_constants(f, which)
            rel = abs(r.params["ratio"] - c) / c
            worst = max(worst, rel)
            ok &= r.passed and rel <= 1e-9
    assert verdict("3 sharp constants", ok, f"worst rel deviation from sharp constant {worst:.1e} (tol 1e-9)")


def test_appendix_identities(verdict):
    rng = np.random.default_rng(SEED)
    reports = []
    for n in (3, 6):
        for label, f in identity_fields(n, rng):
            reports += pointwise_identities(f, n, rng, 50, SEED, label)
        reports += integral_identities(n, rng, SEED, draws=50)
    worst = {}
    for r in reports:
        key = r.name.split("[")[0]
        worst[key] = max(worst.get(key, 0.0), abs(r.lhs - r.rhs) / max(1.0, abs(r.lhs), abs(r.rhs))
                         if r.kind == "identity" else r.lhs)
    failed = [r.name for r in reports if not r.passed]
    ok = not failed
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert verdict("4 appendix identities", ok, f"{len(reports)} reports, worst: {detail}; failed {failed}")


def test_concentration_theorems(verdict):
    lines, ok = [], True
    n = 20
    config = SamplerConfig(n=n, samples=1_000_000, seed=SEED)
    x0 = np.zeros(n)
    x0[:2] = (0.6, 0.8)
    jobs = [
        ("intrinsic", PolynomialField(Polynomial.monomial([1, 1] + [0] * (n - 2), 0.5))),
        ("euclidean", PlaneWaveField(0.9, x0, "cos")),
        ("linear_part", PlaneWaveField(0.9, x0, "sin")),
    ]
    for which, f in jobs:
        t0 = time.perf_counter()
        r, audit = check_theorem(f, config, which)
        elapsed = time.perf_counter() - t0
        ok &= r.passed and audit.passed and elapsed < 120
        lines.append(f"{which} E exp = {r.lhs:.4f} +- {r.stderr:.1e} <= 2, b = {audit.b:.3f}, "
                     f"b0 = {audit.b0:.3f}, a = {audit.a:.3f}, {elapsed:.1f}s")
    assert verdict("5 concentration theorems", ok, "; ".join(lines))


def test_tail_scaling(verdict):
    t0 = time.perf_counter()
    config = SamplerConfig(n=10, samples=1_000_000, seed=SEED)
    quad = tail_scaling_report("quadratic", [10, 20, 40, 80], config)
    lin = tail_scaling_report("linear", [10, 20, 40, 80], config)
    elapsed = time.perf_counter() - t0
    ok = abs(quad.slope + 1) <= 0.15 and abs(lin.slope + 0.5) <= 0.1 and elapsed < 180
    assert verdict("6 tail scaling", ok, f"quadratic slope {quad.slope:.3f} (-1 +- 0.15), linear slope "
                   f"{lin.slope:.3f} (-0.5 +- 0.1), {elapsed:.1f}s (limit 180s)")


def test_moment_oracle(verdict):
    worst = 0.0
    count = 0
    for total in range(0, 9, 2):
        for alpha in itertools.product(range(0, total + 1, 2), repeat=3):
            if sum(alpha) != total:
                continue
            worst = max(worst, abs(sphere_moment(alpha) - quadrature_s2(alpha)))
            count += 1
    n = 8
    indices = [(2,), (4,), (6,), (8,), (2, 2), (4, 2), (2, 2, 2), (4, 4), (6, 2), (2, 2, 2, 2), (4, 2, 2), (1, 1)]
    config = SamplerConfig(n=n, samples=1_000_000, seed=SEED)
    zs = []
    for idx in indices:
        alpha = list(idx) + [0] * (n - len(idx))
        est = mc_integrate(lambda T, a=alpha: np.prod(T ** np.array(a), axis=1), config)
        zs.append(abs(est.mean - sphere_moment(alpha)) / est.stderr)
    ok = worst <= 1e-12 and max(zs) <= 4
    assert verdict("7 moment oracle", ok, f"n=3 quadrature: {count} even indices, worst abs err {worst:.1e} "
                   f"(tol 1e-12); n=8 MC: {len(zs)} indices, max |z| {max(zs):.2f} (limit 4)")


def test_cli_determinism(verdict):
    cmd = [sys.executable, "-m", "spherecalc.cli", "verify", "all", "--n", "10", "--seed", "42"]
    runs = [subprocess.run(cmd, capture_output=True) for _ in range(2)]
    same = runs[0].stdout == runs[1].stdout
    lines = runs[0].stdout.count(b"\n")
    ok = same and lines > 0 and all(r.returncode == 0 for r in runs)
    assert verdict("8 determinism", ok, f"two runs of verify all: {lines} report lines, byte-identical {same}, "
                   f"exit codes {[r.returncode for r in runs]}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
