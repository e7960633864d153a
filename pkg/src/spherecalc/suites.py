"""Named batteries of checks: pointwise identities, spectral facts and
concentration inequalities.  Each suite returns reports in a fixed order."""

import math

import numpy as np

from . import concentration as conc
from .fields import PlaneWaveField, PolynomialField
from .integrate import SamplerConfig
from .polynomial import Polynomial, harmonic_decompose, parse_polynomial
from .reports import CheckReport
from .spectral import (
    SHARP_INEQUALITIES,
    SpectralField,
    check_hessian_energy_identity,
    check_sharp_constants,
    eigen_minimization_scan,
    gradient_mean_pair,
    green_pair,
    parseval_pair,
    weighted_green_pair,
)
from .sphere_ops import (
    commutator_residual,
    d_matrix,
    hessian_vector_identity_residual,
    hom_gradient,
    hom_hessian_apply,
    hom_laplacian,
    hom_value,
    operator_norm,
    second_order_modulus,
    spherical_hessian,
    spherical_laplacian,
)

# identity tolerances
TOL_HESSIAN_VECTOR = 1e-8
TOL_COMMUTATOR = 1e-7
TOL_REL = 1e-9
TOL_FD = 1e-5
FD_STEP = 1e-5
HOM_ORDERS = (0.0, 1.0, 2.5, -1.0)


def random_polynomial(n, degree, rng, terms=6):
    """Polynomial with ``terms`` random monomials of total degree <= ``degree``."""
    E = np.zeros((terms, n), dtype=np.int64)
    for k in range(terms):
        for _ in range(int(rng.integers(0, degree + 1))):
            E[k, rng.integers(0, n)] += 1
    return Polynomial(n, E, rng.standard_normal(terms))


def random_harmonic(n, d, rng):
    """A nonzero degree-``d`` spherical harmonic from a random homogeneous polynomial."""
    while True:
        E = np.zeros((6, n), dtype=np.int64)
        for k in range(6):
            for _ in range(d):
                E[k, rng.integers(0, n)] += 1
        comp = harmonic_decompose(Polynomial(n, E, rng.standard_normal(6))).component(d)
        if comp is not None and not comp.is_zero():
            return comp


def random_unit(n, rng, size=None):
    Z = rng.standard_normal((n,) if size is None else (size, n))
    return Z / np.linalg.norm(Z, axis=-1, keepdims=True)


def identity_fields(n, rng):
    """Fields with exact derivatives up to order three, labelled."""
    return [
        ("poly_deg3", PolynomialField(random_polynomial(n, 3, rng))),
        ("poly_deg4", PolynomialField(random_polynomial(n, 4, rng))),
        ("plane_wave_cos", PlaneWaveField(1.3, random_unit(n, rng), "cos")),
        ("plane_wave_sin", PlaneWaveField(0.7, random_unit(n, rng), "sin", amplitude=1.5)),
    ]


def _rel(a, b):
    return np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))


def _bound_report(name, ref, n, worst, tol, seed, draws, label):
    """Report that a worst residual over ``draws`` stays below ``tol``."""
    return CheckReport(f"{name}[{label}]", ref, n, float(worst), tol, kind="inequality", margin_policy="absolute",
                       tol=0.0, seed=seed, params={"draws": draws, "field": label})


def _fd_gradient(F, X, h=FD_STEP):
    n = X.shape[1]
    out = np.empty_like(X)
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        out[:, k] = (F(X + e) - F(X - e)) / (2 * h)
    return out


def pointwise_identities(f, n, rng, draws, seed, label):
    """Worst-case residuals of the pointwise identities for one field."""
    T = random_unit(n, rng, draws)
    V = random_unit(n, rng, draws)
    out = []

    hv = max(float(hessian_vector_identity_residual(f, T[k], V[k])) for k in range(draws))
    out.append(_bound_report("hessian_vector_identity", "f''_S v = grad_S <grad_S f, v> + <v, theta> grad_S f",
                             n, hv, TOL_HESSIAN_VECTOR, seed, draws, label))

    cm = max(float(commutator_residual(f, T[k], V[k])) for k in range(draws))
    out.append(_bound_report("laplacian_gradient_commutator",
                             "Lap_S <grad_S f, v> - <grad_S Lap_S f, v> = (n-3)<grad_S f, v> - 2<v, theta> Lap_S f",
                             n, cm, TOL_COMMUTATOR, seed, draws, label))

    lap = spherical_laplacian(f, T)
    tr = np.trace(spherical_hessian(f, T), axis1=1, axis2=2)
    out.append(_bound_report("laplacian_euclidean_form",
                             "Lap_S f = Lap f - (n-1)<grad f, theta> - <f'' theta, theta> equals tr f''_S",
                             n, _rel(lap, tr).max(), TOL_REL, seed, draws, label))

    D = d_matrix(f, T)
    out.append(_bound_report("second_partials_trace", "sum_i D_i D_i f = Lap_S f",
                             n, _rel(np.trace(D, axis1=1, axis2=2), lap).max(), TOL_REL, seed, draws, label))
    g = f.gradient(T)
    skew = np.einsum("mi,mj->mij", T, g) - np.einsum("mj,mi->mij", T, g)
    scale = np.maximum(1.0, np.abs(D).max(axis=(1, 2)))
    defect = np.abs(D - D.transpose(0, 2, 1) - skew).max(axis=(1, 2)) / scale
    out.append(_bound_report("second_partials_antisymmetry", "D_i D_j f - D_j D_i f = theta_i d_j f - theta_j d_i f",
                             n, defect.max(), TOL_REL, seed, draws, label))

    mod = second_order_modulus(f, T)
    opn = operator_norm(spherical_hessian(f, T))
    out.append(_bound_report("second_order_modulus_bound", "|grad_S^2 f| <= ||f''_S||",
                             n, float(np.max(mod - opn)), TOL_REL, seed, draws, label))

    # homogeneous extensions against central differences, at radii in [0.5, 2]
    X = T * rng.uniform(0.5, 2.0, size=(draws, 1))
    worst_g = worst_h = worst_l = 0.0
    for d in HOM_ORDERS:
        F = lambda Y, d=d: hom_value(f, d, Y)  # noqa: E731
        G = lambda Y, d=d: hom_gradient(f, d, Y)  # noqa: E731
        grad = G(X)
        worst_g = max(worst_g, _rel(grad, _fd_gradient(F, X)).max())
        jac = np.stack([(G(X + FD_STEP * e) - G(X - FD_STEP * e)) / (2 * FD_STEP) for e in np.eye(n)], axis=2)
        hw = hom_hessian_apply(f, d, X, V[0])
        worst_h = max(worst_h, _rel(hw, jac @ V[0]).max())
        worst_l = max(worst_l, _rel(hom_laplacian(f, d, X), np.trace(jac, axis1=1, axis2=2)).max())
    out.append(_bound_report("homogeneous_gradient", "grad F = r^{d-1} [d f theta + grad_S f] vs central differences",
                             n, worst_g, TOL_FD, seed, draws, label))
    out.append(_bound_report("homogeneous_hessian", "F'' w five-term formula vs central differences of grad F",
                             n, worst_h, TOL_FD, seed, draws, label))
    out.append(_bound_report("homogeneous_laplacian", "Lap F = r^{d-2} [d(n+d-2) f + Lap_S f] vs central differences",
                             n, worst_l, TOL_FD, seed, draws, label))
    return out


def _pair_report(name, ref, n, pair, seed, label, tol=TOL_REL):
    lhs, rhs = (np.asarray(x, dtype=float) for x in pair)
    if lhs.ndim:
        worst = float(_rel(lhs, rhs).max())
        return CheckReport(f"{name}[{label}]", ref, n, worst, tol, kind="inequality", margin_policy="absolute",
                           tol=0.0, seed=seed, params={"field": label, "vector": True})
    return CheckReport(f"{name}[{label}]", ref, n, float(lhs), float(rhs), kind="identity", tol=tol, seed=seed,
                       params={"field": label})


def integral_identities(n, rng, seed, draws=4):
    """Exact polynomial identities: Parseval, gradient mean, Green and weighted Green."""
    out = []
    for k in range(draws):
        p, q, w = (random_polynomial(n, 3, rng) for _ in range(3))
        label = f"poly_triple{k}"
        out.append(_pair_report("parseval", "sum_d ||h_d||^2 = int f^2", n, parseval_pair(p), seed, label))
        out.append(_pair_report("gradient_mean", "int f theta = (1/(n-1)) int grad_S f", n,
                                gradient_mean_pair(p), seed, label))
        out.append(_pair_report("green", "int <grad_S f, grad_S g> = -int f Lap_S g", n, green_pair(p, q), seed, label))
        out.append(_pair_report("weighted_green",
                                "int <grad_S f, grad_S g> w = -int f Lap_S g w - int f <grad_S g, grad_S w>",
                                n, weighted_green_pair(p, q, w), seed, label))
        v = random_unit(n, rng)
        out.append(_pair_report("weighted_green_linear_weight",
                                "weighted Green formula with w = <v, theta>", n,
                                weighted_green_pair(p, q, Polynomial.linear(v)), seed, label))
    return out


def eigen_reports(n, rng, seed, degrees=(1, 2, 3), points=100):
    out = []
    for d in degrees:
        h = random_harmonic(n, d, rng)
        T = random_unit(n, rng, points)
        f = PolynomialField(h)
        lap = spherical_laplacian(f, T)
        target = -d * (n + d - 2) * f.evaluate(T)
        scale = max(1.0, float(np.abs(target).max()))
        worst = float(np.abs(lap - target).max() / scale)
        out.append(CheckReport(f"harmonic_eigenvalue[d={d}]", "Lap_S h_d = -d(n+d-2) h_d", n, worst, TOL_REL,
                               kind="inequality", margin_policy="absolute", tol=0.0, seed=seed,
                               params={"d": d, "points": points}))
    return out


def identity_suite(n, seed, draws=16):
    """Pointwise and integral identities on random fields (about 40 reports)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(101,)))
    out = []
    for label, f in identity_fields(n, rng):
        out.extend(pointwise_identities(f, n, rng, draws, seed, label))
    out.extend(integral_identities(n, rng, seed))
    out.extend(eigen_reports(n, rng, seed))
    return out


def default_spectral_fields(n):
    return [("theta1", parse_polynomial("x1", n)), ("theta1theta2", parse_polynomial("x1*x2", n))]


def spectral_suite(n, config, fields=None):
    """Sharp constants, the integrated Hessian identity and the eigenvalue scan."""
    out = []
    for label, p in fields or default_spectral_fields(n):
        sf = SpectralField(p)
        for which in SHARP_INEQUALITIES:
            r = check_sharp_constants(sf, which)
            r.name = f"{r.name}[{label}]"
            out.append(r)
        if p.degree <= 8:
            for path in ("exact", "mc"):
                r = check_hessian_energy_identity(sf, config, path=path)
                r.name = f"{r.name}_{path}[{label}]"
                out.append(r)
        T = random_unit(n, np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(102,))), 20)
        direct = spherical_laplacian(sf.field(), T)
        spec = sf.laplacian_eigen_values(T)
        out.append(CheckReport(f"eigen_action[{label}]", "Lap_S f = -sum_d d(n+d-2) f_d", n,
                               float(_rel(direct, spec).max()), TOL_REL, kind="inequality",
                               margin_policy="absolute", tol=0.0, seed=config.seed))
    for r in out:
        r.seed = config.seed
    scan = eigen_minimization_scan(n, 8)
    ref = "optimal gradient-vs-Hessian constant: c <= d^2 + (d-1)(n-2)"
    out.append(CheckReport("eigen_scan_min_all", ref, n, min(c for _, c in scan), 1.0, kind="identity",
                           seed=config.seed))
    out.append(CheckReport("eigen_scan_min_orthogonal", ref, n, min(c for d, c in scan if d >= 2), n + 2.0,
                           kind="identity", seed=config.seed))
    return out


def _poly_field(expr, n):
    return PolynomialField(parse_polynomial(expr, n))


def concentration_suite(n, config, field=None):
    """The concentration inequalities on a default field set (or on one user field)."""
    e1 = np.eye(n)[0]
    if field is not None:
        basic = [field]
        exp_fields = [field]
        theorem_jobs = [(w, field) for w in conc.THEOREM_VARIANTS]
        euclid = [field]
        gauss = [field]
    else:
        wave = PlaneWaveField(2.0, e1)
        basic = [_poly_field("x1", n), _poly_field("x1*x2", n), wave]
        exp_fields = [_poly_field(f"0.5*x1^2 - {0.5 / n!r}", n), _poly_field("x1", n)]
        half = _poly_field("0.5*x1*x2", n)
        cos_wave = PlaneWaveField(0.9, e1, "cos")
        sin_wave = PlaneWaveField(0.9, e1, "sin")
        theorem_jobs = [("intrinsic", half), ("euclidean", cos_wave), ("euclidean", sin_wave),
                        ("linear_part", cos_wave), ("linear_part", sin_wave)]
        euclid = [_poly_field("x1^2", n), _poly_field("x1*x2", n), sin_wave]
        gauss = [_poly_field("x1*x2", n), _poly_field(f"{1 / math.sqrt(2)!r}*x1^2 - {1 / math.sqrt(2)!r}", n)]
    out = []
    for f in basic:
        out.append(conc.check_poincare(f, config))
    ls_fields = basic if field is not None else [_poly_field("1 + 0.1*x1", n)] + basic[1:]
    for f in ls_fields:
        out.append(conc.check_log_sobolev(f, config))
    for variant in conc.EXP_MOMENT_VARIANTS:
        for f in exp_fields:
            out.append(conc.check_exp_moment(f, config, variant))
    for which, f in theorem_jobs:
        out.append(conc.check_theorem(f, config, which)[0])
    for f in euclid:
        out.append(conc.check_euclidean_gradient(f, config))
        out.append(conc.check_euclidean_gradient(f, config, refined=True))
        out.append(conc.check_euclidean_second_order_poincare(f, config, a=0.0))
        out.append(conc.check_euclidean_second_order_poincare(f, config, a=conc.mean_trace_shift(f, config)))
    for f in gauss:
        out.append(conc.check_gaussian_second_order(f, config))
    return out


SUITES = ("identities", "spectral", "concentration", "all")


def run_suite(name, config, field=None):
    """Reports of suite ``name`` ("all" runs the three in order)."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    n = config.n
    out = []
    if name in ("identities", "all"):
        out.extend(identity_suite(n, config.seed))
    if name in ("spectral", "all"):
        fields = None
        if field is not None:
            if not isinstance(field, PolynomialField):
                raise ValueError("the spectral suite needs a polynomial field")
            fields = [("field", field.poly)]
        out.extend(spectral_suite(n, config, fields))
    if name in ("concentration", "all"):
        out.extend(concentration_suite(n, config, field))
    return out


__all__ = ["SUITES", "SamplerConfig", "identity_suite", "spectral_suite", "concentration_suite", "run_suite",
           "random_polynomial", "random_harmonic"]
