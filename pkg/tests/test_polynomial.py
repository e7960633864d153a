import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherecalc.integrate import SamplerConfig, mc_moments
from spherecalc.polynomial import (
    DegreeGuardError,
    HarmonicDecomposition,
    Polynomial,
    harmonic_decompose,
    parse_polynomial,
    poly_sphere_integral,
    sphere_moment,
    sphere_moments,
)

from conftest import decompose_by_linear_system, monomials_of_degree, quadrature_s2


def poly_strategy(n=3, max_terms=5, max_exp=3):
    term = st.tuples(st.tuples(*[st.integers(0, max_exp)] * n), st.integers(-5, 5))
    return st.lists(term, min_size=1, max_size=max_terms).map(
        lambda ts: Polynomial(n, [t[0] for t in ts], [float(t[1]) for t in ts])
    )


def test_canonical_form_merges_and_drops_zeros():
    p = Polynomial(2, [[1, 0], [1, 0], [0, 1]], [2.0, -2.0, 3.0])
    assert p.terms == {(0, 1): 3.0}
    assert Polynomial(3).degree == -1


def test_arithmetic_and_power():
    x1, x2 = Polynomial.variable(2, 0), Polynomial.variable(2, 1)
    p = (x1 + x2) ** 2
    assert p.terms == {(2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0}
    assert (p - x1 * x1 - 2 * x1 * x2 - x2 * x2).is_zero()
    assert (p / 2).terms[(1, 1)] == 1.0


def test_derive_and_laplacian():
    p = parse_polynomial("x1^3*x2 - 3*x3 + 0.5", 3)
    assert p.derive(0).terms == {(2, 1, 0): 3.0}
    assert p.derive(2).terms == {(0, 0, 0): -3.0}
    assert p.laplacian().terms == {(1, 1, 0): 6.0}
    with pytest.raises(IndexError):
        p.derive(3)


def test_norm_sq_shorthand_and_evaluate():
    p = parse_polynomial("r2 - x1^2", 3)
    X = np.array([[1.0, 2.0, 3.0], [0.5, 0.0, -1.0]])
    np.testing.assert_allclose(p(X), [13.0, 1.0])


@pytest.mark.parametrize("bad", ["x1^", "2*", "x0", "x1 + y", ""])
def test_parse_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_polynomial(bad, 3)


def test_json_round_trip():
    p = parse_polynomial("x1^2*x3 - 0.25*x2 + 7", 4)
    q = Polynomial.from_json(p.to_json())
    assert q == p and q.n == 4


def test_moment_closed_forms():
    # E theta_1^4 = 3/(n(n+2)), E theta_1^2 theta_2^2 = 1/(n(n+2))
    assert math.isclose(sphere_moment((4, 0, 0)), 3 / 15)
    assert math.isclose(sphere_moment((2, 2, 0)), 1 / 15)
    assert sphere_moment((1, 2, 0)) == 0
    assert sphere_moment((0, 0, 0, 0)) == 1


def test_moment_matches_quadrature_n3():
    for d in range(0, 9, 2):
        for alpha in monomials_of_degree(3, d):
            if any(a % 2 for a in alpha):
                continue
            assert abs(sphere_moment(alpha) - quadrature_s2(alpha)) <= 1e-12


def test_vectorized_moments_agree():
    E = np.array([a for d in range(7) for a in monomials_of_degree(4, d)])
    ref = np.array([float(sphere_moment(a)) for a in E])
    np.testing.assert_allclose(sphere_moments(E), ref, rtol=1e-14)


def test_moment_monte_carlo_n5():
    alphas = [(2, 0, 0, 0, 0), (4, 0, 0, 0, 0), (2, 2, 0, 0, 0), (2, 2, 2, 0, 0)]
    cfg = SamplerConfig(5, samples=200_000, seed=3)
    mean, cov = mc_moments(lambda T: np.column_stack([np.prod(T ** np.array(a), axis=1) for a in alphas]), cfg)
    se = np.sqrt(np.diag(cov))
    for a, m, s in zip(alphas, mean, se):
        assert abs(m - sphere_moment(a)) <= 4 * s


def test_integral_of_harmonic_square():
    p = parse_polynomial("x1^2 - x2^2", 4) ** 2
    assert math.isclose(poly_sphere_integral(p), 1 / 6, rel_tol=1e-14)


def test_decomposition_examples():
    d = harmonic_decompose(parse_polynomial("x1^2", 3)).as_dict()
    assert d[0].allclose(Polynomial.constant(3, 1 / 3))
    assert d[2].allclose(parse_polynomial("x1^2 - 0.3333333333333333*r2", 3))
    d = harmonic_decompose(parse_polynomial("x1^3", 3)).as_dict()
    assert d[1].allclose(parse_polynomial("0.6*x1", 3))
    assert d[3].allclose(parse_polynomial("0.4*x1^3 - 0.6*x1*x2^2 - 0.6*x1*x3^2", 3))


@pytest.mark.parametrize("n,m", [(3, 2), (3, 3), (3, 4), (4, 4), (4, 5), (5, 3)])
def test_decomposition_matches_linear_system(n, m, rng):
    basis = monomials_of_degree(n, m)
    pick = rng.choice(len(basis), size=min(5, len(basis)), replace=False)
    p = Polynomial(n, [basis[i] for i in pick], rng.standard_normal(len(pick)))
    ours = harmonic_decompose(p).as_dict()
    oracle = decompose_by_linear_system(p)
    for e in set(ours) | set(oracle):
        a = ours.get(e, Polynomial(n))
        b = oracle.get(e, Polynomial(n))
        assert (a - b).is_zero(1e-10), e


def test_decomposition_guard():
    with pytest.raises(DegreeGuardError):
        harmonic_decompose(Polynomial.monomial([13, 0]))
    with pytest.raises(DegreeGuardError):
        harmonic_decompose(Polynomial.variable(31, 0))


def test_decomposition_serialization():
    dec = harmonic_decompose(parse_polynomial("x1^2*x2 + x3", 3))
    back = HarmonicDecomposition.from_list(dec.to_list())
    assert back.degrees == dec.degrees
    assert (back.total() - dec.total()).is_zero()


@settings(max_examples=40, deadline=None)
@given(poly_strategy())
def test_decomposition_reconstructs_on_sphere(p):
    dec = harmonic_decompose(p)
    X = np.random.default_rng(0).standard_normal((20, 3))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    scale = max(1.0, float(np.abs(p.coeffs).sum()))
    np.testing.assert_allclose(dec.total()(X), p(X), atol=1e-10 * scale)
    for d, h in dec:
        assert h.laplacian().is_zero(1e-9 * scale)
        assert all(sum(a) == d for a in h.terms)


@settings(max_examples=40, deadline=None)
@given(poly_strategy(), poly_strategy())
def test_product_rule(p, q):
    for i in range(3):
        assert ((p * q).derive(i) - (p.derive(i) * q + p * q.derive(i))).is_zero(1e-9)


@settings(max_examples=30, deadline=None)
@given(poly_strategy(), poly_strategy())
def test_sphere_integral_is_linear(p, q):
    lhs = poly_sphere_integral(2 * p - q)
    rhs = 2 * poly_sphere_integral(p) - poly_sphere_integral(q)
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)


def test_odd_monomials_integrate_to_zero():
    for alpha in itertools.product(range(4), repeat=3):
        if any(a % 2 for a in alpha):
            assert sphere_moment(alpha) == 0
