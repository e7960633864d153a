import math

import numpy as np
import pytest

from spherecalc.concentration import (
    SCALING_PRESETS,
    check_euclidean_gradient,
    check_euclidean_second_order_poincare,
    check_exp_moment,
    check_gaussian_second_order,
    check_log_sobolev,
    check_poincare,
    check_theorem,
    refined_constant,
    sampled_sup,
    spherical_hessian_opnorm,
    tail_scaling_report,
)
from spherecalc.fields import CallableField, LinearField, PlaneWaveField, PolynomialField
from spherecalc.integrate import SamplerConfig
from spherecalc.polynomial import Polynomial, parse_polynomial
from spherecalc.reports import INAPPLICABLE, PASS


def poly(text, n):
    return PolynomialField(parse_polynomial(text, n))


def cfg(n, samples=50_000, seed=17):
    return SamplerConfig(n=n, samples=samples, seed=seed)


def test_poincare_exact_cases():
    n = 6
    r = check_poincare(poly("x1", n), cfg(n))
    assert r.passed and np.isclose(r.lhs, 1 / n, rtol=1e-12) and np.isclose(r.rhs, 1 / n, rtol=1e-12)
    r = check_poincare(poly("x1*x2", n), cfg(n))
    assert np.isclose(r.lhs, 1 / (n * (n + 2)), rtol=1e-12)
    assert np.isclose(r.rhs, 2 * n / ((n - 1) * n * (n + 2)), rtol=1e-12) and r.lhs < r.rhs
    r = check_poincare(poly("3", n), cfg(n))
    assert r.lhs == 0 and r.rhs == 0 and r.passed


def test_poincare_sampled_path():
    r = check_poincare(PlaneWaveField(2.0, [1.0, 0.5, 0.0, 0.0], "sin"), cfg(4))
    assert r.status == PASS and r.margin_policy == "sigma_4" and r.stderr > 0


def test_log_sobolev():
    n, e = 5, 0.1
    r = check_log_sobolev(poly(f"1 + {e}*x1", n), cfg(n, 200_000))
    # Ent((1 + e theta_1)^2) ~ 2 e^2 / n, the extremal regime of the inequality
    assert abs(r.lhs - 2 * e**2 / n) < 4 * r.stderr + 1e-4
    assert r.passed
    assert check_log_sobolev(poly("x1*x2", n), cfg(n)).lhs < check_log_sobolev(poly("x1*x2", n), cfg(n)).rhs
    assert check_log_sobolev(poly("2", n), cfg(n)).passed


@pytest.mark.parametrize("variant", ["abstract", "lipschitz", "gaussian_square", "spherical_hessian",
                                     "euclidean_hessian"])
def test_exp_moment_zero_field(variant):
    r = check_exp_moment(PolynomialField(Polynomial(6)), cfg(6, 5000), variant)
    assert r.passed and r.lhs == 0 and r.rhs == 0


def test_exp_moment_examples():
    n = 10
    r = check_exp_moment(poly("0.5*x1^2", n), cfg(n), "spherical_hessian")
    assert r.passed and r.params["mean"] == pytest.approx(0.05)
    r = check_exp_moment(poly("x1", n), cfg(n), "gaussian_square")
    assert r.passed and r.params["t"] == (n - 1) / 4
    assert np.isclose(r.rhs, ((n - 1) / 4) / (1 - 0.5) / n)
    assert check_exp_moment(PlaneWaveField(0.8, [1.0] + [0.0] * (n - 1)), cfg(n), "lipschitz").passed


def test_exp_moment_rejects_bad_inputs():
    n = 5
    with pytest.raises(ValueError):
        check_exp_moment(poly("x1", n), cfg(n), "gaussian_square", t=(n - 1) / 2)
    with pytest.raises(ValueError):
        check_exp_moment(poly("x1", n), cfg(n), "bogus")
    r = check_exp_moment(poly("3*x1^2", n), cfg(n, 5000), "spherical_hessian")
    assert r.status == INAPPLICABLE and r.notes
    r = check_exp_moment(poly("2*x1", n), cfg(n, 5000), "gaussian_square")
    assert r.status == INAPPLICABLE


def test_theorems_on_examples():
    n = 20
    r, audit = check_theorem(poly("0.5*x1*x2", n), cfg(n, 100_000), "intrinsic")
    assert r.passed and audit.passed and r.lhs <= 2
    assert audit.sup_norm_estimates["||f''_S||"] <= 1 + 1e-9
    # int ||f''_S||^2 = (1/4) * 2n(n+2) * ||theta_1 theta_2||^2 = 1/2
    assert np.isclose(audit.b**2, 0.5, rtol=1e-12)
    x0 = np.zeros(n)
    x0[0] = 1.0
    wave = PlaneWaveField(0.9, x0, "cos")
    for which in ("euclidean", "linear_part"):
        r, audit = check_theorem(wave, cfg(n, 100_000), which)
        assert r.passed and audit.passed, which
    assert "b0" in r.notes[0]
    r, _ = check_theorem(PolynomialField(Polynomial(n)), cfg(n, 1000), "intrinsic")
    assert r.lhs == 1.0 and r.passed


def test_theorem_audit_failure_is_inapplicable():
    n = 8
    r, audit = check_theorem(poly("3*x1*x2", n), cfg(n, 5000), "intrinsic")
    assert r.status == INAPPLICABLE and not audit.passed and not r.passed
    with pytest.raises(ValueError):
        check_theorem(poly("x1", n), cfg(n), "bogus")


def test_theorem_monotone_in_scale():
    n = 12
    vals = [check_theorem(poly(f"{0.5 * s}*x1*x2", n), cfg(n, 20_000), "intrinsic")[0].lhs
            for s in (0.25, 0.5, 0.75, 1.0)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_same_seed_same_report():
    n = 6
    wave = PlaneWaveField(1.1, [0.6, 0.8, 0, 0, 0, 0], "sin")
    a, _ = check_theorem(wave, cfg(n, 20_000), "euclidean")
    b, _ = check_theorem(wave, cfg(n, 20_000), "euclidean")
    assert a.to_json() == b.to_json()


def test_sampled_sup_of_exact_bound():
    n = 7
    f = poly("0.5*x1*x2", n)
    sup = sampled_sup(spherical_hessian_opnorm(f), cfg(n))
    assert 0.9 < sup <= 1 + 1e-12


def test_euclidean_gradient_closed_form():
    n = 8
    r = check_euclidean_gradient(poly("x1^2", n), cfg(n))
    assert np.isclose(r.lhs, 4 / n) and np.isclose(r.rhs, 20 / (n - 1)) and r.passed
    r = check_euclidean_gradient(poly("x1^2", n), cfg(n), refined=True)
    assert np.isclose(r.rhs, 4 * refined_constant(n) / (n - 1))
    assert refined_constant(2) == 5.0 and refined_constant(10**8) < 2.001
    r = check_euclidean_gradient(poly("x1 + x1*x2", n), cfg(n))
    assert r.passed and "linear part removed exactly" in r.notes


def test_euclidean_gradient_sampled():
    n = 6
    wave = PlaneWaveField(1.5, [1.0, 0, 0, 0, 0, 0], "cos")
    assert check_euclidean_gradient(wave, cfg(n)).passed
    assert check_euclidean_gradient(PlaneWaveField(1.5, [1.0, 0, 0, 0, 0, 0], "sin"), cfg(n)).passed


def test_euclidean_second_order_poincare():
    n = 6
    r = check_euclidean_second_order_poincare(poly("x1*x2", n), cfg(n))
    assert np.isclose(r.lhs, 1 / (n * (n + 2))) and np.isclose(r.rhs, 10 / (n - 1) ** 2) and r.passed
    assert check_euclidean_second_order_poincare(PolynomialField(Polynomial(n)), cfg(n)).lhs == 0
    wave = PlaneWaveField(1.2, [0.6, 0.8, 0, 0, 0, 0])
    assert check_euclidean_second_order_poincare(wave, cfg(n), a=-0.3).passed


def test_gaussian_second_order():
    n = 4
    r = check_gaussian_second_order(poly("x1*x2", n), cfg(n, 100_000))
    assert r.passed and abs(r.lhs - 1) < 0.05 and abs(r.rhs - 1) < 0.05
    r = check_gaussian_second_order(poly(f"{1 / math.sqrt(2)}*x1^2 - {1 / math.sqrt(2)}", n), cfg(n, 100_000))
    assert r.passed and abs(r.lhs - 1) < 0.1
    r = check_gaussian_second_order(poly("x1^2", n), cfg(n, 20_000))
    assert r.status == INAPPLICABLE
    assert check_gaussian_second_order(LinearField([0.0] * n), cfg(n, 1000)).passed


def test_callable_fields_take_the_sampled_path():
    n = 5
    f = CallableField(lambda x: 0.1 * x[0] * x[1], n)
    assert check_poincare(f, cfg(n, 5000)).params["path"] == "mc"


def test_tail_scaling():
    config = SamplerConfig(n=10, samples=50_000, seed=5)
    quad = tail_scaling_report("quadratic", [10, 20, 40, 80], config)
    lin = tail_scaling_report("linear", [10, 20, 40, 80], config)
    assert abs(quad.slope + 1) < 0.15 and abs(lin.slope + 0.5) < 0.1
    const = tail_scaling_report("constant", [10, 20], config)
    assert math.isnan(const.slope) and all(r[1:] == (0.0, 0.0, 0.0) for r in const.rows)
    assert quad.to_csv().startswith("n,q50,q90,q99\n")
    assert set(SCALING_PRESETS) == {"quadratic", "linear", "constant"}
    with pytest.raises(ValueError):
        tail_scaling_report("bogus", [10], config)
