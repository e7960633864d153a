"""Spectral calculus for polynomial fields on S^{n-1}.

A polynomial restricted to the sphere splits into spherical harmonics
``h_d``; the spherical Laplacian acts on ``h_d`` by ``-d(n+d-2)``.  Every
quadratic energy of the field then reduces to a weighted sum of the exact
component norms ``||h_d||^2``.
"""

from dataclasses import dataclass

import numpy as np

from .fields import PolynomialField, ScalarField, AffineShiftedField
from .integrate import mc_integrate, vector_mean
from .polynomial import Polynomial, harmonic_decompose, poly_sphere_integral, DegreeGuardError
from .reports import CheckReport
from .sphere_ops import hs_norms_sq


def eigenvalue(n, d):
    """``d(n+d-2)``: minus the spherical Laplacian eigenvalue on degree-d harmonics."""
    return d * (n + d - 2)


class SpectralField:
    """A polynomial field together with its harmonic decomposition."""

    def __init__(self, base, decomposition=None):
        if isinstance(base, PolynomialField):
            base = base.poly
        self.base = base
        self.n = base.n
        self.decomposition = harmonic_decompose(base) if decomposition is None else decomposition
        self._norms = None

    @property
    def components(self):
        return self.decomposition.as_dict()

    @property
    def degrees(self):
        return self.decomposition.degrees

    def field(self):
        return PolynomialField(self.base)

    def evaluate(self, X):
        return self.base.evaluate(X)

    def component_norms_sq(self):
        """``{d: ||h_d||^2_{L^2(sigma)}}``, exact."""
        if self._norms is None:
            self._norms = {d: poly_sphere_integral(h * h) for d, h in self.decomposition}
        return dict(self._norms)

    def spectral_sum(self, weight):
        return float(sum(weight(d) * w for d, w in self.component_norms_sq().items()))

    def l2_norm_sq(self):
        return self.spectral_sum(lambda d: 1.0)

    def dirichlet_energy(self):
        """``int |grad_S f|^2``."""
        return self.spectral_sum(lambda d: eigenvalue(self.n, d))

    def hessian_energy(self):
        """``int ||f''_S||_HS^2 = int f (Lap_S^2 f + (n-2) Lap_S f)``."""
        n = self.n
        return self.spectral_sum(lambda d: eigenvalue(n, d) ** 2 - (n - 2) * eigenvalue(n, d))

    def laplacian_eigen_values(self, X):
        """``sum_d -d(n+d-2) h_d(X)``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros(X.shape[0])
        for d, h in self.decomposition:
            out -= eigenvalue(self.n, d) * h.evaluate(X)
        return out


def spectral_laplacian_power(f, k):
    """``Lap_S^k f`` for k in {1, 2}: each ``h_d`` scaled by ``(-d(n+d-2))^k``."""
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    comps = []
    base = Polynomial(f.n)
    for d, h in f.decomposition:
        factor = (-eigenvalue(f.n, d)) ** k
        if factor != 0:
            scaled = h * factor
            comps.append((d, scaled))
            base = base + scaled
    from .polynomial import HarmonicDecomposition

    return SpectralField(base, HarmonicDecomposition(f.n, tuple(comps)))


# ---------------------------------------------------------------------------
# exact sphere calculus on polynomials (valid on |x| = 1)
# ---------------------------------------------------------------------------

def _radial_derivative(p):
    out = Polynomial(p.n)
    for i, gi in enumerate(p.gradient()):
        out = out + gi * Polynomial.variable(p.n, i)
    return out


def spherical_gradient_polys(p):
    """``D_i p = d_i p - x_i <x, grad p>`` for each i."""
    rad = _radial_derivative(p)
    return [gi - rad * Polynomial.variable(p.n, i) for i, gi in enumerate(p.gradient())]


def spherical_laplacian_poly(p):
    """``Lap p - (n-1) <grad p, x> - <p'' x, x>`` as a polynomial."""
    n = p.n
    rad = _radial_derivative(p)
    return p.laplacian() - rad * (n - 1) - (_radial_derivative(rad) - rad)


def gradient_product_poly(p, q):
    """``<grad_S p, grad_S q>`` on the sphere."""
    out = Polynomial(p.n)
    for gp, gq in zip(p.gradient(), q.gradient()):
        out = out + gp * gq
    return out - _radial_derivative(p) * _radial_derivative(q)


def dirichlet_density(p):
    return gradient_product_poly(p, p)


def euclidean_gradient_sq(p):
    out = Polynomial(p.n)
    for g in p.gradient():
        out = out + g * g
    return out


def hessian_shift_hs_sq(p, a=0.0):
    """``||p'' - a I||_HS^2`` as a polynomial."""
    n = p.n
    out = Polynomial(n)
    for gi in p.gradient():
        for hij in gi.gradient():
            out = out + hij * hij
    return out - p.laplacian() * (2.0 * a) + a * a * n


def spherical_hessian_hs_sq_poly(p):
    """``||P B P||_HS^2 = ||B||^2 - 2|Bx|^2 + (x'Bx)^2`` with ``B = p'' - <grad p, x> I``."""
    n = p.n
    rad = _radial_derivative(p)
    grads = p.gradient()
    B = [[grads[i].derive(j) - (rad if i == j else 0.0) for j in range(n)] for i in range(n)]
    xs = [Polynomial.variable(n, i) for i in range(n)]
    fro = Polynomial(n)
    Bx = []
    for i in range(n):
        row = Polynomial(n)
        for j in range(n):
            fro = fro + B[i][j] * B[i][j]
            row = row + B[i][j] * xs[j]
        Bx.append(row)
    bx2 = Polynomial(n)
    xbx = Polynomial(n)
    for i in range(n):
        bx2 = bx2 + Bx[i] * Bx[i]
        xbx = xbx + Bx[i] * xs[i]
    return fro - bx2 * 2.0 + xbx * xbx


def sphere_mean(p):
    return poly_sphere_integral(p)


# ---------------------------------------------------------------------------
# affine projection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineProjection:
    m: float
    v: np.ndarray
    residual_field: ScalarField
    exact: bool

    @property
    def residual_poly(self):
        f = self.residual_field
        return f.poly if isinstance(f, PolynomialField) else None


def project_affine(f, config=None):
    """``Tf = f - m - <v, theta>`` with ``m = E f`` and ``v = n E[theta f]``."""
    if isinstance(f, SpectralField):
        f = f.field()
    if not isinstance(f, PolynomialField) and config is None:
        raise ValueError("non-polynomial fields need a sampler config for the affine projection")
    vm = vector_mean(f, config)
    if isinstance(f, PolynomialField):
        resid = f.poly - vm.m - Polynomial.linear(vm.v)
        resid = resid.prune(1e-14 * max(1.0, float(np.abs(f.poly.coeffs).max(initial=0.0))))
        return AffineProjection(vm.m, vm.v, PolynomialField(resid), True)
    return AffineProjection(vm.m, vm.v, AffineShiftedField(f, vm.m, vm.v), False)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

HESSIAN_IDENTITY_REF = "integrated Bochner identity: int ||f''_S||^2 = int f (Lap_S^2 f + (n-2) Lap_S f)"
EXACT_HESSIAN_MAX_DEGREE = 8


def hessian_energy_exact(p):
    """Exact ``int ||f''_S||_HS^2`` by polynomial expansion."""
    if p.degree > EXACT_HESSIAN_MAX_DEGREE:
        raise DegreeGuardError(f"degree {p.degree} exceeds exact-path guard {EXACT_HESSIAN_MAX_DEGREE}")
    return poly_sphere_integral(spherical_hessian_hs_sq_poly(p))


def check_hessian_energy_identity(f, config=None, path="mc"):
    """Compare ``int ||f''_S||_HS^2`` (direct) with the spectral eigen-sum.

    ``path="mc"`` integrates the squared norm by Monte Carlo and passes at
    4 sigma; ``path="exact"`` expands it as a polynomial (1e-9 relative).
    """
    if not isinstance(f, SpectralField):
        f = SpectralField(f)
    if f.base.degree > EXACT_HESSIAN_MAX_DEGREE:
        raise DegreeGuardError(f"degree {f.base.degree} exceeds guard {EXACT_HESSIAN_MAX_DEGREE}")
    rhs = f.hessian_energy()
    params = {"degrees": list(f.degrees), "path": path}
    if path == "exact":
        lhs = hessian_energy_exact(f.base)
        return CheckReport("hessian_energy_identity", HESSIAN_IDENTITY_REF, f.n, lhs, rhs,
                           kind="identity", margin_policy="exact_tol", params=params)
    if config is None:
        raise ValueError("Monte Carlo path needs a sampler config")
    field = f.field()
    est = mc_integrate(lambda T: hs_norms_sq(field, T), config)
    return CheckReport("hessian_energy_identity", HESSIAN_IDENTITY_REF, f.n, est.mean, rhs, est.stderr,
                       kind="identity", margin_policy="sigma_4", seed=config.seed, params=params)


# which -> (left quantity, right quantity, constant(n), forbidden degrees, reference)
SHARP_INEQUALITIES = {
    "poincare": ("l2", "dirichlet", lambda n: 1.0 / (n - 1), (0,),
                 "spherical Poincare inequality, sharp on linear functions"),
    "grad_vs_hess_all": ("dirichlet", "hessian", lambda n: 1.0, (),
                         "gradient vs spherical Hessian energy, sharp on linear functions"),
    "grad_vs_hess": ("dirichlet", "hessian", lambda n: 1.0 / (n + 2), (1,),
                     "gradient vs Hessian energy orthogonal to linear functions, sharp on quadratic harmonics"),
    "plain": ("l2", "hessian", lambda n: 1.0 / (n - 1), (0,),
              "second-order Poincare for mean-zero functions, sharp on linear functions"),
    "l2_vs_hess": ("l2", "hessian", lambda n: 1.0 / (2 * n * (n + 2)), (0, 1),
                   "second-order Poincare orthogonal to affine functions, sharp on quadratic harmonics"),
    "poincare_orthogonal": ("l2", "dirichlet", lambda n: 1.0 / (2 * n), (1,),
                            "Poincare inequality orthogonal to affine functions"),
    "curvature_gradient": ("dirichlet", "hessian", lambda n: 1.0 / (n - 2) if n > 2 else np.inf, (1,),
                           "(n-2) int |grad_S f|^2 <= int ||f''_S||^2 by double Poincare"),
    "double_poincare": ("l2", "hessian", lambda n: 1.0 / ((n - 1) * (n - 2)) if n > 2 else np.inf, (0, 1),
                        "suboptimal second-order Poincare by double Poincare, n >= 3"),
}


def check_sharp_constants(f, which):
    """Exact spectral check of one sharp inequality ``left <= c * right``.

    The report's params carry ``ratio = left / right`` and the sharp
    constant; ``equality`` is true when they agree to 1e-9.
    """
    if which not in SHARP_INEQUALITIES:
        raise ValueError(f"unknown inequality {which!r}; expected one of {sorted(SHARP_INEQUALITIES)}")
    if not isinstance(f, SpectralField):
        f = SpectralField(f)
    left, right, const, forbidden, ref = SHARP_INEQUALITIES[which]
    n = f.n
    name = f"sharp_{which}"
    bad = [d for d in f.degrees if d in forbidden]
    if bad:
        return CheckReport.inapplicable(name, ref, n, f"field has harmonic components of degree {bad}",
                                        params={"offending_degrees": bad})
    if which in ("curvature_gradient", "double_poincare") and n < 3:
        return CheckReport.inapplicable(name, ref, n, "needs n >= 3")
    notes = []
    if which == "poincare_orthogonal" and 0 in f.degrees:
        notes.append("checked as stated (orthogonal to linear functions only); a nonzero mean breaks it")
    q = {"l2": f.l2_norm_sq(), "dirichlet": f.dirichlet_energy(), "hessian": f.hessian_energy()}
    c = const(n)
    lhs, rhs = q[left], c * q[right]
    ratio = lhs / q[right] if q[right] > 0 else float("nan")
    params = {
        "ratio": ratio,
        "inverse_ratio": 1.0 / ratio if ratio else float("inf"),
        "sharp_constant": c,
        "equality": bool(abs(ratio - c) <= 1e-9 * c),
        "degrees": list(f.degrees),
    }
    return CheckReport(name, ref, n, lhs, rhs, kind="inequality", margin_policy="exact_tol", params=params,
                       notes=notes)


def eigen_minimization_scan(n, d_max):
    """``[(d, d^2 + (d-1)(n-2)) for d = 1..d_max]``."""
    if d_max < 1:
        raise ValueError("d_max must be >= 1")
    return [(d, d * d + (d - 1) * (n - 2)) for d in range(1, d_max + 1)]


# ---------------------------------------------------------------------------
# exact integral identities for polynomial fields
# ---------------------------------------------------------------------------

def _as_poly(f):
    if isinstance(f, SpectralField):
        return f.base
    if isinstance(f, PolynomialField):
        return f.poly
    return f


def parseval_pair(f):
    """``(sum_d ||h_d||^2, int f^2)``."""
    f = f if isinstance(f, SpectralField) else SpectralField(_as_poly(f))
    return f.l2_norm_sq(), poly_sphere_integral(f.base * f.base)


def gradient_mean_pair(f):
    """``(int f theta dsigma, (1/(n-1)) int grad_S f dsigma)`` as two vectors."""
    p = _as_poly(f)
    n = p.n
    lhs = np.array([poly_sphere_integral(p * Polynomial.variable(n, i)) for i in range(n)])
    rhs = np.array([poly_sphere_integral(d) for d in spherical_gradient_polys(p)]) / (n - 1)
    return lhs, rhs


def green_pair(f, g):
    """``(int <grad_S f, grad_S g>, -int f Lap_S g)`` with ``Lap_S g`` from the spectral route."""
    p, q = _as_poly(f), _as_poly(g)
    lap_q = spectral_laplacian_power(SpectralField(q), 1).base
    return poly_sphere_integral(gradient_product_poly(p, q)), -poly_sphere_integral(p * lap_q)


def weighted_green_pair(f, g, w):
    """Both sides of the weighted Green formula

    ``int <grad_S f, grad_S g> w = -int f Lap_S g w - int f <grad_S g, grad_S w>``.
    """
    p, q, r = _as_poly(f), _as_poly(g), _as_poly(w)
    lap_q = spectral_laplacian_power(SpectralField(q), 1).base
    lhs = poly_sphere_integral(gradient_product_poly(p, q) * r)
    rhs = -poly_sphere_integral(p * lap_q * r) - poly_sphere_integral(p * gradient_product_poly(q, r))
    return lhs, rhs
