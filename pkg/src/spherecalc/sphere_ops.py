"""Intrinsic differential operators on S^{n-1} built from Euclidean jets.

All operators accept a single point ``(n,)`` / :class:`UnitVector` or a
batch ``(m, n)`` of unit vectors and return matching shapes.
"""

from dataclasses import dataclass

import numpy as np

from . import _accel
from .fields import PolynomialField, ScalarField
from .polynomial import Polynomial

GRAD_ZERO_TOL = 1e-10


class UnitVector:
    """A point on the unit sphere; coordinates are renormalized on construction."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        c = np.asarray(coords, dtype=float).reshape(-1)
        norm = np.linalg.norm(c)
        if c.size < 2 or not np.isfinite(norm) or norm == 0.0:
            raise ValueError("a unit vector needs a finite nonzero vector with n >= 2")
        c = c / norm
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __setattr__(self, name, value):
        raise AttributeError("UnitVector is immutable")

    @property
    def n(self):
        return self.coords.size

    def __array__(self, dtype=None, copy=None):
        return self.coords if dtype is None else self.coords.astype(dtype)

    def __repr__(self):
        return f"UnitVector({self.coords.tolist()})"


@dataclass(frozen=True)
class SphericalJet:
    value: float
    grad_s: np.ndarray
    hess_s: np.ndarray


def _points(theta):
    T = np.asarray(theta, dtype=float)
    single = T.ndim == 1
    return np.atleast_2d(T), single


def _out(arr, single):
    if single:
        a = arr[0]
        return float(a) if np.ndim(a) == 0 else a
    return arr


def tangent_projector(theta):
    T, single = _points(theta)
    n = T.shape[1]
    P = np.eye(n) - np.einsum("mi,mj->mij", T, T)
    return _out(P, single)


def _sgrad(g, T):
    return g - np.einsum("mi,mi->m", g, T)[:, None] * T


def _shess(g, H, T):
    n = T.shape[1]
    radial = np.einsum("mi,mi->m", g, T)
    B = H - radial[:, None, None] * np.eye(n)
    P = np.eye(n) - np.einsum("mi,mj->mij", T, T)
    S = P @ B @ P
    return 0.5 * (S + S.transpose(0, 2, 1))


def _lap_from_jet(g, H, T):
    n = T.shape[1]
    return (
        np.trace(H, axis1=1, axis2=2)
        - (n - 1) * np.einsum("mi,mi->m", g, T)
        - np.einsum("mi,mij,mj->m", T, H, T)
    )


def spherical_gradient(f, theta):
    """``P g`` with ``g`` the Euclidean gradient at theta."""
    T, single = _points(theta)
    return _out(_sgrad(f.gradient(T), T), single)


def spherical_hessian(f, theta):
    """``P (f'' - <grad f, theta> I) P``: symmetric and annihilates theta."""
    T, single = _points(theta)
    _, g, H = f.jet(T)
    return _out(_shess(g, H, T), single)


def spherical_laplacian(f, theta):
    """Laplace-Beltrami operator from Euclidean data:
    ``Lap f - (n-1) <grad f, theta> - <f'' theta, theta>``.
    """
    T, single = _points(theta)
    _, g, H = f.jet(T)
    return _out(_lap_from_jet(g, H, T), single)


def spherical_jet(f, theta):
    T, single = _points(theta)
    v, g, H = f.jet(T)
    gs, hs = _sgrad(g, T), _shess(g, H, T)
    if single:
        return SphericalJet(float(v[0]), gs[0], hs[0])
    return SphericalJet(v, gs, hs)


def operator_norm(M):
    """Largest |eigenvalue| of a symmetric matrix (or a stack of them)."""
    M = np.asarray(M, dtype=float)
    w = np.linalg.eigvalsh(0.5 * (M + np.swapaxes(M, -1, -2)))
    return np.abs(w).max(axis=-1)


def hs_norm(M):
    return np.sqrt(np.sum(np.asarray(M) ** 2, axis=(-2, -1)))


def _modulus(grad, S):
    gnorm = np.linalg.norm(grad, axis=1)
    Sg = np.linalg.norm(np.einsum("mij,mj->mi", S, grad), axis=1)
    opn = operator_norm(S)
    safe = np.where(gnorm > GRAD_ZERO_TOL, gnorm, 1.0)
    return np.where(gnorm > GRAD_ZERO_TOL, Sg / safe, opn)


def second_order_modulus(f, theta):
    """``|grad_S f|^{-1} |f''_S grad_S f|``, or ``||f''_S||`` where the gradient vanishes."""
    T, single = _points(theta)
    _, g, H = f.jet(T)
    return _out(_modulus(_sgrad(g, T), _shess(g, H, T)), single)


def euclidean_second_order_modulus(f, x):
    """``|grad f|^{-1} |f'' grad f|``, or ``||f''||`` at critical points."""
    X, single = _points(x)
    _, g, H = f.jet(X)
    return _out(_modulus(g, H), single)


def d_ij(f, theta, i, j):
    """Second-order spherical partial ``D_i D_j f`` in closed form from Euclidean data."""
    T, single = _points(theta)
    n = T.shape[1]
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) out of range for n={n}")
    _, g, H = f.jet(T)
    radial = np.einsum("mi,mi->m", g, T)
    Ht = np.einsum("mij,mj->mi", H, T)
    tHt = np.einsum("mi,mi->m", Ht, T)
    ti, tj = T[:, i], T[:, j]
    out = (
        H[:, i, j]
        - tj * g[:, i]
        - (1.0 if i == j else 0.0) * radial
        + 2 * ti * tj * radial
        - tj * Ht[:, i]
        - ti * Ht[:, j]
        + ti * tj * tHt
    )
    return _out(out, single)


def d_matrix(f, theta):
    """All ``D_ij f`` at once, shape ``(n, n)`` or ``(m, n, n)``."""
    T, single = _points(theta)
    n = T.shape[1]
    _, g, H = f.jet(T)
    radial = np.einsum("mi,mi->m", g, T)
    Ht = np.einsum("mij,mj->mi", H, T)
    tHt = np.einsum("mi,mi->m", Ht, T)
    tt = np.einsum("mi,mj->mij", T, T)
    D = (
        H
        - np.einsum("mj,mi->mij", T, g)
        - radial[:, None, None] * np.eye(n)
        + 2 * radial[:, None, None] * tt
        - np.einsum("mj,mi->mij", T, Ht)
        - np.einsum("mi,mj->mij", T, Ht)
        + tHt[:, None, None] * tt
    )
    return _out(D, single)


# ---------------------------------------------------------------------------
# the extension psi(x) = <grad f(x), v> - <grad f(x), x> <v, x>
# ---------------------------------------------------------------------------

class TangentialDerivativeField(ScalarField):
    """``psi(x) = <grad f(x), v> - <grad f(x), x><v, x>``, equal to ``<grad_S f, v>`` on the sphere.

    Its gradient needs the Hessian of ``f``; its Hessian needs third derivatives.
    """

    def __init__(self, f, v):
        self.base = f
        self.v = np.asarray(v, dtype=float)
        self.n = f.n
        self.exact = f.exact
        self.exact_third = False

    def _jet(self, X):
        _, g, H = self.base._jet(X)
        T3 = self.base._third(X)
        v = self.v
        gx = np.einsum("mi,mi->m", g, X)
        vx = X @ v
        Hv = H @ v
        Hx_g = np.einsum("mij,mj->mi", H, X) + g
        val = g @ v - gx * vx
        grad = Hv - Hx_g * vx[:, None] - gx[:, None] * v
        T3v = np.einsum("mabc,c->mab", T3, v)
        T3x = np.einsum("mabc,mc->mab", T3, X)
        hess = (
            T3v
            - (T3x + 2 * H) * vx[:, None, None]
            - np.einsum("ma,b->mab", Hx_g, v)
            - np.einsum("a,mb->mab", v, Hx_g)
        )
        return val, grad, 0.5 * (hess + hess.transpose(0, 2, 1))

    def _value(self, X):
        g = self.base.gradient(X)
        return g @ self.v - np.einsum("mi,mi->m", g, X) * (X @ self.v)

    def gradient_only(self, X):
        _, g, H = self.base._jet(X)
        v = self.v
        gx = np.einsum("mi,mi->m", g, X)
        vx = X @ v
        Hx_g = np.einsum("mij,mj->mi", H, X) + g
        return H @ v - Hx_g * vx[:, None] - gx[:, None] * v


def tangential_derivative_field(f, v):
    """The extension ``psi`` of ``<grad_S f, v>``; an exact polynomial for polynomial ``f``."""
    v = np.asarray(v, dtype=float)
    if isinstance(f, PolynomialField):
        p = f.poly
        grads = p.gradient()
        gv = Polynomial(p.n)
        gx = Polynomial(p.n)
        for i in range(p.n):
            gv = gv + grads[i] * v[i]
            gx = gx + grads[i] * Polynomial.variable(p.n, i)
        return PolynomialField(gv - gx * Polynomial.linear(v))
    return TangentialDerivativeField(f, v)


def hessian_vector_identity_residual(f, theta, v):
    """``| f''_S v - grad_S <grad_S f, v> - <v, theta> grad_S f |``."""
    T, single = _points(theta)
    v = np.asarray(v, dtype=float)
    _, g, H = f.jet(T)
    lhs = np.einsum("mij,j->mi", _shess(g, H, T), v)
    psi = tangential_derivative_field(f, v)
    if isinstance(psi, TangentialDerivativeField):
        gpsi = psi.gradient_only(T)
    else:
        gpsi = psi.gradient(T)
    rhs = _sgrad(gpsi, T) + (T @ v)[:, None] * _sgrad(g, T)
    return _out(np.linalg.norm(lhs - rhs, axis=1), single)


def _laplacian_gradient(f, T):
    """Euclidean gradient of ``l(x) = Lap f - (n-1)<grad f, x> - <f'' x, x>`` at T."""
    n = T.shape[1]
    _, g, H = f.jet(T)
    T3 = f.third(T)
    trace_part = np.einsum("miia->ma", T3)
    Hx = np.einsum("mij,mj->mi", H, T)
    quad = np.einsum("maij,mi,mj->ma", T3, T, T)
    return trace_part - (n - 1) * (Hx + g) - quad - 2 * Hx


def commutator_residual(f, theta, v):
    """``| Lap_S <grad_S f, v> - <grad_S Lap_S f, v> - (n-3)<grad_S f, v> + 2<v,theta> Lap_S f |``.

    The first term is the spherical Laplacian of the extension ``psi``; the
    second differentiates the Euclidean expression of ``Lap_S f``.  Needs
    analytic third derivatives.
    """
    if not getattr(f, "exact_third", False) or not f.exact:
        raise ValueError("commutator check needs exact third derivatives (polynomial or plane-wave fields)")
    T, single = _points(theta)
    n = T.shape[1]
    v = np.asarray(v, dtype=float)
    psi = tangential_derivative_field(f, v)
    lhs1 = spherical_laplacian(psi, T)
    lhs2 = _sgrad(_laplacian_gradient(f, T), T) @ v
    _, g, H = f.jet(T)
    lap_s = _lap_from_jet(g, H, T)
    rhs = (n - 3) * (_sgrad(g, T) @ v) - 2 * (T @ v) * lap_s
    return _out(np.abs(lhs1 - lhs2 - rhs), single)


# ---------------------------------------------------------------------------
# homogeneous extensions F(x) = r^d f(x / r)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomogeneousExtensionParams:
    d: float


def _polar(x):
    X, single = _points(x)
    r = np.linalg.norm(X, axis=1)
    if np.any(r == 0):
        raise ValueError("homogeneous extensions are undefined at x = 0")
    return X, r, X / r[:, None], single


def _order(params):
    return params.d if isinstance(params, HomogeneousExtensionParams) else float(params)


def hom_value(f, params, x):
    d = _order(params)
    X, r, T, single = _polar(x)
    return _out(r**d * f.evaluate(T), single)


def hom_gradient(f, params, x):
    """``r^{d-1} [d f(theta) theta + grad_S f(theta)]``."""
    d = _order(params)
    X, r, T, single = _polar(x)
    v, g, _ = f.jet(T)
    out = (r ** (d - 1))[:, None] * (d * v[:, None] * T + _sgrad(g, T))
    return _out(out, single)


def hom_hessian_apply(f, params, x, w):
    """``F''(x) w`` for the d-homogeneous extension, from the spherical jet at theta."""
    d = _order(params)
    X, r, T, single = _polar(x)
    w = np.asarray(w, dtype=float)
    val, g, H = f.jet(T)
    gs = _sgrad(g, T)
    S = _shess(g, H, T)
    wt = T @ w
    Pw = w - wt[:, None] * T
    out = (
        (d * (d - 1) * val * wt)[:, None] * T
        + (d * val)[:, None] * Pw
        + ((d - 1) * (gs @ w))[:, None] * T
        + ((d - 1) * wt)[:, None] * gs
        + np.einsum("mij,j->mi", S, w)
    )
    return _out((r ** (d - 2))[:, None] * out, single)


def hom_laplacian(f, params, x):
    """``r^{d-2} [d(n+d-2) f(theta) + Lap_S f(theta)]``."""
    d = _order(params)
    X, r, T, single = _polar(x)
    n = X.shape[1]
    val, g, H = f.jet(T)
    return _out(r ** (d - 2) * (d * (n + d - 2) * val + _lap_from_jet(g, H, T)), single)


def hs_norms_sq(f, T):
    """``||f''_S||_HS^2`` at each row of T (batched kernel)."""
    _, g, H = f.jet(T)
    return _accel.projected_hs_sq(T, g, H)
