"""Scalar fields defined near the unit sphere.

Every field maps a batch of points ``X`` of shape ``(m, n)`` (or a single
point ``(n,)``) to values, Euclidean gradients and Hessians.  Fields are
meant to be evaluated on the shell ``0.5 < |x| < 1.5``; polynomial and
plane-wave fields are defined everywhere.
"""

import json

import numpy as np

from . import _accel
from .polynomial import Polynomial, parse_polynomial


class FieldSpecError(ValueError):
    """Raised for malformed or unknown field specifications."""


def _batch(X, n):
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X2 = np.atleast_2d(X)
    if X2.shape[-1] != n:
        raise ValueError(f"point dimension {X2.shape[-1]} does not match field dimension {n}")
    return X2, single


def _unbatch(arr, single):
    return arr[0] if single else arr


class ScalarField:
    """Base class: subclasses implement ``_jet`` (and optionally ``_third``).

    ``exact`` is False when derivatives come from finite differences.
    ``exact_third`` tells whether third derivatives are analytic.
    """

    n = None
    exact = True
    exact_third = True

    def _jet(self, X):
        raise NotImplementedError

    def _third(self, X):
        # central differences of the analytic Hessian
        h = 1e-4
        m, n = X.shape
        out = np.empty((m, n, n, n))
        for k in range(n):
            step = np.zeros(n)
            step[k] = h
            _, _, hp = self._jet(X + step)
            _, _, hm = self._jet(X - step)
            out[:, :, :, k] = (hp - hm) / (2 * h)
        return 0.5 * (out + out.transpose(0, 2, 1, 3))

    def jet(self, X):
        """Return ``(value, gradient, hessian)`` at ``X``."""
        X2, single = _batch(X, self.n)
        v, g, H = self._jet(X2)
        if single:
            return float(v[0]), g[0], H[0]
        return v, g, H

    def evaluate(self, X):
        X2, single = _batch(X, self.n)
        v = self._value(X2)
        return float(v[0]) if single else v

    __call__ = evaluate

    def _value(self, X):
        return self._jet(X)[0]

    def gradient(self, X):
        X2, single = _batch(X, self.n)
        return _unbatch(self._jet(X2)[1], single)

    def hessian(self, X):
        X2, single = _batch(X, self.n)
        return _unbatch(self._jet(X2)[2], single)

    def third(self, X):
        """Third-derivative tensor ``T[..., i, j, k] = d_ijk f``."""
        X2, single = _batch(X, self.n)
        return _unbatch(self._third(X2), single)

    def to_spec(self):
        raise FieldSpecError(f"{type(self).__name__} has no JSON form")


class LinearField(ScalarField):
    """``<v, x>``."""

    def __init__(self, v):
        self.v = np.asarray(v, dtype=float).reshape(-1)
        self.n = len(self.v)

    def _jet(self, X):
        m = X.shape[0]
        return X @ self.v, np.broadcast_to(self.v, (m, self.n)).copy(), np.zeros((m, self.n, self.n))

    def _value(self, X):
        return X @ self.v

    def _third(self, X):
        return np.zeros((X.shape[0],) + (self.n,) * 3)

    def to_spec(self):
        return {"kind": "linear", "v": self.v.tolist()}


class QuadraticField(ScalarField):
    """``0.5 <A x, x>`` for symmetric ``A``."""

    def __init__(self, A):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.shape[0] != A.shape[1] or not np.allclose(A, A.T, rtol=0, atol=1e-12):
            raise ValueError("quadratic field needs a symmetric square matrix")
        self.A = 0.5 * (A + A.T)
        self.n = A.shape[0]

    def _jet(self, X):
        AX = X @ self.A
        m = X.shape[0]
        return 0.5 * np.einsum("mi,mi->m", AX, X), AX, np.broadcast_to(self.A, (m, self.n, self.n)).copy()

    def _third(self, X):
        return np.zeros((X.shape[0],) + (self.n,) * 3)

    def to_spec(self):
        return {"kind": "quadratic", "A": self.A.tolist()}


class PolynomialField(ScalarField):
    """A :class:`Polynomial` with exact derivatives of every order.

    All value/gradient/Hessian polynomials are packed into one coefficient
    matrix over the union of their monomials, so a jet costs one monomial
    evaluation plus one matrix product.
    """

    def __init__(self, p):
        self.poly = p
        self.n = p.n
        n = p.n
        grads = [p.derive(i) for i in range(n)]
        hess = [[grads[i].derive(j) for j in range(n)] for i in range(n)]
        self._pack2 = _pack([p] + grads + [hess[i][j] for i in range(n) for j in range(n)])
        self._pack0 = _pack([p])
        self._grads = grads
        self._hess = hess
        self._pack3 = None

    def _jet(self, X):
        E, C = self._pack2
        M = _monomial_values(X, E) @ C
        n = self.n
        return M[:, 0], M[:, 1 : n + 1], M[:, n + 1 :].reshape(-1, n, n)

    def _value(self, X):
        E, C = self._pack0
        return (_monomial_values(X, E) @ C)[:, 0]

    def _third(self, X):
        n = self.n
        if self._pack3 is None:
            polys = [self._hess[i][j].derive(k) for i in range(n) for j in range(n) for k in range(n)]
            self._pack3 = _pack(polys)
        E, C = self._pack3
        return (_monomial_values(X, E) @ C).reshape(-1, n, n, n)

    def to_spec(self):
        return {"kind": "polynomial", "poly": self.poly.to_dict()}


def _pack(polys):
    n = polys[0].n
    rows = [p.exponents for p in polys if len(p)]
    if not rows:
        return np.zeros((0, n), dtype=np.int64), np.zeros((0, len(polys)))
    E, inv = np.unique(np.vstack(rows), axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    C = np.zeros((E.shape[0], len(polys)))
    pos = 0
    for col, p in enumerate(polys):
        k = len(p)
        if k:
            C[inv[pos : pos + k], col] = p.coeffs
            pos += k
    return np.ascontiguousarray(E), C


def _monomial_values(X, E):
    if E.shape[0] == 0:
        return np.zeros((X.shape[0], 0))
    return _accel.monomials(X, E)


class PlaneWaveField(ScalarField):
    """``amplitude * cos(t <x, x0>)`` or ``amplitude * sin(t <x, x0>)``."""

    def __init__(self, t, x0, phase="cos", amplitude=1.0):
        if phase not in ("cos", "sin"):
            raise ValueError(f"phase must be 'cos' or 'sin', got {phase!r}")
        self.t = float(t)
        self.x0 = np.asarray(x0, dtype=float).reshape(-1)
        self.phase = phase
        self.amplitude = float(amplitude)
        self.n = len(self.x0)
        if not (np.isfinite(self.t) and np.all(np.isfinite(self.x0))):
            raise ValueError("plane wave parameters must be finite")

    def _waves(self, X):
        s = self.t * (X @ self.x0)
        c, sn = np.cos(s), np.sin(s)
        # derivatives of order 0..3 of the phase function, as multiples of t^k
        if self.phase == "cos":
            return c, -sn, -c, sn
        return sn, c, -sn, -c

    def _jet(self, X):
        w0, w1, w2, _ = self._waves(X)
        a, t, x0 = self.amplitude, self.t, self.x0
        g = (a * t * w1)[:, None] * x0
        H = (a * t * t * w2)[:, None, None] * np.outer(x0, x0)
        return a * w0, g, H

    def _value(self, X):
        return self.amplitude * self._waves(X)[0]

    def _third(self, X):
        w3 = self._waves(X)[3]
        x0 = self.x0
        return (self.amplitude * self.t**3 * w3)[:, None, None, None] * np.einsum("i,j,k->ijk", x0, x0, x0)

    def to_spec(self):
        return {"kind": "plane_wave", "t": self.t, "x0": self.x0.tolist(), "phase": self.phase, "amplitude": self.amplitude}


class ScaledShiftedField(ScalarField):
    """``c f(x) - (a/2) |x|^2``."""

    def __init__(self, f, c=1.0, a=0.0):
        self.base = f
        self.c = float(c)
        self.a = float(a)
        self.n = f.n
        self.exact = f.exact
        self.exact_third = f.exact_third

    def _jet(self, X):
        v, g, H = self.base._jet(X)
        r2 = np.einsum("mi,mi->m", X, X)
        return self.c * v - 0.5 * self.a * r2, self.c * g - self.a * X, self.c * H - self.a * np.eye(self.n)

    def _value(self, X):
        return self.c * self.base._value(X) - 0.5 * self.a * np.einsum("mi,mi->m", X, X)

    def _third(self, X):
        return self.c * self.base._third(X)

    def to_spec(self):
        return {"kind": "scaled_shifted", "field": self.base.to_spec(), "c": self.c, "a": self.a}


class AffineShiftedField(ScalarField):
    """``f(x) - m - <v, x>``: the field with a given affine part removed."""

    def __init__(self, f, m=0.0, v=None):
        self.base = f
        self.n = f.n
        self.m = float(m)
        self.v = np.zeros(f.n) if v is None else np.asarray(v, dtype=float)
        self.exact = f.exact
        self.exact_third = f.exact_third

    def _jet(self, X):
        val, g, H = self.base._jet(X)
        return val - self.m - X @ self.v, g - self.v, H

    def _value(self, X):
        return self.base._value(X) - self.m - X @ self.v

    def _third(self, X):
        return self.base._third(X)


class CallableField(ScalarField):
    """A user function with derivatives from central differences.

    Gradient step ``h = 1e-5 max(1, |x|)``; the Hessian uses the four-point
    stencil with step ``1e-4 max(1, |x|)``.
    """

    exact = False
    exact_third = False

    def __init__(self, func, n, vectorized=False):
        self.func = func
        self.n = int(n)
        self.vectorized = vectorized

    def _value(self, X):
        if self.vectorized:
            out = np.asarray(self.func(X), dtype=float).reshape(-1)
        else:
            out = np.array([float(self.func(x)) for x in X])
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("field evaluation returned non-finite values")
        return out

    def _jet(self, X):
        m, n = X.shape
        scale = np.maximum(1.0, np.linalg.norm(X, axis=1))[:, None]
        h1 = 1e-5 * scale
        h2 = 1e-4 * scale
        eye = np.eye(n)
        v = self._value(X)
        g = np.empty((m, n))
        for i in range(n):
            g[:, i] = (self._value(X + h1 * eye[i]) - self._value(X - h1 * eye[i])) / (2 * h1[:, 0])
        H = np.empty((m, n, n))
        for i in range(n):
            for j in range(i, n):
                if i == j:
                    val = (self._value(X + h2 * eye[i]) - 2 * v + self._value(X - h2 * eye[i])) / h2[:, 0] ** 2
                else:
                    d = h2 * eye[i] + h2 * eye[j]
                    e = h2 * eye[i] - h2 * eye[j]
                    val = (self._value(X + d) - self._value(X + e) - self._value(X - e) + self._value(X - d)) / (
                        4 * h2[:, 0] ** 2
                    )
                H[:, i, j] = H[:, j, i] = val
        return v, g, H


# ---------------------------------------------------------------------------
# named constructors
# ---------------------------------------------------------------------------

def make_linear(v):
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("v must be finite")
    return LinearField(v)


def make_quadratic(A):
    return QuadraticField(A)


def make_polynomial(p):
    if isinstance(p, str):
        p = parse_polynomial(p)
    return PolynomialField(p)


def make_plane_wave(t, x0, phase="cos", amplitude=1.0):
    return PlaneWaveField(t, x0, phase, amplitude)


def make_scaled_shifted(f, c=1.0, a=0.0):
    return ScaledShiftedField(f, c, a)


def make_callable(func, n, vectorized=False):
    return CallableField(func, n, vectorized)


def self_test(f, rng=None, points=20, step=1e-6, grad_tol=1e-5, hess_tol=1e-4):
    """Check gradient/Hessian consistency at random points with 0.9 <= |x| <= 1.1.

    Returns the worst relative errors ``(grad_err, hess_err, asym)``; raises
    ``AssertionError`` when a tolerance is exceeded.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = f.n
    X = rng.standard_normal((points, n))
    X *= (rng.uniform(0.9, 1.1, points) / np.linalg.norm(X, axis=1))[:, None]
    v, g, H = f.jet(X)
    asym = float(np.abs(H - H.transpose(0, 2, 1)).max())
    eye = np.eye(n)
    g_fd = np.stack([(f.evaluate(X + step * eye[i]) - f.evaluate(X - step * eye[i])) / (2 * step) for i in range(n)], axis=1)
    H_fd = np.stack([(f.gradient(X + step * eye[i]) - f.gradient(X - step * eye[i])) / (2 * step) for i in range(n)], axis=2)
    gscale = max(1.0, float(np.abs(g).max()))
    hscale = max(1.0, float(np.abs(H).max()))
    grad_err = float(np.abs(g_fd - g).max()) / gscale
    hess_err = float(np.abs(H_fd - H).max()) / hscale
    if asym > 1e-12 * hscale:
        raise AssertionError(f"hessian not symmetric: {asym:.3g}")
    if f.exact and grad_err > grad_tol:
        raise AssertionError(f"gradient disagrees with finite differences: {grad_err:.3g}")
    if f.exact and hess_err > hess_tol:
        raise AssertionError(f"hessian disagrees with finite differences: {hess_err:.3g}")
    return grad_err, hess_err, asym


# ---------------------------------------------------------------------------
# JSON / preset specifications
# ---------------------------------------------------------------------------

FIELD_KINDS = ("linear", "quadratic", "polynomial", "plane_wave", "scaled_shifted")


def _unit(n, i):
    e = np.zeros(n)
    e[i] = 1.0
    return e


def parse_vector(text, n=None):
    """``"e2"`` -> second basis vector, ``"0.6,0.8"`` -> padded with zeros to ``n``."""
    text = text.strip().strip("()[]")
    if text.startswith("e") and text[1:].isdigit():
        if n is None:
            raise FieldSpecError("basis vector needs a dimension")
        i = int(text[1:]) - 1
        if not 0 <= i < n:
            raise FieldSpecError(f"basis vector {text} out of range for n={n}")
        return _unit(n, i)
    try:
        vals = [float(s) for s in text.replace("…", "").split(",") if s.strip() not in ("", "...")]
    except ValueError:
        raise FieldSpecError(f"cannot parse vector {text!r}") from None
    if n is None:
        return np.array(vals)
    if len(vals) > n:
        raise FieldSpecError(f"vector has {len(vals)} entries, dimension is {n}")
    return np.concatenate([vals, np.zeros(n - len(vals))])


def field_from_spec(spec, n=None):
    """Build a field from a dict (the JSON form)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise FieldSpecError("field spec must be an object with a 'kind' key")
    kind = spec["kind"]
    try:
        if kind == "linear":
            v = spec["v"]
            v = parse_vector(v, n) if isinstance(v, str) else np.asarray(v, dtype=float)
            return make_linear(v)
        if kind == "quadratic":
            return make_quadratic(spec["A"])
        if kind == "polynomial":
            if "poly" in spec:
                return make_polynomial(Polynomial.from_dict(spec["poly"]))
            return make_polynomial(parse_polynomial(spec["expr"], spec.get("n", n)))
        if kind == "plane_wave":
            x0 = spec["x0"]
            x0 = parse_vector(x0, n) if isinstance(x0, str) else np.asarray(x0, dtype=float)
            return make_plane_wave(spec["t"], x0, spec.get("phase", "cos"), spec.get("amplitude", 1.0))
        if kind == "scaled_shifted":
            return make_scaled_shifted(field_from_spec(spec["field"], n), spec.get("c", 1.0), spec.get("a", 0.0))
    except KeyError as exc:
        raise FieldSpecError(f"field kind {kind!r} missing parameter {exc}") from None
    except (TypeError, ValueError) as exc:
        raise FieldSpecError(f"bad parameters for field kind {kind!r}: {exc}") from None
    raise FieldSpecError(f"unknown field kind {kind!r}; expected one of {', '.join(FIELD_KINDS)}")


def parse_field(text, n=None):
    """Parse a JSON field spec or a shorthand preset.

    Shorthands: ``linear:v=e1``, ``linear:v=0.6,0.8``, ``poly:x1^2*x2``,
    ``plane_wave:t=0.5,x0=e1,phase=sin``, and the named presets
    ``theta1``, ``theta1theta2``, ``harmonic2`` (``x1^2 - x2^2``).
    """
    text = text.strip()
    if text.startswith("{"):
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FieldSpecError(f"invalid field JSON: {exc}") from None
        return field_from_spec(spec, n)
    dim = 10 if n is None else n
    presets = {"theta1": "x1", "theta1theta2": "x1*x2", "harmonic2": "x1^2 - x2^2"}
    if text in presets:
        return make_polynomial(parse_polynomial(presets[text], dim))
    kind, _, rest = text.partition(":")
    if kind in ("poly", "polynomial"):
        try:
            return make_polynomial(parse_polynomial(rest, n))
        except ValueError as exc:
            raise FieldSpecError(str(exc)) from None
    if kind == "linear":
        key, _, val = rest.partition("=")
        if key != "v":
            raise FieldSpecError("linear shorthand is linear:v=<vector>")
        return make_linear(parse_vector(val, dim))
    if kind == "plane_wave":
        params = dict(item.split("=", 1) for item in _split_params(rest))
        try:
            return make_plane_wave(
                float(params.get("t", 1.0)),
                parse_vector(params.get("x0", "e1"), dim),
                params.get("phase", "cos"),
                float(params.get("amplitude", 1.0)),
            )
        except ValueError as exc:
            raise FieldSpecError(str(exc)) from None
    raise FieldSpecError(f"unknown field spec {text!r}")


def _split_params(rest):
    # split "t=0.5,x0=0.6,0.8,phase=sin" on commas that start a new key=
    out = []
    for chunk in rest.split(","):
        if "=" in chunk or not out:
            out.append(chunk)
        else:
            out[-1] += "," + chunk
    return [c for c in out if c]
