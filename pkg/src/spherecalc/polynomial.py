"""Exact multivariate polynomials on R^n and their integrals over the sphere.

A :class:`Polynomial` stores its terms as an integer exponent matrix
``(k, n)`` plus a float coefficient vector ``(k,)``.  Coefficients are
doubles; for integer inputs of modest degree every operation here is exact.
"""

import json
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _accel

MAX_DEGREE = 12
MAX_DIMENSION = 30
ZERO_TOL = 1e-10


class DegreeGuardError(ValueError):
    """Raised when a polynomial exceeds the degree/dimension guard."""


class Polynomial:
    """Immutable real polynomial in ``n`` variables.

    Parameters
    ----------
    n : int
        Ambient dimension, ``n >= 1``.
    exponents : array_like of int, shape (k, n)
    coeffs : array_like of float, shape (k,)
        Duplicated exponent rows are merged and zero coefficients dropped.
    """

    __slots__ = ("n", "exponents", "coeffs")

    def __init__(self, n, exponents=None, coeffs=None):
        n = int(n)
        if n < 1:
            raise ValueError(f"dimension must be positive, got {n}")
        if exponents is None:
            E = np.zeros((0, n), dtype=np.int64)
            c = np.zeros(0)
        else:
            E = np.asarray(exponents, dtype=np.int64).reshape(-1, n)
            c = np.asarray(coeffs, dtype=np.float64).reshape(-1)
            if E.shape[0] != c.shape[0]:
                raise ValueError("exponents and coeffs have different lengths")
            if (E < 0).any():
                raise ValueError("exponents must be non-negative")
            E, c = _canonical(E, c)
        E.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "exponents", E)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, n, c=1.0):
        return cls(n, np.zeros((1, n), dtype=np.int64), [c])

    @classmethod
    def variable(cls, n, i):
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        e = np.zeros((1, n), dtype=np.int64)
        e[0, i] = 1
        return cls(n, e, [1.0])

    @classmethod
    def monomial(cls, alpha, c=1.0):
        alpha = np.asarray(alpha, dtype=np.int64)
        return cls(len(alpha), alpha[None, :], [c])

    @classmethod
    def from_terms(cls, n, terms):
        """Build from a mapping ``{alpha tuple: coefficient}``."""
        if not terms:
            return cls(n)
        keys = list(terms)
        return cls(n, np.array(keys, dtype=np.int64).reshape(-1, n), [terms[k] for k in keys])

    @classmethod
    def linear(cls, v):
        v = np.asarray(v, dtype=float)
        n = len(v)
        return cls(n, np.eye(n, dtype=np.int64), v)

    @classmethod
    def norm_sq(cls, n):
        """``|x|^2``."""
        return cls(n, 2 * np.eye(n, dtype=np.int64), np.ones(n))

    # -- basic protocol ---------------------------------------------------

    @property
    def terms(self):
        return {tuple(int(a) for a in e): float(c) for e, c in zip(self.exponents, self.coeffs)}

    @property
    def degree(self):
        if len(self.coeffs) == 0:
            return -1
        return int(self.exponents.sum(axis=1).max())

    def __len__(self):
        return len(self.coeffs)

    def is_zero(self, tol=ZERO_TOL):
        return len(self.coeffs) == 0 or float(np.abs(self.coeffs).max()) <= tol

    def prune(self, tol=ZERO_TOL):
        keep = np.abs(self.coeffs) > tol
        return Polynomial(self.n, self.exponents[keep], self.coeffs[keep])

    def _check(self, other):
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.n, float(other))
        self._check(other)
        return Polynomial(
            self.n,
            np.vstack([self.exponents, other.exponents]),
            np.concatenate([self.coeffs, other.coeffs]),
        )

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, self.exponents, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(self.n, self.exponents, self.coeffs * float(other))
        self._check(other)
        if len(self) == 0 or len(other) == 0:
            return Polynomial(self.n)
        E = (self.exponents[:, None, :] + other.exponents[None, :, :]).reshape(-1, self.n)
        c = np.outer(self.coeffs, other.coeffs).reshape(-1)
        return Polynomial(self.n, E, c)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / float(scalar))

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.n == other.n
            and self.exponents.shape == other.exponents.shape
            and np.array_equal(self.exponents, other.exponents)
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((self.n, self.exponents.tobytes(), self.coeffs.tobytes()))

    def allclose(self, other, tol=ZERO_TOL):
        return (self - other).is_zero(tol)

    def __repr__(self):
        return f"Polynomial(n={self.n}, {self.to_string()!r})"

    def to_string(self, digits=12):
        if len(self) == 0:
            return "0"
        parts = []
        for e, c in zip(self.exponents, self.coeffs):
            factors = [f"x{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a]
            mono = "*".join(factors)
            mag = f"{abs(c):.{digits}g}"
            if mono and mag == "1":
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = mag
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    # -- calculus ---------------------------------------------------------

    def derive(self, i):
        if not 0 <= i < self.n:
            raise IndexError(f"coordinate index {i} out of range for n={self.n}")
        a = self.exponents[:, i]
        keep = a > 0
        E = self.exponents[keep].copy()
        E[:, i] -= 1
        return Polynomial(self.n, E, self.coeffs[keep] * a[keep])

    def gradient(self):
        return [self.derive(i) for i in range(self.n)]

    def laplacian(self):
        out = Polynomial(self.n)
        for i in range(self.n):
            out = out + self.derive(i).derive(i)
        return out

    def homogeneous_part(self, k):
        keep = self.exponents.sum(axis=1) == k
        return Polynomial(self.n, self.exponents[keep], self.coeffs[keep])

    def evaluate(self, X):
        """Evaluate at one point ``(n,)`` or a batch ``(m, n)``."""
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X2 = np.atleast_2d(X)
        if X2.shape[1] != self.n:
            raise ValueError(f"points have dimension {X2.shape[1]}, polynomial has {self.n}")
        vals = _accel.monomials(X2, self.exponents) @ self.coeffs
        return float(vals[0]) if single else vals

    __call__ = evaluate

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        return {
            "n": self.n,
            "terms": [{"alpha": [int(a) for a in e], "c": float(c)} for e, c in zip(self.exponents, self.coeffs)],
        }

    @classmethod
    def from_dict(cls, data):
        n = int(data["n"])
        terms = data.get("terms", [])
        for t in terms:
            if len(t["alpha"]) != n:
                raise ValueError(f"multi-index {t['alpha']} does not have length n={n}")
        if not terms:
            return cls(n)
        return cls(n, [t["alpha"] for t in terms], [t["c"] for t in terms])

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _canonical(E, c):
    if E.shape[0] == 0:
        return E.copy(), c.copy()
    uniq, inv = np.unique(E, axis=0, return_inverse=True)
    acc = np.zeros(uniq.shape[0])
    np.add.at(acc, inv.reshape(-1), c)
    keep = acc != 0.0
    return np.ascontiguousarray(uniq[keep]), acc[keep]


_TERM_RE = re.compile(r"([+-]?)\s*([^+-]+)")
_FACTOR_RE = re.compile(r"^x(\d+)(?:\^(\d+))?$")


def parse_polynomial(text, n=None):
    """Parse expressions like ``"x1^2*x2 - 3*x3 + 0.5"`` (1-based variables).

    ``|x|^2`` may be written as ``r2``.  ``n`` defaults to the largest
    variable index that appears (at least 2).
    """
    src = text.replace(" ", "")
    if not src:
        raise ValueError("empty polynomial expression")
    # protect exponents like 1e-3 from the +/- split
    src = re.sub(r"(\d)[eE]([+-])", lambda m: m.group(1) + "E" + ("p" if m.group(2) == "+" else "m"), src)
    raw = []
    pos = 0
    for m in _TERM_RE.finditer(src):
        if m.start() != pos:
            raise ValueError(f"cannot parse polynomial near {src[pos:]!r}")
        pos = m.end()
        raw.append((m.group(1), m.group(2)))
    if pos != len(src):
        raise ValueError(f"cannot parse polynomial near {src[pos:]!r}")
    indices = [int(i) for i in re.findall(r"x(\d+)", src)]
    dim = n if n is not None else max([2] + indices)
    if indices and max(indices) > dim:
        raise ValueError(f"variable x{max(indices)} exceeds dimension {dim}")
    if indices and min(indices) < 1:
        raise ValueError("variables are 1-based (x1, x2, ...)")
    out = Polynomial(dim)
    for sign, body in raw:
        term = Polynomial.constant(dim, -1.0 if sign == "-" else 1.0)
        for factor in body.split("*"):
            if not factor:
                raise ValueError(f"empty factor in {body!r}")
            fm = _FACTOR_RE.match(factor)
            if fm:
                i, k = int(fm.group(1)), int(fm.group(2) or 1)
                term = term * (Polynomial.variable(dim, i - 1) ** k)
            elif factor == "r2":
                term = term * Polynomial.norm_sq(dim)
            else:
                try:
                    term = term * float(factor.replace("Ep", "e+").replace("Em", "e-"))
                except ValueError:
                    raise ValueError(f"bad factor {factor!r}") from None
        out = out + term
    return out


# ---------------------------------------------------------------------------
# moment and integral operations
# ---------------------------------------------------------------------------

def poly_derive(p, i):
    return p.derive(i)


def poly_laplacian(p):
    return p.laplacian()


@lru_cache(maxsize=None)
def _double_factorials(top):
    # (k-1)!! for k = 0..top, with (-1)!! = 1
    out = np.ones(top + 1)
    for k in range(2, top + 1):
        out[k] = out[k - 2] * (k - 1)
    return out


def sphere_moment(alpha):
    """Integral of ``prod theta_i^alpha_i`` against the uniform sphere measure."""
    alpha = [int(a) for a in alpha]
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be non-negative")
    if len(alpha) < 2:
        raise ValueError("sphere moments need n >= 2")
    if any(a % 2 for a in alpha):
        return 0.0
    n = len(alpha)
    num = 1
    for a in alpha:
        num *= math.prod(range(a - 1, 0, -2)) if a > 1 else 1
    den = math.prod(n + 2 * k for k in range(sum(alpha) // 2))
    return num / den


def sphere_moments(E):
    """Vectorised :func:`sphere_moment` over exponent rows ``(k, n)``."""
    E = np.asarray(E, dtype=np.int64)
    k, n = E.shape
    if k == 0:
        return np.zeros(0)
    even = ~(E % 2).any(axis=1)
    out = np.zeros(k)
    if not even.any():
        return out
    Ee = E[even]
    df = _double_factorials(int(Ee.max()) if Ee.size else 0)
    num = np.prod(df[Ee], axis=1)
    half = Ee.sum(axis=1) // 2
    top = int(half.max())
    # cumulative products of (n + 2j), j < half
    dens = np.concatenate([[1.0], np.cumprod(n + 2.0 * np.arange(top))])
    out[even] = num / dens[half]
    return out


def poly_sphere_integral(p):
    """Exact integral of ``p`` against the normalized measure on S^{n-1}."""
    if p.n < 2:
        raise ValueError("sphere integrals need n >= 2")
    if len(p) == 0:
        return 0.0
    return float(sphere_moments(p.exponents) @ p.coeffs)


@dataclass(frozen=True)
class HarmonicDecomposition:
    """Components ``{d: h_d}`` with each ``h_d`` harmonic and homogeneous of degree d."""

    n: int
    components: tuple

    def __iter__(self):
        return iter(self.components)

    def as_dict(self):
        return dict(self.components)

    @property
    def degrees(self):
        return tuple(d for d, _ in self.components)

    def component(self, d):
        return self.as_dict().get(d, Polynomial(self.n))

    def total(self):
        out = Polynomial(self.n)
        for _, h in self.components:
            out = out + h
        return out

    def to_list(self):
        return [[d, h.to_dict()] for d, h in self.components]

    @classmethod
    def from_list(cls, data):
        comps = tuple((int(d), Polynomial.from_dict(h)) for d, h in data)
        n = comps[0][1].n if comps else 2
        return cls(n, comps)


@lru_cache(maxsize=64)
def _radial_power(n, k):
    return Polynomial.norm_sq(n) ** k


def _harmonic_part(q, e):
    """Harmonic component of a homogeneous polynomial ``q`` of degree ``e``.

    Uses the projection ``sum_k (-1)^k |x|^{2k} Lap^k q / (2^k k! prod_{i<k} (n + 2e - 4 - 2i))``.
    """
    n = q.n
    out = q
    lap = q
    scale = 1.0
    for k in range(1, e // 2 + 1):
        lap = lap.laplacian()
        if lap.is_zero(0.0):
            break
        scale *= 2.0 * k * (n + 2 * e - 4 - 2 * (k - 1))
        sign = -1.0 if k % 2 else 1.0
        out = out + _radial_power(n, k) * lap * (sign / scale)
    return out


def harmonic_decompose(p, max_degree=MAX_DEGREE, max_dimension=MAX_DIMENSION):
    """Split ``p`` into spherical harmonics: ``p|S = sum_d h_d`` with ``Lap h_d = 0``.

    Each homogeneous part ``p_m = sum_j |x|^{2j} h_{m-2j}`` is resolved via
    ``h_{m-2j} = K[Lap^j p_m] / a_j`` where ``K`` is the harmonic projection
    and ``a_j = prod_{i<=j} 2i (n + 2(m-2j) + 2i - 2)``.
    """
    if p.n < 2:
        raise ValueError("harmonic decomposition needs n >= 2")
    if p.n > max_dimension:
        raise DegreeGuardError(f"dimension {p.n} exceeds guard {max_dimension}")
    m_top = p.degree
    if m_top > max_degree:
        raise DegreeGuardError(f"degree {m_top} exceeds guard {max_degree}")
    n = p.n
    comps = {}
    for m in range(m_top + 1):
        pm = p.homogeneous_part(m)
        if len(pm) == 0:
            continue
        lap = pm
        for j in range(m // 2 + 1):
            if j > 0:
                lap = lap.laplacian()
            if lap.is_zero(0.0):
                break
            e = m - 2 * j
            a = math.prod(2.0 * i * (n + 2 * e + 2 * i - 2) for i in range(1, j + 1))
            h = _harmonic_part(lap, e) / a
            comps[e] = comps[e] + h if e in comps else h
    out = []
    for d in sorted(comps):
        h = comps[d].prune(1e-14 * max(1.0, float(np.abs(p.coeffs).max())))
        if len(h):
            out.append((d, h))
    return HarmonicDecomposition(n, tuple(out))
