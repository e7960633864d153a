"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``SPHERECALC_NUMBA=0`` in the environment to force the numpy path.
Both paths compute the same quantities; results agree to rounding but are
not guaranteed to be bit-identical across backends.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("SPHERECALC_NUMBA", "1") != "0"


def backend():
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _monomials_np(X, E):
    # per variable, a table of powers 0..max exponent; gather and multiply
    m = X.shape[0]
    out = np.ones((m, E.shape[0]))
    for i in range(X.shape[1]):
        top = int(E[:, i].max())
        if top == 0:
            continue
        powers = np.cumprod(np.repeat(X[:, i:i + 1], top, axis=1), axis=1)
        table = np.concatenate([np.ones((m, 1)), powers], axis=1)
        out *= table[:, E[:, i]]
    return out


def _projected_hs_sq_np(theta, grad, hess):
    # ||P B P||_HS^2 = ||B||^2 - 2|B t|^2 + (t'Bt)^2 with B = H - <g,t> I, |t| = 1
    n = theta.shape[1]
    radial = np.einsum("mi,mi->m", grad, theta)
    B = hess - radial[:, None, None] * np.eye(n)
    Bt = np.einsum("mij,mj->mi", B, theta)
    tBt = np.einsum("mi,mi->m", Bt, theta)
    return np.einsum("mij,mij->m", B, B) - 2.0 * np.einsum("mi,mi->m", Bt, Bt) + tBt**2


def _exp_block_np(h):
    top = h.max()
    w = np.exp(h - top)
    return top, w.sum(), (w * w).sum()


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _monomials_nb(X, E):
        m, n = X.shape
        k = E.shape[0]
        out = np.empty((m, k))
        for r in range(m):
            for t in range(k):
                acc = 1.0
                for i in range(n):
                    e = E[t, i]
                    if e != 0:
                        xi = X[r, i]
                        p = 1.0
                        for _ in range(e):
                            p *= xi
                        acc *= p
                out[r, t] = acc
        return out

    @numba.njit(cache=True)
    def _projected_hs_sq_nb(theta, grad, hess):
        m, n = theta.shape
        out = np.empty(m)
        Bt = np.empty(n)
        for r in range(m):
            radial = 0.0
            for i in range(n):
                radial += grad[r, i] * theta[r, i]
            fro = 0.0
            for i in range(n):
                s = 0.0
                for j in range(n):
                    b = hess[r, i, j]
                    if i == j:
                        b -= radial
                    fro += b * b
                    s += b * theta[r, j]
                Bt[i] = s
            bt2 = 0.0
            tbt = 0.0
            for i in range(n):
                bt2 += Bt[i] * Bt[i]
                tbt += Bt[i] * theta[r, i]
            out[r] = fro - 2.0 * bt2 + tbt * tbt
        return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def monomials(X, E):
    """Evaluate every monomial row of ``E`` (k, n) at every point of ``X`` (m, n)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    E = np.ascontiguousarray(E, dtype=np.int64)
    if E.shape[0] == 0:
        return np.zeros((X.shape[0], 0))
    if USE_NUMBA:
        return _monomials_nb(X, E)
    return _monomials_np(X, E)


def projected_hs_sq(theta, grad, hess):
    """Squared Hilbert-Schmidt norm of the spherical Hessian, per sample."""
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    grad = np.ascontiguousarray(grad, dtype=np.float64)
    hess = np.ascontiguousarray(hess, dtype=np.float64)
    if USE_NUMBA:
        return _projected_hs_sq_nb(theta, grad, hess)
    return _projected_hs_sq_np(theta, grad, hess)


def exp_block(h):
    """Return ``(max h, sum exp(h - max), sum exp(2 (h - max)))`` for one block."""
    # numpy on both backends: its vectorized exp beats a compiled loop here
    top, s1, s2 = _exp_block_np(np.ascontiguousarray(h, dtype=np.float64))
    return float(top), float(s1), float(s2)
