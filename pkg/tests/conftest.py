import itertools

import numpy as np
import pytest

from spherecalc.polynomial import Polynomial


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def quadrature_s2(alpha, nodes=12, angles=32):
    """Mean of x^alpha over S^2 by Gauss-Legendre in cos(polar) times a uniform azimuth rule.

    Exact for polynomial integrands of degree < min(2 * nodes, angles).
    """
    t, w = np.polynomial.legendre.leggauss(nodes)
    phi = 2 * np.pi * np.arange(angles) / angles
    T, P = np.meshgrid(t, phi, indexing="ij")
    s = np.sqrt(1 - T**2)
    x = np.stack([s * np.cos(P), s * np.sin(P), T])
    vals = np.prod([x[i] ** a for i, a in enumerate(alpha)], axis=0)
    return float((w[:, None] * vals).sum() / angles / 2.0)


def monomials_of_degree(n, d):
    out = []
    for combo in itertools.combinations_with_replacement(range(n), d):
        a = [0] * n
        for i in combo:
            a[i] += 1
        out.append(tuple(a))
    return out


def decompose_by_linear_system(p):
    """Harmonic components of a homogeneous polynomial by solving the defining linear system.

    Unknowns are the coefficients of h_e (degree e = m, m-2, ...).  Equations:
    sum_e |x|^{m-e} h_e = p and Lap h_e = 0, coefficient by coefficient.
    """
    n, m = p.n, p.degree
    degrees = list(range(m, -1, -2))
    r2 = Polynomial.norm_sq(n)
    target = monomials_of_degree(n, m)
    row_of = {a: i for i, a in enumerate(target)}
    cols, blocks = [], []
    for e in degrees:
        basis = monomials_of_degree(n, e)
        lap_rows = {a: i for i, a in enumerate(monomials_of_degree(n, e - 2))} if e >= 2 else {}
        for a in basis:
            mono = Polynomial.monomial(a)
            top = np.zeros(len(target))
            for b, c in (r2 ** ((m - e) // 2) * mono).terms.items():
                top[row_of[b]] += c
            lap = np.zeros(len(lap_rows))
            for b, c in mono.laplacian().terms.items():
                lap[lap_rows[b]] += c
            cols.append((e, a, top, lap))
        blocks.append((e, len(basis), len(lap_rows)))
    n_lap = sum(b[2] for b in blocks)
    A = np.zeros((len(target) + n_lap, len(cols)))
    offset = {}
    pos = len(target)
    for e, _, k in blocks:
        offset[e] = pos
        pos += k
    for j, (e, a, top, lap) in enumerate(cols):
        A[: len(target), j] = top
        A[offset[e]: offset[e] + len(lap), j] = lap
    rhs = np.zeros(A.shape[0])
    for b, c in p.terms.items():
        rhs[row_of[b]] = c
    sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    comps = {}
    for (e, a, _, _), c in zip(cols, sol):
        comps.setdefault(e, {})[a] = c
    return {e: Polynomial.from_terms(n, t).prune(1e-12) for e, t in comps.items()}
