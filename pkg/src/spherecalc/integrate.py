"""Integration against the uniform measure on S^{n-1}.

Samples are produced in fixed-size blocks.  Block ``b`` of stream ``s`` is
drawn from a Philox generator keyed by ``SeedSequence(seed, spawn_key=(s, b))``,
so every sample depends only on ``(seed, stream, index)`` and never on how
blocks are distributed over workers.  Per-block statistics are merged in
block order, which keeps results bit-identical for any worker count.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _accel
from .fields import PolynomialField
from .polynomial import Polynomial, poly_sphere_integral

BLOCK = 1 << 15

# independent sample streams under one seed
STREAM_MAIN = 0
STREAM_AUDIT = 1
STREAM_CENTER = 2
STREAM_GAUSS = 3
STREAM_AUX = 4


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    samples: int = 1_000_000
    seed: int = 42
    workers: int = 0
    stream: int = STREAM_MAIN
    gaussian: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")

    def with_(self, **kw):
        d = asdict(self)
        d.update(kw)
        return SamplerConfig(**d)

    @property
    def n_workers(self):
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)

    @property
    def blocks(self):
        return [(b * BLOCK, min(BLOCK, self.samples - b * BLOCK)) for b in range(-(-self.samples // BLOCK))]


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    def to_dict(self):
        return {"mean": self.mean, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def sample_block(config, index):
    """Points of block ``index``: unit vectors, or standard Gaussians if ``config.gaussian``."""
    start, size = config.blocks[index]
    ss = np.random.SeedSequence(config.seed, spawn_key=(config.stream, index))
    Z = np.random.Generator(np.random.Philox(ss)).standard_normal((size, config.n))
    if config.gaussian:
        return Z
    return Z / np.linalg.norm(Z, axis=1)[:, None]


def sample_uniform(config):
    """Yield uniform points on S^{n-1} block by block."""
    for b in range(len(config.blocks)):
        yield sample_block(config, b)


def _map_blocks(func, config):
    nb = len(config.blocks)
    work = lambda b: func(sample_block(config, b))  # noqa: E731
    if config.n_workers == 1 or nb == 1:
        return [work(b) for b in range(nb)]
    with ThreadPoolExecutor(max_workers=config.n_workers) as pool:
        return list(pool.map(work, range(nb)))


class _Moments:
    """Running mean and co-moment matrix; merged pairwise (Chan et al.)."""

    def __init__(self, k):
        self.count = 0
        self.mean = np.zeros(k)
        self.m2 = np.zeros((k, k))

    @classmethod
    def of(cls, Y):
        out = cls(Y.shape[1])
        out.count = Y.shape[0]
        out.mean = Y.mean(axis=0)
        D = Y - out.mean
        out.m2 = D.T @ D
        return out

    def merge(self, other):
        if other.count == 0:
            return
        if self.count == 0:
            self.count, self.mean, self.m2 = other.count, other.mean, other.m2
            return
        tot = self.count + other.count
        delta = other.mean - self.mean
        self.mean = self.mean + delta * (other.count / tot)
        self.m2 = self.m2 + other.m2 + np.outer(delta, delta) * (self.count * other.count / tot)
        self.count = tot

    @property
    def cov(self):
        if self.count < 2:
            return np.zeros_like(self.m2)
        return self.m2 / (self.count - 1)


def _check_finite(Y, name="integrand"):
    if not np.all(np.isfinite(Y)):
        bad = int(np.size(Y) - np.count_nonzero(np.isfinite(Y)))
        raise FloatingPointError(f"{name} produced {bad} non-finite values")


def mc_moments(g, config):
    """Mean vector and covariance of the mean for a vector integrand.

    ``g`` maps a block ``(m, n)`` to ``(m,)`` or ``(m, k)``.  Returns
    ``(mean, cov_of_mean)``.
    """

    def block(T):
        Y = np.asarray(g(T), dtype=float)
        Y = Y.reshape(Y.shape[0], -1)
        _check_finite(Y)
        return _Moments.of(Y)

    acc = None
    for part in _map_blocks(block, config):
        if acc is None:
            acc = part
        else:
            acc.merge(part)
    return acc.mean, acc.cov / acc.count


def mc_integrate(g, config):
    """Monte Carlo mean of ``g`` over the sphere with its standard error."""
    mean, cov = mc_moments(g, config)
    if mean.size != 1:
        raise ValueError("mc_integrate expects a scalar integrand; use mc_moments")
    return MonteCarloEstimate(float(mean[0]), float(np.sqrt(max(cov[0, 0], 0.0))), config.samples, config.seed)


def linear_combination(mean, cov, weights):
    """Value and standard error of ``weights . mean``."""
    w = np.asarray(weights, dtype=float)
    return float(w @ mean), float(np.sqrt(max(w @ cov @ w, 0.0)))


def log_mean_exp(h, config):
    """``log E exp(h)`` accumulated in log space, with a delta-method standard error.

    Returns ``(value, stderr)`` on the log scale.
    """

    def block(T):
        vals = np.asarray(h(T), dtype=float).reshape(-1)
        _check_finite(vals, "exponent")
        return _accel.exp_block(vals)

    top, s1, s2 = -np.inf, 0.0, 0.0
    for bt, b1, b2 in _map_blocks(block, config):
        if bt > top:
            scale = np.exp(top - bt) if np.isfinite(top) else 0.0
            s1, s2, top = s1 * scale + b1, s2 * scale * scale + b2, bt
        else:
            scale = np.exp(bt - top)
            s1, s2 = s1 + b1 * scale, s2 + b2 * scale * scale
    N = config.samples
    mean = s1 / N
    var = max(s2 / N - mean * mean, 0.0) * N / max(N - 1, 1)
    return float(top + np.log(mean)), float(np.sqrt(var / N) / mean)


def entropy_estimate(u, config):
    """Plug-in estimate of ``Ent(u) = E[u log u] - E u log E u`` (with 0 log 0 = 0)."""

    def g(T):
        vals = np.asarray(u(T), dtype=float).reshape(-1)
        if np.any(vals < 0):
            raise ValueError("entropy needs a non-negative function")
        safe = np.where(vals > 0, vals, 1.0)
        return np.stack([vals * np.log(safe), vals], axis=1)

    mean, cov = mc_moments(g, config)
    a, b = mean
    if b <= 0:
        return MonteCarloEstimate(0.0, 0.0, config.samples, config.seed)
    value, err = linear_combination(mean, cov, [1.0, -np.log(b) - 1.0])
    value = a - b * np.log(b)
    return MonteCarloEstimate(float(value), err, config.samples, config.seed)


@dataclass(frozen=True)
class VectorMean:
    """``m = E f``, ``w = E[theta f]``, ``v = n w`` and ``I = |w|^2``."""

    m: float
    w: np.ndarray
    v: np.ndarray
    I: float
    exact: bool
    m_stderr: float = 0.0
    w_stderr: np.ndarray = field(default=None)

    def to_dict(self):
        return {
            "m": self.m,
            "v": self.v.tolist(),
            "I": self.I,
            "exact": self.exact,
        }


def vector_mean(f, config):
    """Affine-part moments of ``f``; exact for polynomial fields."""
    n = f.n
    if isinstance(f, PolynomialField):
        p = f.poly
        m = poly_sphere_integral(p)
        w = np.array([poly_sphere_integral(p * Polynomial.variable(n, i)) for i in range(n)])
        return VectorMean(m, w, n * w, float(w @ w), True, 0.0, np.zeros(n))

    def g(T):
        vals = f.evaluate(T)
        return np.column_stack([vals, T * vals[:, None]])

    mean, cov = mc_moments(g, config)
    se = np.sqrt(np.clip(np.diag(cov), 0, None))
    w = mean[1:]
    return VectorMean(float(mean[0]), w, n * w, float(w @ w), False, float(se[0]), se[1:])
