"""Time the numba kernels against their numpy fallbacks.

Both paths run on identical inputs; the table reports best-of-``repeat``
wall time, the speedup and the largest absolute disagreement.

    python benchmarks/bench_kernels.py --rows 200000 --n 10 --repeat 5
"""

import argparse
import time

import numpy as np

from spherecalc import _accel


def best_time(func, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rows, n, rng):
    X = rng.standard_normal((rows, n))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    E = rng.integers(0, 4, size=(40, n))
    G = rng.standard_normal((rows, n))
    H = rng.standard_normal((rows, n, n))
    H = 0.5 * (H + H.transpose(0, 2, 1))
    return [
        ("monomials", _accel._monomials_np, _accel._monomials_nb, (X, E)),
        ("projected_hs_sq", _accel._projected_hs_sq_np, _accel._projected_hs_sq_nb, (X, G, H)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=200_000)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    if _accel.numba is None:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    print(f"rows={args.rows} n={args.n} repeat={args.repeat}")
    print(f"{'kernel':18s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, f_np, f_nb, inputs in cases(args.rows, args.n, rng):
        f_nb(*inputs)  # compile outside the timed region
        t_np, out_np = best_time(f_np, inputs, args.repeat)
        t_nb, out_nb = best_time(f_nb, inputs, args.repeat)
        diff = float(np.max(np.abs(np.subtract(out_np, out_nb))))
        print(f"{name:18s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f} {diff:11.2e}")


if __name__ == "__main__":
    main()
