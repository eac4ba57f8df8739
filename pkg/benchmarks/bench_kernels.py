"""Compare the numba and numpy evaluation kernels.

Runs the four hot kernels on identical inputs and reports best-of-N wall
times for both backends.  Works (numpy-only) when numba is missing.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 20000]
"""

import argparse
import time

import numpy as np

from nurbskit._kernels_numpy import (
    basis_many as np_basis_many,
    curve_eval_many as np_curve_eval_many,
    surface_eval_many as np_surface_eval_many,
    surface_points_grid as np_surface_points_grid,
)

try:
    from nurbskit._kernels_numba import (
        basis_many as nb_basis_many,
        curve_eval_many as nb_curve_eval_many,
        surface_eval_many as nb_surface_eval_many,
        surface_points_grid as nb_surface_points_grid,
    )

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def clamped_knots(num_basis, degree, rng):
    interior = np.sort(rng.uniform(0.05, 0.95, num_basis - degree - 1))
    return np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])


def make_inputs(size, seed=20240901):
    rng = np.random.default_rng(seed)
    degree = 3
    n = 24
    knots = clamped_knots(n, degree, rng)
    xs = rng.uniform(0.0, 1.0, size)

    cps = rng.uniform(-1.0, 1.0, (n, 3))
    w = rng.uniform(0.5, 2.0, n)

    n_eta = 16
    knots_eta = clamped_knots(n_eta, 2, rng)
    net = rng.uniform(-1.0, 1.0, (n, n_eta, 3))
    w2 = rng.uniform(0.5, 2.0, (n, n_eta))
    es = rng.uniform(0.0, 1.0, size)

    side = max(2, int(np.sqrt(size)) // 2)
    gx = np.linspace(0.0, 1.0, side)
    ge = np.linspace(0.0, 1.0, side)

    return {
        "basis_many": (knots, degree, xs),
        "curve_eval_many": (knots, degree, w, cps, xs),
        "surface_eval_many": (knots, degree, knots_eta, 2, w2, net, xs, es),
        "surface_points_grid": (knots, degree, knots_eta, 2, w2, net, gx, ge),
    }


def best_of(fn, args, repeat):
    fn(*args)  # warmup (JIT compile / cache touch)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=20000)
    args = ap.parse_args()

    inputs = make_inputs(args.size)
    numpy_fns = {
        "basis_many": np_basis_many,
        "curve_eval_many": np_curve_eval_many,
        "surface_eval_many": np_surface_eval_many,
        "surface_points_grid": np_surface_points_grid,
    }
    numba_fns = (
        {
            "basis_many": nb_basis_many,
            "curve_eval_many": nb_curve_eval_many,
            "surface_eval_many": nb_surface_eval_many,
            "surface_points_grid": nb_surface_points_grid,
        }
        if HAVE_NUMBA
        else {}
    )

    print(f"size={args.size} repeat={args.repeat} numba={'yes' if HAVE_NUMBA else 'no'}")
    header = f"{'kernel':<22} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, np_fn in numpy_fns.items():
        t_np = best_of(np_fn, inputs[name], args.repeat) * 1e3
        if HAVE_NUMBA:
            t_nb = best_of(numba_fns[name], inputs[name], args.repeat) * 1e3
            print(f"{name:<22} {t_np:>12.3f} {t_nb:>12.3f} {t_np / t_nb:>8.1f}x")
        else:
            print(f"{name:<22} {t_np:>12.3f} {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
