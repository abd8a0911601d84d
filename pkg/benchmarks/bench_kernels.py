"""Time the numba and numpy flavours of each kernel on representative inputs."""
import argparse
import time

import numpy as np

from levylimit import kernels
from levylimit._accel import HAVE_NUMBA


def best_of(func, args, repeat):
    """Best wall time in ms over ``repeat`` calls."""
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func(*args)
        times.append(time.perf_counter() - t0)
    return min(times) * 1000, out


def make_inputs(scale, rng):
    n = int(1_000_000 * scale)
    counts = rng.poisson(3.0, size=max(n // 3, 1))
    values = rng.standard_normal(counts.sum())

    m = int(100_000 * scale)
    grid = np.sort(rng.uniform(0, 1, m))
    grid[0], grid[-1] = 0.0, 1.0
    vals = np.cumsum(rng.standard_normal(m))
    left = np.concatenate(([vals[0]], vals[:-1]))
    query = rng.uniform(0, 1, m)

    u = rng.uniform(-np.pi / 2, np.pi / 2, n)
    w = rng.exponential(size=n)

    paths = np.cumsum(rng.standard_normal((int(1000 * scale) or 1, 257)) * 0.05, axis=1)

    k = int(10_000 * scale)
    times = np.repeat(np.sort(rng.uniform(0, 1, k)), 2)
    wvals = np.cumsum(rng.standard_normal(2 * k) * 0.02)

    return {
        "segment_sums": (values, counts),
        "eval_right": (grid, vals, left, query),
        "eval_left": (grid, vals, left, query),
        "cms_standard": (u, w, 1.5, 0.3),
        "lag_exceedance": (paths, 0.2, 8),
        "window_range": (times, wvals, 0.05),
    }


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--scale", type=float, default=1.0, help="multiply the default input sizes")
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    if not HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return
    inputs = make_inputs(args.scale, np.random.default_rng(args.seed))
    print(f"{'kernel':<16}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}  agree")
    for name, call_args in inputs.items():
        f_np = getattr(kernels, f"{name}_numpy")
        f_nb = getattr(kernels, f"{name}_numba")
        f_nb(*call_args)  # compile
        t_np, out_np = best_of(f_np, call_args, args.repeat)
        t_nb, out_nb = best_of(f_nb, call_args, args.repeat)
        agree = np.allclose(out_np, out_nb, rtol=1e-10, atol=1e-12)
        print(f"{name:<16}{t_np:12.3f}{t_nb:12.3f}{t_np / t_nb:9.1f}x  {'yes' if agree else 'NO'}")


if __name__ == "__main__":
    main()
