"""Time the compiled and numpy variants of the two float/int64 kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--rows 200000] [--box 12]

The compiled column is skipped when numba is unavailable or disabled with
SUBSPACE_APPROX_NUMBA=0.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from subspace_approx import _kernels


def best_of(fn, repeat: int) -> float:
    fn()  # warm-up (includes JIT compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rows", type=int, default=200_000, help="rows for omega_rows")
    ap.add_argument("--box", type=int, default=12, help="half-width of the rank-4 enumeration box")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    X = rng.normal(size=(args.rows, 4))
    X /= np.linalg.norm(X, axis=1)[:, None]
    Y = rng.normal(size=(args.rows, 4))
    Y /= np.linalg.norm(Y, axis=1)[:, None]
    B = rng.integers(-9, 10, size=(4, 5))
    G = (B @ B.T).astype(np.int64)
    bounds = np.full(4, args.box, dtype=np.int64)

    compiled = _kernels.BACKEND == "numba"
    cases = [
        ("omega_rows", lambda: _kernels.numpy_omega_rows(X, Y), lambda: _kernels.omega_rows(X, Y)),
        ("box_min", lambda: _kernels.numpy_box_min(G, bounds), lambda: _kernels.box_min(G, bounds)),
    ]
    print(f"backend={_kernels.BACKEND} rows={args.rows} box={(2 * args.box + 1) ** 4} points")
    print(f"{'kernel':<12}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, np_fn, fast_fn in cases:
        t_np = best_of(np_fn, args.repeat)
        if compiled:
            t_nb = best_of(fast_fn, args.repeat)
            print(f"{name:<12}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")
        else:
            print(f"{name:<12}{t_np:>12.4f}{'-':>12}{'-':>10}")
    a, b = _kernels.numpy_box_min(G, bounds), _kernels.box_min(G, bounds)
    assert a[0] == b[0] and np.array_equal(a[1], b[1]), "backends disagree"


if __name__ == "__main__":
    main()
