"""Time the numba kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``. Compilation is excluded by a
warm-up call. Results differ between backends only by round-off.
"""
import argparse
import time

import numpy as np

from gaussmetro import _kernels


def random_inputs(rng, n_modes, dim):
    m = 2 * n_modes
    A = rng.standard_normal((m, m))
    A = A + A.T
    S = rng.standard_normal((m, m))
    gamma = S @ S.T + np.eye(m)
    lam = np.sort(rng.random(dim))[::-1]
    B = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    B = B + B.conj().T
    return (0.3, rng.standard_normal(m), A, rng.standard_normal(m), gamma), (lam, B, 1e-12)


def timeit(fn, args, repeat):
    fn(*args)  # warm-up, includes jit compilation
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = fn(*args)
    return (time.perf_counter() - t0) / repeat, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", type=int, default=3)
    ap.add_argument("--dim", type=int, default=400, help="support size for the pair sum")
    ap.add_argument("--repeat", type=int, default=2000)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba unavailable or disabled; nothing to compare")
        return
    rng = np.random.default_rng(0)
    quad, pair = random_inputs(rng, args.modes, args.dim)
    benches = [
        ("quadratic_mean", _kernels.numpy_quadratic_mean, _kernels.numba_quadratic_mean, quad, args.repeat),
        ("quadratic_variance", _kernels.numpy_quadratic_variance, _kernels.numba_quadratic_variance,
         quad[1:], args.repeat),
        ("qfi_pair_sum", _kernels.numpy_qfi_pair_sum, _kernels.numba_qfi_pair_sum, pair,
         max(1, args.repeat // 200)),
    ]
    print(f"{'kernel':<20}{'numpy [us]':>14}{'numba [us]':>14}{'speedup':>10}{'max diff':>12}")
    for name, f_np, f_nb, fargs, rep in benches:
        t_np, v_np = timeit(f_np, fargs, rep)
        t_nb, v_nb = timeit(f_nb, fargs, rep)
        diff = abs(v_np - v_nb)
        print(f"{name:<20}{t_np * 1e6:14.2f}{t_nb * 1e6:14.2f}{t_np / t_nb:10.2f}{diff:12.2e}")


if __name__ == "__main__":
    main()
