"""Wall-clock comparison of the numba and numpy eigensolver kernels.

    python benchmarks/bench_kernels.py [--sizes 500 1000 3000] [--m 8] [--repeat 3]

Both paths solve the same discretized oscillator; the script also reports
the largest eigenvalue difference between them.
"""
import argparse
import time

import numpy as np

from susy_workbench import kernels
from susy_workbench.eigensolver import EIG_TOL, RESIDUAL_TOL, Grid, _start_vectors, discretize


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(sizes, m, repeat):
    if not kernels.HAS_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    rows = []
    for n in sizes:
        op = discretize(lambda x: x * x, Grid(-12.0, 12.0, n))
        d, e = op.diagonal, op.off_diagonal
        start = _start_vectors(n, m)
        scale = float(np.max(np.abs(d))) + 2.0 * float(np.max(np.abs(e)))

        # compile outside the timed region
        kernels.bisect_lowest_numba(d, e, m, EIG_TOL, 400)
        t_bn, (eig_nb, _, _) = _best(lambda: kernels.bisect_lowest_numba(d, e, m, EIG_TOL, 400), repeat)
        t_bp, (eig_np, _, _) = _best(lambda: kernels.bisect_lowest_numpy(d, e, m, EIG_TOL, 400), repeat)
        args = (d, e, eig_nb, start, 0.1 * RESIDUAL_TOL, 8, 1e-7 * scale)
        kernels.inverse_iteration_numba(*args)
        t_in, _ = _best(lambda: kernels.inverse_iteration_numba(*args), repeat)
        t_ip, _ = _best(lambda: kernels.inverse_iteration_numpy(*args), repeat)
        rows.append((n, t_bn, t_bp, t_in, t_ip, float(np.max(np.abs(eig_nb - eig_np)))))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 1000, 3000])
    ap.add_argument("--m", type=int, default=8)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'N':>6} {'bisect numba':>13} {'bisect numpy':>13} {'invit numba':>12} {'invit numpy':>12}"
          f" {'speedup':>8} {'max |dE|':>10}")
    for n, bn, bp, inb, inp, de in run(args.sizes, args.m, args.repeat):
        speed = (bp + inp) / (bn + inb)
        print(f"{n:>6} {bn * 1e3:>11.2f}ms {bp * 1e3:>11.2f}ms {inb * 1e3:>10.2f}ms {inp * 1e3:>10.2f}ms"
              f" {speed:>7.1f}x {de:>10.2e}")


if __name__ == "__main__":
    main()
