"""Time the numba and numpy paths of the enumeration kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each case runs both paths on the same input, checks they agree, and prints the
best wall time of each.  The first numba call is excluded (compilation).
"""
import argparse
import time

import numpy as np

from tordeg import _kernels
from tordeg.exact import det, inverse, mat, transpose

CASES = {
    "parallelepiped det 60": [(1, 0, 0), (0, 1, 0), (7, 12, 60)],
    "parallelepiped det 210": [(1, 0, 0), (3, 7, 0), (5, 11, 30)],
    "cone box 40": None,
    "cone box 80": None,
}


def parallelepiped_args(gens):
    gm = transpose(gens)
    d = det(gm)
    adj = mat(tuple(int(x * d) for x in row) for row in inverse(gm))
    return np.array(gm, dtype=np.int64), np.array(adj, dtype=np.int64), int(d)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy path is available")
    ineqs = np.array([(1, 0, 0), (0, 1, 0), (-1, -1, 3)], dtype=np.int64)
    print(f"{'case':28s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'points':>8s}")
    for name, gens in CASES.items():
        if gens is not None:
            g, a, d = parallelepiped_args(gens)

            def run(flag, g=g, a=a, d=d):
                return _kernels.parallelepiped_points(g, a, d, use_numba=flag)
        else:
            bound = int(name.split()[-1])

            def run(flag, bound=bound):
                return _kernels.box_points_in_cone(ineqs, [-bound] * 3, [bound] * 3, use_numba=flag)

        t_np, out_np = best_of(lambda: run(False), args.repeat)
        line = f"{name:28s} {t_np * 1e3:12.2f}"
        if _kernels.HAVE_NUMBA:
            run(True)  # compile
            t_nb, out_nb = best_of(lambda: run(True), args.repeat)
            same = sorted(map(tuple, out_np)) == sorted(map(tuple, out_nb))
            line += f" {t_nb * 1e3:12.2f} {len(out_np):8d}" + ("" if same else "  MISMATCH")
        print(line)


if __name__ == "__main__":
    main()
