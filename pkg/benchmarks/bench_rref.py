"""Compare the compiled row-reduction kernel with the pure-Python fallback.

    python3 benchmarks/bench_rref.py [--repeat N]

Both kernels get identical integer matrices.  Workloads are random dense
matrices and the real Leibniz systems for Q_(2m+1); results are checked for
equality before timing is reported.
"""
import argparse
import math
import random
import timeit

from liekit import _reduce_py, linalg
from liekit.derivations import leibniz_system
from liekit.families import build_Q

try:
    from liekit import _reduce as _reduce_ext
except ImportError:
    _reduce_ext = None


def integer_rows(M):
    rows = []
    for r in M:
        den = math.lcm(*(v.denominator for v in r))
        rows.append([int(v * den) for v in r])
    return rows


def workloads(seed=1):
    rng = random.Random(seed)
    for n in (10, 25, 50):
        rows = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        yield f"random {n}x{n}", rows, n
    for m in (2, 3, 4):
        sys_rows = leibniz_system(build_Q(m))
        n = 2 * m + 1
        yield f"Leibniz Q{n} ({len(sys_rows)}x{n * n})", integer_rows(sys_rows), n * n


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"package backend: {linalg.BACKEND}")
    if _reduce_ext is None:
        print("compiled kernel not built; only the fallback is timed")
    print(f"{'workload':32s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s}")
    for name, rows, ncols in workloads():
        py = lambda: _reduce_py.reduce_int_rows([r[:] for r in rows], ncols)  # noqa: E731
        t_py = min(timeit.repeat(py, number=1, repeat=args.repeat)) * 1e3
        if _reduce_ext is None:
            print(f"{name:32s} {t_py:10.2f} {'-':>12s} {'-':>8s}")
            continue
        try:
            c = lambda: _reduce_ext.reduce_int_rows([r[:] for r in rows], ncols)  # noqa: E731
            same = c() == py()
            t_c = min(timeit.repeat(c, number=1, repeat=args.repeat)) * 1e3
        except OverflowError:
            print(f"{name:32s} {t_py:10.2f} {'overflow':>12s} {'-':>8s}")
            continue
        flag = "" if same else "  RESULTS DIFFER"
        print(f"{name:32s} {t_py:10.2f} {t_c:12.2f} {t_py / t_c:7.1f}x{flag}")


if __name__ == "__main__":
    main()
