"""Compare the compiled and pure-Python box search.

    python benchmarks/bench_kernels.py [--repeat 3]

Two workloads: full scans (forms with no small zero, the worst case inside
``find_isotropic``) and early exits on random indefinite forms.
"""

import argparse
import random
import time

from quadwa import _kernels_py
from quadwa.kernels import BACKEND

try:
    from quadwa import _kernels as compiled
except ImportError:
    compiled = None


def random_gram(rng, k, bound):
    G = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            G[i][j] = G[j][i] = rng.randint(-bound, bound)
    return G


def workloads():
    rng = random.Random(0)
    # anisotropic over Q: no zero in any box, so every point is visited
    full = [([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 7]], H) for H in (4, 8)]
    full += [([[1, 0, 0, 0, 0], [0, 2, 0, 0, 0], [0, 0, 3, 0, 0], [0, 0, 0, 5, 0],
               [0, 0, 0, 0, 11]], 8)]
    mixed = [(random_gram(rng, rng.randint(3, 5), 100), rng.choice((2, 4, 8))) for _ in range(200)]
    return {"full scan": full, "random indefinite": mixed}


def timed(fn, cases, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = [fn(G, H) for G, H in cases]
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args()
    print(f"default backend: {BACKEND}")
    if compiled is None:
        print("compiled extension not built; nothing to compare")
        return
    for name, cases in workloads().items():
        tp, rp = timed(_kernels_py.box_search, cases, a.repeat)
        tc, rc = timed(compiled.box_search, cases, a.repeat)
        assert rp == rc, "backends disagree"
        print(f"{name:18s} {len(cases):4d} boxes  python {tp:8.3f} s  compiled {tc:8.4f} s  "
              f"speed-up {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
