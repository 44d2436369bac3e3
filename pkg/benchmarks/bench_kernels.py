"""Time the compiled and numpy transport kernels on frame-sized problems.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from cmcdarboux import kernels
from cmcdarboux import frame as fr
from cmcdarboux import surface as sf


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = ["python"]
    try:
        kernels.get_backend("cython")
        backends.append("cython")
    except ImportError:
        print("compiled kernel not built; timing the numpy fallback only")

    print(f"{'problem':34s}" + "".join(f"{b:>12s}" for b in backends) + "   speedup")
    for B, K, s in [(1, 64, 8), (64, 63, 8), (128, 127, 8)]:
        G = rng.normal(size=(B, K, 2 * s + 1, 2, 2)) + 0j
        Y0 = np.broadcast_to(np.eye(2, dtype=complex), (B, 2, 2)).copy()
        t = {b: best_of(lambda b=b: kernels.get_backend(b)(G, Y0, 1e-3), args.repeat) for b in backends}
        row = f"rk4_sweep B={B:<4d} K={K:<4d} substeps={s:<3d}"
        row += "".join(f"{t[b] * 1e3:10.2f}ms" for b in backends)
        if "cython" in t:
            row += f"   {t['python'] / t['cython']:6.1f}x"
        print(row)

    # end to end: one extended frame on the default grid, active backend
    g = sf.ConformalGrid.standard(64, 64)
    t = best_of(lambda: fr.integrate_frame(g, 0.0, 0.5, 2.0), args.repeat)
    print(f"integrate_frame 64x64 ({kernels.BACKEND} backend): {t * 1e3:.1f}ms")


if __name__ == "__main__":
    main()
