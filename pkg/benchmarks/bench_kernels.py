"""Compare the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly, so the environment switch is not needed.
Outputs are checked for equality before timing.
"""
import argparse
import timeit

import numpy as np

from uclab import kernels
from uclab import _kernels_py as py

try:
    from uclab import _kernels as cy
except ImportError:
    cy = None


def _arc_inputs(m, n, seed=0):
    L = 4 * m
    rng = np.random.Generator(np.random.Philox(seed))
    pos = np.sort(rng.choice(L, m, replace=False)).astype(np.int64)
    lab = rng.choice(np.array([-1, 1], dtype=np.int8), m)
    w = rng.integers(1, 100, m).astype(np.int64)
    c = np.bincount(rng.integers(0, m, n), minlength=m).astype(np.int64)
    return np.int64(L), pos, lab, w, c


def cases():
    arc = _arc_inputs(1 << 12, 1 << 14)
    cum = np.cumsum(np.arange(1, 4097, dtype=np.int64))
    return {
        "draw_uniform n=2^20": ("draw_uniform", (7, 1 << 20, 1 << 16)),
        "count_uniform n=2^20": ("count_uniform", (7, 1 << 20, 1 << 12)),
        "count_cdf n=2^18": ("count_cdf", (7, 1 << 18, cum, int(cum[-1]))),
        "arc_profile m=2^12": ("arc_profile", arc),
    }


def _as_tuple(x):
    return x if isinstance(x, tuple) else (x,)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"active backend: {kernels.BACKEND}")
    if cy is None:
        print("compiled extension not built; timing the numpy fallback only")
    print(f"{'kernel':<24}{'numpy ms':>10}{'compiled ms':>13}{'speedup':>9}")
    for name, (fn, a) in cases().items():
        f_py = getattr(py, fn)
        t_py = min(timeit.repeat(lambda: f_py(*a), number=1, repeat=args.repeat)) * 1e3
        if cy is None:
            print(f"{name:<24}{t_py:>10.2f}{'-':>13}{'-':>9}")
            continue
        f_cy = getattr(cy, fn)
        if not all(np.array_equal(u, v) for u, v in zip(_as_tuple(f_py(*a)), _as_tuple(f_cy(*a)))):
            raise SystemExit(f"{fn}: backends disagree")
        t_cy = min(timeit.repeat(lambda: f_cy(*a), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<24}{t_py:>10.2f}{t_cy:>13.2f}{t_py / t_cy:>8.1f}x")


if __name__ == "__main__":
    main()
