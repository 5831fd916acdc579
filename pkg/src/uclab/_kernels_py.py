"""Pure-numpy twins of the compiled kernels in ``_kernels.pyx``.

Results are bit-identical to the compiled versions. ``arc_profile`` also
accepts object arrays of Python ints, which the oracles use when a grid or a
weight total does not fit in 64 bits.
"""
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_LO32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _C1
    z = (z ^ (z >> np.uint64(27))) * _C2
    return z ^ (z >> np.uint64(31))


def _mulhi(a, b):
    """High 64 bits of the 128-bit product of two uint64 arrays."""
    b = np.uint64(b)
    a_lo, a_hi = a & _LO32, a >> _S32
    b_lo, b_hi = b & _LO32, b >> _S32
    lo_lo = a_lo * b_lo
    hi_lo = a_hi * b_lo
    lo_hi = a_lo * b_hi
    cross = (lo_lo >> _S32) + (hi_lo & _LO32) + lo_hi
    return a_hi * b_hi + (hi_lo >> _S32) + (cross >> _S32)


def stream(seed, start, count):
    idx = np.arange(1, count + 1, dtype=np.uint64) + np.uint64(start)
    return _mix(idx * GOLDEN + np.uint64(seed))


def draw_uniform(seed, n, m):
    return _mulhi(stream(seed, 0, n), m).astype(np.int64)


def count_uniform(seed, n, m):
    return np.bincount(draw_uniform(seed, n, m), minlength=m).astype(np.int64)


def count_cdf(seed, n, cum, total):
    r = _mulhi(stream(seed, 0, n), total).astype(np.int64)
    idx = np.searchsorted(np.asarray(cum, dtype=np.int64), r, side="right")
    return np.bincount(idx, minlength=len(cum)).astype(np.int64)


def arc_profile(L, pos, lab, w, c):
    m = len(pos)
    dtype = pos.dtype
    if m == 0:
        empty = np.empty(0, dtype=dtype)
        return empty, empty.copy(), empty.copy()
    H = L // 2
    sign = np.where(np.asarray(lab) > 0, 1, -1).astype(dtype)
    ev = np.concatenate([pos, (pos - H) % L])
    dd = np.concatenate([sign * w, -sign * w])
    ds = np.concatenate([sign * c, -sign * c])
    order = np.argsort(ev, kind="stable")
    ev, dd, ds = ev[order], dd[order], ds[order]
    a0 = ev[0]
    d = (pos - a0) % L
    wrong = ((d > 0) & (d <= H)) != (np.asarray(lab) > 0)
    D0 = w[wrong].sum()
    S0 = c[wrong].sum()
    last = np.flatnonzero(np.append(ev[1:] != ev[:-1], True))
    cd = np.cumsum(dd)
    cs = np.cumsum(ds)
    starts = ev[last]
    errd = D0 + (cd[last] - cd[last[0]])
    errs = S0 + (cs[last] - cs[last[0]])
    return starts, errd.astype(dtype), errs.astype(dtype)
