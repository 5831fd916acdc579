# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: counter-based sampling and the rotating arc sweep.

Every function here has a bit-identical twin in ``_kernels_py``.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int8_t

cnp.import_array()

cdef extern from *:
    """
    #include <stdint.h>
    static inline uint64_t uc_mulhi(uint64_t a, uint64_t b) {
        return (uint64_t)(((unsigned __int128)a * (unsigned __int128)b) >> 64);
    }
    static inline uint64_t uc_mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    """
    uint64_t uc_mulhi(uint64_t a, uint64_t b) nogil
    uint64_t uc_mix(uint64_t z) nogil

cdef uint64_t GOLDEN = 0x9e3779b97f4a7c15ULL


def stream(uint64_t seed, uint64_t start, Py_ssize_t count):
    """Raw 64-bit variates for draw indices ``start .. start+count-1``."""
    out = np.empty(count, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef Py_ssize_t j
    with nogil:
        for j in range(count):
            o[j] = uc_mix(seed + GOLDEN * (start + <uint64_t>j + 1))
    return out


def draw_uniform(uint64_t seed, Py_ssize_t n, uint64_t m):
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t j
    with nogil:
        for j in range(n):
            o[j] = <int64_t>uc_mulhi(uc_mix(seed + GOLDEN * (<uint64_t>j + 1)), m)
    return out


def count_uniform(uint64_t seed, Py_ssize_t n, Py_ssize_t m):
    out = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t j
    cdef uint64_t mm = <uint64_t>m
    with nogil:
        for j in range(n):
            o[uc_mulhi(uc_mix(seed + GOLDEN * (<uint64_t>j + 1)), mm)] += 1
    return out


def count_cdf(uint64_t seed, Py_ssize_t n, const int64_t[::1] cum, uint64_t total):
    """Inverse-CDF draws: first atom whose cumulative weight exceeds mulhi(u, total)."""
    cdef Py_ssize_t m = cum.shape[0]
    out = np.zeros(m, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef Py_ssize_t j, lo, hi, mid
    cdef int64_t r
    with nogil:
        for j in range(n):
            r = <int64_t>uc_mulhi(uc_mix(seed + GOLDEN * (<uint64_t>j + 1)), total)
            lo = 0
            hi = m
            while lo < hi:
                mid = (lo + hi) >> 1
                if cum[mid] > r:
                    hi = mid
                else:
                    lo = mid + 1
            o[lo] += 1
    return out


def arc_profile(int64_t L, const int64_t[::1] pos, const int8_t[::1] lab,
                const int64_t[::1] w, const int64_t[::1] c):
    """Error counts on every arc of the shift circle.

    ``pos`` is sorted and lies in ``[0, L)`` with ``L`` even. Returns arc start
    positions and the (true, empirical) misclassified weight of the semicircle
    ``(alpha, alpha + L/2]`` for alpha in ``[start, next start)``.
    """
    cdef Py_ssize_t m = pos.shape[0]
    cdef int64_t H = L // 2
    starts = np.empty(2 * m, dtype=np.int64)
    errd = np.empty(2 * m, dtype=np.int64)
    errs = np.empty(2 * m, dtype=np.int64)
    cdef int64_t[::1] st = starts
    cdef int64_t[::1] ed = errd
    cdef int64_t[::1] es = errs
    cdef Py_ssize_t r0, ip, iq, q, taken, g
    cdef int64_t a0, qpos, ppos, cur, d, D, S, sgn
    if m == 0:
        return starts[:0], errd[:0], errs[:0]
    with nogil:
        r0 = 0
        while r0 < m and pos[r0] < H:
            r0 += 1
        # first event position over both lists
        if r0 < m:
            qpos = pos[r0] - H
        else:
            qpos = pos[0] + H
        a0 = pos[0] if pos[0] < qpos else qpos
        D = 0
        S = 0
        for q in range(m):
            d = (pos[q] - a0) % L
            if d < 0:
                d += L
            if (d > 0 and d <= H) != (lab[q] > 0):
                D += w[q]
                S += c[q]
        ip = 0
        iq = 0
        g = -1
        taken = 0
        while taken < 2 * m:
            if iq < m:
                q = r0 + iq
                if q >= m:
                    q -= m
                    qpos = pos[q] + H
                else:
                    qpos = pos[q] - H
            if ip < m and (iq >= m or pos[ip] <= qpos):
                cur = pos[ip]
                q = ip
                sgn = 1
                ip += 1
            else:
                cur = qpos
                sgn = -1
                iq += 1
            taken += 1
            if g < 0 or cur != st[g]:
                g += 1
                st[g] = cur
                if g > 0:
                    ed[g] = ed[g - 1]
                    es[g] = es[g - 1]
                else:
                    ed[0] = D
                    es[0] = S
            if g > 0 or cur != a0:
                if lab[q] < 0:
                    sgn = -sgn
                ed[g] += sgn * w[q]
                es[g] += sgn * c[q]
    return starts[:g + 1], errd[:g + 1], errs[:g + 1]
