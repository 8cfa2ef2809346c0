# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled per-pixel kernels; the reference semantics live in _pure.py.

Accumulation order matches the NumPy fallback exactly (row-major offsets,
NW/NE/SW/SE/C sub-windows, ascending histogram bins) so both backends
produce the same values to within a few ulps.
"""

import numpy as np

from libc.math cimport fabs, floor, log, pow, sqrt

KIND_EUCLIDEAN = 0
KIND_BHATTACHARYA = 1
KIND_MANHATTAN = 2
KIND_HAMMING = 3


def fuzzy_filter(double[:, ::1] padded, int half, double threshold, bint guard):
    cdef Py_ssize_t h = padded.shape[0] - 2 * half
    cdef Py_ssize_t w = padded.shape[1] - 2 * half
    cdef int size = 2 * half + 1
    cdef int n = size * size
    out_arr = np.empty((h, w), dtype=np.float64)
    buf_arr = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] buf = buf_arr
    cdef Py_ssize_t y, x
    cdef int dy, dx, i, j
    cdef double center, ref, med, v, wgt, num, den, key
    for y in range(h):
        for x in range(w):
            center = padded[y + half, x + half]
            ref = center
            if guard:
                i = 0
                for dy in range(size):
                    for dx in range(size):
                        buf[i] = padded[y + dy, x + dx]
                        i += 1
                for i in range(1, n):
                    key = buf[i]
                    j = i - 1
                    while j >= 0 and buf[j] > key:
                        buf[j + 1] = buf[j]
                        j -= 1
                    buf[j + 1] = key
                med = buf[n // 2]
                if fabs(center - med) > threshold:
                    ref = med
            num = 0.0
            den = 0.0
            for dy in range(size):
                for dx in range(size):
                    v = padded[y + dy, x + dx]
                    wgt = 1.0 - fabs(v - ref) / threshold
                    if wgt < 0.0:
                        wgt = 0.0
                    num += wgt * v
                    den += wgt
            out[y, x] = num / den
    return out_arr


def avds_filter(double[:, ::1] padded, int k, double omega, int kind,
                int bd_bins, double epsilon):
    cdef int pad = k - 1
    cdef Py_ssize_t h = padded.shape[0] - 2 * pad
    cdef Py_ssize_t w = padded.shape[1] - 2 * pad
    cdef double k2 = <double>(k * k)
    cdef double binsf = <double>bd_bins
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef long long[::1] counts = np.empty(bd_bins, dtype=np.int64)
    cdef double[::1] pbuf = np.empty(bd_bins, dtype=np.float64)
    cdef int ay[5]
    cdef int ax[5]
    cdef double mu[5]
    cdef double dist[5]
    ay[0] = 0;      ax[0] = 0
    ay[1] = 0;      ax[1] = pad
    ay[2] = pad;    ax[2] = 0
    ay[3] = pad;    ax[3] = pad
    ay[4] = k // 2; ax[4] = k // 2
    cdef Py_ssize_t y, x
    cdef int i, dy, dx, b, cb, cnt, deg_cnt
    cdef double center, s, v, d, cq, psum, qsum, qv, pv, bc
    cdef double num, den, wgt, deg_sum
    for y in range(h):
        for x in range(w):
            center = padded[y + pad, x + pad]
            for i in range(5):
                s = 0.0
                for dy in range(k):
                    for dx in range(k):
                        s += padded[y + ay[i] + dy, x + ax[i] + dx]
                mu[i] = s / k2
                if kind == 0:
                    s = 0.0
                    for dy in range(k):
                        for dx in range(k):
                            d = padded[y + ay[i] + dy, x + ax[i] + dx] - center
                            s += d * d
                    dist[i] = sqrt(s)
                elif kind == 2:
                    s = 0.0
                    for dy in range(k):
                        for dx in range(k):
                            s += fabs(padded[y + ay[i] + dy, x + ax[i] + dx] - center)
                    dist[i] = s
                elif kind == 3:
                    cq = floor(center + 0.5)
                    cnt = 0
                    for dy in range(k):
                        for dx in range(k):
                            if floor(padded[y + ay[i] + dy, x + ax[i] + dx] + 0.5) != cq:
                                cnt += 1
                    dist[i] = <double>cnt
                else:
                    for b in range(bd_bins):
                        counts[b] = 0
                    for dy in range(k):
                        for dx in range(k):
                            v = padded[y + ay[i] + dy, x + ax[i] + dx]
                            b = <int>floor(v * binsf / 256.0)
                            if b >= bd_bins:
                                b = bd_bins - 1
                            counts[b] += 1
                    cb = <int>floor(center * binsf / 256.0)
                    if cb >= bd_bins:
                        cb = bd_bins - 1
                    psum = 0.0
                    for b in range(bd_bins):
                        pv = (<double>counts[b]) / k2
                        if pv < 1e-6:
                            pv = 1e-6
                        pbuf[b] = pv
                        psum += pv
                    qsum = 0.0
                    for b in range(bd_bins):
                        qv = 1.0 if b == cb else 1e-6
                        qsum += qv
                    bc = 0.0
                    for b in range(bd_bins):
                        qv = 1.0 if b == cb else 1e-6
                        bc += sqrt((pbuf[b] / psum) * (qv / qsum))
                    if bc >= 1.0:
                        dist[i] = 0.0
                    else:
                        dist[i] = -log(bc)
            deg_cnt = 0
            deg_sum = 0.0
            for i in range(5):
                if dist[i] < epsilon:
                    deg_sum += mu[i]
                    deg_cnt += 1
            if deg_cnt > 0:
                out[y, x] = deg_sum / <double>deg_cnt
            else:
                num = 0.0
                den = 0.0
                for i in range(5):
                    wgt = pow(1.0 / dist[i], omega)
                    num += mu[i] * wgt
                    den += wgt
                out[y, x] = num / den
    return out_arr
