# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled inner loops for box summation, greedy sampling and line drawing."""
import numpy as np

from libc.math cimport INFINITY


def box_sum(const double[:, ::1] src, Py_ssize_t k_rows, Py_ssize_t k_cols):
    """Zero-padded sum over a centered ``k_rows x k_cols`` window (odd sizes).

    Separable direct sums (no running add/subtract), accumulated in offset
    order so results match the numpy backend bit for bit. The offset loop
    sits outside the contiguous pixel loop so the compiler can vectorize.
    """
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    cdef Py_ssize_t hr = k_rows // 2, hc = k_cols // 2
    cdef Py_ssize_t i, j, d, lo, hi, a
    tmp_arr = np.zeros((h, w), dtype=np.float64)
    out_arr = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] tmp = tmp_arr
    cdef double[:, ::1] out = out_arr

    for i in range(h):
        for d in range(-hc, hc + 1):
            lo = -d if d < 0 else 0
            hi = w - d if d > 0 else w
            for j in range(lo, hi):
                tmp[i, j] += src[i, j + d]
    for i in range(h):
        for d in range(-hr, hr + 1):
            a = i + d
            if a < 0 or a >= h:
                continue
            for j in range(w):
                out[i, j] += tmp[a, j]
    return out_arr


cdef inline void _row_max(double[:, ::1] work, Py_ssize_t i, double* best, Py_ssize_t* arg) nogil:
    cdef Py_ssize_t j, w = work.shape[1]
    cdef double b = -INFINITY, v
    cdef Py_ssize_t bj = -1
    for j in range(w):
        v = work[i, j]
        if v > b:
            b = v
            bj = j
    best[0] = b
    arg[0] = bj


def greedy_sample(double[:, ::1] work, Py_ssize_t num_samples,
                  Py_ssize_t half_rows, Py_ssize_t half_cols):
    """Repeated global argmax with rectangular -inf suppression, in place.

    Returns ``(rows, cols, confidences)`` lists. Ties go to the lowest
    row-major index. Per-row maxima are cached and only rows touched by a
    suppression window are rescanned.
    """
    cdef Py_ssize_t h = work.shape[0], w = work.shape[1]
    cdef Py_ssize_t n, i, j, bi, bj, r0, r1, c0, c1
    cdef double best
    rmax_arr = np.empty(h, dtype=np.float64)
    rarg_arr = np.empty(h, dtype=np.intp)
    cdef double[::1] rmax = rmax_arr
    cdef Py_ssize_t[::1] rarg = rarg_arr
    for i in range(h):
        _row_max(work, i, &rmax[i], &rarg[i])
    rows, cols, confs = [], [], []
    for n in range(num_samples):
        best = -INFINITY
        bi = -1
        for i in range(h):
            if rmax[i] > best:
                best = rmax[i]
                bi = i
        if bi < 0:
            break
        bj = rarg[bi]
        rows.append(bi)
        cols.append(bj)
        confs.append(best)
        r0 = bi - half_rows if bi > half_rows else 0
        r1 = bi + half_rows + 1 if bi + half_rows + 1 < h else h
        c0 = bj - half_cols if bj > half_cols else 0
        c1 = bj + half_cols + 1 if bj + half_cols + 1 < w else w
        for i in range(r0, r1):
            for j in range(c0, c1):
                work[i, j] = -INFINITY
            _row_max(work, i, &rmax[i], &rarg[i])
    return rows, cols, confs


def draw_line(unsigned char[:, ::1] out, Py_ssize_t r0, Py_ssize_t c0,
              Py_ssize_t r1, Py_ssize_t c1):
    """Bresenham line between two pixel indices; off-raster pixels are skipped."""
    cdef Py_ssize_t h = out.shape[0], w = out.shape[1]
    cdef Py_ssize_t dr = r1 - r0 if r1 >= r0 else r0 - r1
    cdef Py_ssize_t dc = c1 - c0 if c1 >= c0 else c0 - c1
    cdef Py_ssize_t sr = 1 if r1 >= r0 else -1
    cdef Py_ssize_t sc = 1 if c1 >= c0 else -1
    cdef Py_ssize_t err = dc - dr, e2
    cdef Py_ssize_t r = r0, c = c0
    while True:
        if 0 <= r < h and 0 <= c < w:
            out[r, c] = 1
        if r == r1 and c == c1:
            break
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr
