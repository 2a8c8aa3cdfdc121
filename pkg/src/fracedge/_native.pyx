# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot-loop kernels: 1-D correlation passes and directional NMS.

Semantics are kept in lockstep with :mod:`fracedge._pykernels` (clamp
borders, tap-order accumulation, identical orientation-bin comparisons);
the same oracle tests run against both backends.  Inner loops release the
GIL so image-level thread pools scale.
"""

import math

import numpy as np

from libc.math cimport fabs


cdef double TAN_LO = math.tan(math.pi / 8)
cdef double TAN_HI = math.tan(3 * math.pi / 8)


cdef inline Py_ssize_t _clamp(Py_ssize_t i, Py_ssize_t n) nogil:
    if i < 0:
        return 0
    if i >= n:
        return n - 1
    return i


def correlate_axis(const double[:, ::1] src, const double[::1] weights, Py_ssize_t anchor, int axis):
    """out[p] = sum_k w[k] * src[clamp(p - k + anchor)] along ``axis``."""
    cdef Py_ssize_t h = src.shape[0]
    cdef Py_ssize_t w = src.shape[1]
    cdef Py_ssize_t nk = weights.shape[0]
    cdef Py_ssize_t x, y, k
    cdef double acc
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr

    if axis == 1:
        with nogil:
            for y in range(h):
                for x in range(w):
                    acc = 0.0
                    for k in range(nk):
                        acc += weights[k] * src[y, _clamp(x - k + anchor, w)]
                    out[y, x] = acc
    else:
        with nogil:
            for y in range(h):
                for x in range(w):
                    acc = 0.0
                    for k in range(nk):
                        acc += weights[k] * src[_clamp(y - k + anchor, h), x]
                    out[y, x] = acc
    return out_arr


def suppress_nonmax(const double[:, ::1] strength, const double[:, ::1] gx, const double[:, ::1] gy):
    """Directional non-max suppression; see the fallback for the contract."""
    cdef Py_ssize_t h = strength.shape[0]
    cdef Py_ssize_t w = strength.shape[1]
    cdef Py_ssize_t x, y, dy, dx, ny, nx
    cdef double ax, ay, s, ahead, behind
    cdef bint pos_x, pos_y
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr

    with nogil:
        for y in range(h):
            for x in range(w):
                ax = fabs(gx[y, x])
                ay = fabs(gy[y, x])
                if ay <= TAN_LO * ax:
                    dy = 0
                    dx = 1
                elif ay >= TAN_HI * ax:
                    dy = 1
                    dx = 0
                else:
                    pos_x = gx[y, x] > 0
                    pos_y = gy[y, x] > 0
                    if pos_x == pos_y:
                        dy = 1
                        dx = 1
                    else:
                        dy = 1
                        dx = -1

                s = strength[y, x]
                ny = y + dy
                nx = x + dx
                ahead = strength[ny, nx] if 0 <= ny < h and 0 <= nx < w else 0.0
                ny = y - dy
                nx = x - dx
                behind = strength[ny, nx] if 0 <= ny < h and 0 <= nx < w else 0.0
                out[y, x] = s if s >= ahead and s >= behind else 0.0
    return out_arr
