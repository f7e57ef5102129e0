# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels; bit-for-bit twins of ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline i64 scaled(double u, i64 width) nogil:
    cdef i64 t = <i64>(u * width)
    return t if t < width else width - 1


def krr_sample(values, i64 d, double p_keep, const double[:, ::1] u):
    cdef const i64[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0], i
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] o = out
    cdef i64 t
    with nogil:
        for i in range(n):
            if u[i, 0] < p_keep:
                o[i] = v[i]
            else:
                t = scaled(u[i, 1], d - 1)
                o[i] = t + 1 if t >= v[i] else t
    return out


def ksubset_sample(values, i64 d, i64 k, double g, const double[:, ::1] u):
    cdef const i64[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0], i, a, b, pos
    out = np.empty((n, k), dtype=np.int64)
    cdef i64[:, ::1] o = out
    cdef i64 pool = d - 1, m, j, t, x, base
    cdef bint dup
    with nogil:
        for i in range(n):
            if u[i, 0] < g:
                m = k - 1
                o[i, 0] = v[i]
                base = 1
            else:
                m = k
                base = 0
            if m > pool:
                m = pool
            # Floyd's algorithm over the d-1 values other than v[i]
            for a in range(m):
                j = pool - m + a
                t = scaled(u[i, 1 + a], j + 1)
                dup = False
                for b in range(a):
                    if o[i, base + b] == t:
                        dup = True
                        break
                o[i, base + a] = j if dup else t
            for a in range(base, base + m):
                if o[i, a] >= v[i]:
                    o[i, a] += 1
            # insertion sort; k is small
            for a in range(1, k):
                x = o[i, a]
                pos = a - 1
                while pos >= 0 and o[i, pos] > x:
                    o[i, pos + 1] = o[i, pos]
                    pos -= 1
                o[i, pos + 1] = x
    return out


def bits_sample(values, i64 d, double p_hot, double p_cold, const double[:, ::1] u):
    cdef const i64[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0], i, j
    out = np.empty((n, d), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] o = out
    with nogil:
        for i in range(n):
            for j in range(d):
                o[i, j] = u[i, j] < p_cold
            o[i, v[i]] = u[i, v[i]] < p_hot
    return out


def bits_count(values, i64 d, double p_hot, double p_cold, const double[:, ::1] u):
    cdef const i64[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0], i, j
    out = np.zeros(d, dtype=np.int64)
    cdef i64[::1] c = out
    with nogil:
        for i in range(n):
            for j in range(d):
                c[j] += u[i, j] < p_cold
            c[v[i]] += (u[i, v[i]] < p_hot) - (u[i, v[i]] < p_cold)
    return out


def table_sample(values, double p_in, const double[:, ::1] u,
                 const i64[:, ::1] in_table, const i64[:, ::1] out_table):
    cdef const i64[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef Py_ssize_t n = v.shape[0], i
    cdef i64 s = in_table.shape[1], m = out_table.shape[1]
    out = np.empty(n, dtype=np.int64)
    cdef i64[::1] o = out
    with nogil:
        for i in range(n):
            if u[i, 0] < p_in or m == 0:
                o[i] = in_table[v[i], scaled(u[i, 1], s)]
            else:
                o[i] = out_table[v[i], scaled(u[i, 1], m)]
    return out
