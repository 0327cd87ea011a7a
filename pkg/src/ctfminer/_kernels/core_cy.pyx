# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled clustering kernels; see core_py for the reference semantics."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def pairwise_sq_dists(double[:, ::1] x, double[:, ::1] c):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k = c.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, k), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, m
    cdef double acc, diff
    for i in range(n):
        for j in range(k):
            acc = 0.0
            for m in range(d):
                diff = x[i, m] - c[j, m]
                acc += diff * diff
            ov[i, j] = acc
    return out


def assign(double[:, ::1] x, double[:, ::1] c):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t k = c.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dists = np.empty(n, dtype=np.float64)
    cdef long[::1] lv = labels
    cdef double[::1] dv = dists
    cdef Py_ssize_t i, j, m, best
    cdef double acc, diff, best_d
    for i in range(n):
        best = 0
        best_d = -1.0
        for j in range(k):
            acc = 0.0
            for m in range(d):
                diff = x[i, m] - c[j, m]
                acc += diff * diff
            if best_d < 0.0 or acc < best_d:
                best_d = acc
                best = j
        lv[i] = best
        dv[i] = best_d
    return labels, dists
