# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Semantics must stay identical to ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def pair_counts(const cnp.int64_t[:, ::1] rows, Py_ssize_t d):
    cdef Py_ssize_t n_rows = rows.shape[0], k = rows.shape[1]
    counts_arr = np.zeros((k, k, d, d), dtype=np.int64)
    cdef cnp.int64_t[:, :, :, ::1] counts = counts_arr
    cdef Py_ssize_t r, A, B
    for r in range(n_rows):
        for A in range(k):
            for B in range(k):
                counts[A, B, rows[r, A], rows[r, B]] += 1
    return counts_arr


cdef inline void _project_out(double complex[:, ::1] Q, Py_ssize_t count,
                              double complex[::1] v, Py_ssize_t dim) noexcept:
    cdef Py_ssize_t i, t
    cdef double complex c
    for i in range(count):
        c = 0
        for t in range(dim):
            c = c + Q[i, t].conjugate() * v[t]
        if c != 0:
            for t in range(dim):
                v[t] = v[t] - c * Q[i, t]


def complete_basis(const double complex[:, ::1] given, Py_ssize_t dim, double threshold):
    cdef Py_ssize_t m = given.shape[0]
    out_arr = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    v_arr = np.zeros(dim, dtype=np.complex128)
    cdef double complex[::1] v = v_arr
    cdef Py_ssize_t i, j, t, count = m
    cdef double norm
    cdef double complex c
    for i in range(m):
        for t in range(dim):
            out[i, t] = given[i, t]
    for j in range(dim):
        if count >= dim:
            break
        # first pass against e_j reduces to reading column j
        for t in range(dim):
            v[t] = 0
        v[j] = 1
        for i in range(count):
            c = out[i, j].conjugate()
            if c != 0:
                for t in range(dim):
                    v[t] = v[t] - c * out[i, t]
        _project_out(out, count, v, dim)
        norm = 0
        for t in range(dim):
            norm += v[t].real * v[t].real + v[t].imag * v[t].imag
        norm = sqrt(norm)
        if norm > threshold:
            for t in range(dim):
                out[count, t] = v[t] / norm
            count += 1
    return count, out_arr


cdef inline Py_ssize_t _search(const double[::1] cdf, double u) noexcept:
    # number of entries <= u, i.e. numpy searchsorted(side="right")
    cdef Py_ssize_t lo = 0, hi = cdf.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    return lo


def sample_rounds(const double[:, ::1] u, const double[::1] cdf_A,
                  const double[:, ::1] cdf_a, const double[:, :, ::1] cdf_I,
                  const cnp.int64_t[:, ::1] s):
    cdef Py_ssize_t k = cdf_a.shape[0], d = cdf_a.shape[1]
    trials_arr = np.zeros((k, d), dtype=np.int64)
    wins_arr = np.zeros((k, d), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] trials = trials_arr
    cdef cnp.int64_t[:, ::1] wins = wins_arr
    cdef Py_ssize_t r, A, a, I
    for r in range(u.shape[0]):
        A = _search(cdf_A, u[r, 0])
        a = _search(cdf_a[A], u[r, 1])
        I = _search(cdf_I[A, a], u[r, 2])
        trials[A, a] += 1
        if s[I, A] == a:
            wins[A, a] += 1
    return trials_arr, wins_arr
