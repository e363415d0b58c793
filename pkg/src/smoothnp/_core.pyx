# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: integrated-kernel sums over observations and over
Walsh pairs, and the classical Walsh count. Mirrors ``_pycore``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double _kcdf(double t, const double[::1] breaks,
                         const double[:, ::1] coefs) noexcept nogil:
    cdef Py_ssize_t m = breaks.shape[0] - 1
    cdef Py_ssize_t lo, hi, mid, d
    cdef double acc
    if t <= breaks[0]:
        return 0.0
    if t >= breaks[m]:
        return 1.0
    lo = 0
    hi = m
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if t >= breaks[mid]:
            lo = mid
        else:
            hi = mid
    acc = 0.0
    d = coefs.shape[1] - 1
    while d >= 0:
        acc = acc * t + coefs[lo, d]
        d -= 1
    return acc


def kernel_cdf(const double[::1] t, const double[::1] breaks, const double[:, ::1] coefs):
    cdef Py_ssize_t i, n = t.shape[0]
    out = np.empty(n)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _kcdf(t[i], breaks, coefs)
    return out


def sign_sum_rows(const double[:, ::1] x, double theta, double h,
                  const double[::1] breaks, const double[:, ::1] coefs):
    """Row sums of K((theta - x) / h)."""
    cdef Py_ssize_t r, i, R = x.shape[0], n = x.shape[1]
    cdef double acc
    out = np.empty(R)
    cdef double[::1] o = out
    with nogil:
        for r in range(R):
            acc = 0.0
            for i in range(n):
                acc += _kcdf((theta - x[r, i]) / h, breaks, coefs)
            o[r] = acc
    return out


cdef double _walsh_sum_sorted(const double *y, Py_ssize_t n, double theta, double h,
                              const double[::1] breaks, const double[:, ::1] coefs) noexcept nogil:
    # sum_{i<=j} K((2 theta - y_i - y_j) / (2h)) for ascending y
    cdef double rad = breaks[breaks.shape[0] - 1]
    cdef double lower = 2.0 * theta - 2.0 * h * rad   # pair sums at or below: K = 1
    cdef double upper = 2.0 * theta + 2.0 * h * rad   # pair sums at or above: K = 0
    cdef double two_h = 2.0 * h, two_theta = 2.0 * theta
    cdef Py_ssize_t i, j, p_lo = n, p_hi = n, start, stop
    cdef double total = 0.0, ones = 0.0
    for i in range(n):
        while p_lo > 0 and y[i] + y[p_lo - 1] > lower:
            p_lo -= 1
        while p_hi > 0 and y[i] + y[p_hi - 1] >= upper:
            p_hi -= 1
        if p_lo > i:
            ones += <double>(p_lo - i)
        start = p_lo if p_lo > i else i
        stop = p_hi if p_hi > i else i
        for j in range(start, stop):
            total += _kcdf((two_theta - y[i] - y[j]) / two_h, breaks, coefs)
    return ones + total


def walsh_sum_rows(const double[:, ::1] x, double theta, double h,
                   const double[::1] breaks, const double[:, ::1] coefs):
    """Row sums of K((2 theta - x_i - x_j) / (2h)) over i <= j (sorted band sweep)."""
    cdef Py_ssize_t r, R = x.shape[0], n = x.shape[1]
    # NumPy's vectorized sort beats libc qsort with a comparison callback
    cdef const double[:, ::1] y = np.sort(np.asarray(x), axis=1)
    out = np.empty(R)
    cdef double[::1] o = out
    with nogil:
        for r in range(R):
            o[r] = _walsh_sum_sorted(&y[r, 0], n, theta, h, breaks, coefs)
    return out


def walsh_sum_direct(const double[::1] x, double theta, double h,
                     const double[::1] breaks, const double[:, ::1] coefs):
    """Reference O(n^2) double loop over i <= j."""
    cdef Py_ssize_t i, j, n = x.shape[0]
    cdef double acc = 0.0
    with nogil:
        for i in range(n):
            for j in range(i, n):
                acc += _kcdf((2.0 * theta - x[i] - x[j]) / (2.0 * h), breaks, coefs)
    return acc


def walsh_count_rows(const double[:, ::1] x):
    """Per row, the number of pairs i <= j with x_i + x_j >= 0."""
    cdef Py_ssize_t r, i, q, R = x.shape[0], n = x.shape[1]
    cdef long long cnt
    cdef const double[:, ::1] y = np.sort(np.asarray(x), axis=1)
    out = np.empty(R, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for r in range(R):
            cnt = 0
            q = n
            for i in range(n):
                while q > 0 and y[r, i] + y[r, q - 1] >= 0.0:
                    q -= 1
                cnt += n - (q if q > i else i)
            o[r] = cnt
    return out
