# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures mirror ``_kernels_py`` exactly."""

import numpy as np

from libc.math cimport exp, log, sqrt, INFINITY
from libc.stdlib cimport malloc, free

cdef double LOG_SQRT_2PI = 0.91893853320467274178
cdef double INV_SQRT_2PI = 0.39894228040143267794


def kde_cross(const double[::1] sample, double h,
              const double[::1] mu, const double[::1] sigma):
    cdef Py_ssize_t n = sample.shape[0], k = mu.shape[0], i, t
    cdef double var, inv2var, norm, acc, d
    out = np.empty(k, dtype=np.float64)
    cdef double[::1] res = out
    for i in range(k):
        var = sigma[i] * sigma[i] + h * h
        inv2var = 0.5 / var
        norm = INV_SQRT_2PI / sqrt(var)
        acc = 0.0
        for t in range(n):
            d = sample[t] - mu[i]
            acc += exp(-d * d * inv2var)
        res[i] = norm * acc / n
    return out


cdef inline double _lse_point(double y, const double[::1] mu, const double[::1] sigma,
                              const double[::1] logw, double* buf) nogil:
    cdef Py_ssize_t k = mu.shape[0], i
    cdef double z, a, m = -INFINITY, s = 0.0
    for i in range(k):
        z = (y - mu[i]) / sigma[i]
        a = logw[i] - LOG_SQRT_2PI - log(sigma[i]) - 0.5 * z * z
        buf[i] = a
        if a > m:
            m = a
    if m == -INFINITY:
        return m
    for i in range(k):
        s += exp(buf[i] - m)
    return m + log(s)


def mixture_logpdf_points(const double[::1] y, const double[::1] mu,
                          const double[::1] sigma, const double[::1] logw):
    cdef Py_ssize_t m = y.shape[0], k = mu.shape[0], t
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    cdef double* buf = <double*> malloc(max(k, 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for t in range(m):
                res[t] = _lse_point(y[t], mu, sigma, logw, buf)
    finally:
        free(buf)
    return out


def mixture_logpdf_sum(const double[::1] y, const double[::1] mu,
                       const double[::1] sigma, const double[::1] logw):
    cdef Py_ssize_t m = y.shape[0], k = mu.shape[0], t
    cdef double total = 0.0
    cdef double* buf = <double*> malloc(max(k, 1) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    try:
        with nogil:
            for t in range(m):
                total += _lse_point(y[t], mu, sigma, logw, buf)
    finally:
        free(buf)
    return total


def gauss_pair_sum(const double[::1] x, double var):
    cdef Py_ssize_t n = x.shape[0], s, t
    cdef double inv2var = 0.5 / var, d, off = 0.0
    with nogil:
        for s in range(n):
            for t in range(s + 1, n):
                d = x[s] - x[t]
                off += exp(-d * d * inv2var)
    return n + 2.0 * off
