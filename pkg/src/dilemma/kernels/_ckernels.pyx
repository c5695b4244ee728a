# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled linear-model kernels. Must mirror _pykernels.py operation for operation."""

import numpy as np
from libc.math cimport sqrt

BACKEND = "cython"


cdef void _forward(const double[:, ::1] L, const double[::1] x, double[::1] y) noexcept nogil:
    cdef Py_ssize_t d = L.shape[0]
    cdef Py_ssize_t i, j
    cdef double s, yj
    for i in range(d):
        s = x[i]
        for j in range(i):
            yj = y[j]
            if yj != 0.0:
                s = s - L[i, j] * yj
        y[i] = s / L[i, i]


def forward_solve(const double[:, ::1] L, const double[::1] x):
    cdef double[::1] y = np.empty(L.shape[0])
    _forward(L, x, y)
    return np.asarray(y)


def chol_update(double[:, ::1] L, const double[::1] x):
    """In place: L L^T <- L L^T + x x^T for lower-triangular L."""
    cdef Py_ssize_t d = L.shape[0]
    cdef Py_ssize_t i, k
    cdef double r, c, s, lkk, xk
    cdef double[::1] w = np.array(x, dtype=np.float64)
    with nogil:
        for k in range(d):
            xk = w[k]
            if xk == 0.0:
                continue
            lkk = L[k, k]
            r = sqrt(lkk * lkk + xk * xk)
            c = r / lkk
            s = xk / lkk
            L[k, k] = r
            for i in range(k + 1, d):
                L[i, k] = (L[i, k] + s * w[i]) / c
                w[i] = c * w[i] - s * L[i, k]


def linear_scores(const double[:, :, ::1] Ls, const double[:, ::1] bs, const double[::1] x, double alpha):
    """Per arm: mean estimate at x plus alpha times the confidence width."""
    cdef Py_ssize_t K = Ls.shape[0]
    cdef Py_ssize_t d = Ls.shape[1]
    cdef Py_ssize_t k, i
    cdef double mu, q
    cdef double[::1] u = np.empty(d)
    cdef double[::1] y = np.empty(d)
    cdef double[::1] out = np.empty(K)
    with nogil:
        for k in range(K):
            _forward(Ls[k], bs[k], u)
            _forward(Ls[k], x, y)
            mu = 0.0
            q = 0.0
            for i in range(d):
                mu = mu + u[i] * y[i]
                q = q + y[i] * y[i]
            out[k] = mu + alpha * sqrt(q)
    return np.asarray(out)


def sampled_scores(const double[:, :, ::1] Ls, const double[:, ::1] bs, const double[::1] x,
                   double v, const double[:, ::1] Z):
    """Per arm: x . theta with theta ~ N(A^-1 b, v^2 A^-1), driven by standard normals Z."""
    cdef Py_ssize_t K = Ls.shape[0]
    cdef Py_ssize_t d = Ls.shape[1]
    cdef Py_ssize_t k, i
    cdef double acc
    cdef double[::1] u = np.empty(d)
    cdef double[::1] y = np.empty(d)
    cdef double[::1] out = np.empty(K)
    with nogil:
        for k in range(K):
            _forward(Ls[k], bs[k], u)
            _forward(Ls[k], x, y)
            acc = 0.0
            for i in range(d):
                acc = acc + (u[i] + v * Z[k, i]) * y[i]
            out[k] = acc
    return np.asarray(out)
