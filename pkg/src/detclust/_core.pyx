# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot numerical primitives.

Twin of `_core_py`; see that module for the contract.  Any behavioural
change there must be mirrored here.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, log, sqrt

from .errors import NotPositiveDefinite

cnp.import_array()

BACKEND_NAME = "compiled"


def se_cross(const double[:, ::1] members, const double[::1] x, const double[::1] inv_ls):
    cdef Py_ssize_t n = members.shape[0]
    cdef Py_ssize_t d = members.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, k
    cdef double q, diff
    for i in range(n):
        q = 0.0
        for k in range(d):
            diff = members[i, k] - x[k]
            q += diff * diff * inv_ls[k]
        ov[i] = exp(-0.5 * q)
    return out


def se_gram(const double[:, ::1] points, const double[::1] inv_ls):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, n))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef double q, diff, v
    for i in range(n):
        ov[i, i] = 1.0
        for j in range(i + 1, n):
            q = 0.0
            for k in range(d):
                diff = points[i, k] - points[j, k]
                q += diff * diff * inv_ls[k]
            v = exp(-0.5 * q)
            ov[i, j] = v
            ov[j, i] = v
    return out


def quad_form(const double[:, ::1] inv, const double[::1] v):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, j
    cdef double total = 0.0
    cdef double row
    for i in range(n):
        row = 0.0
        for j in range(n):
            row += inv[i, j] * v[j]
        total += row * v[i]
    return total


def add_point_inverse(const double[:, ::1] inv, const double[::1] cross, double self_k):
    cdef Py_ssize_t n = inv.shape[0]
    cdef double w
    cdef Py_ssize_t i, j
    if n == 0:
        w = self_k
        if w <= 0.0:
            return None, w
        return np.array([[1.0 / w]]), w
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u_arr = np.empty(n)
    cdef double[::1] u = u_arr
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += inv[i, j] * cross[j]
        u[i] = acc
    w = self_k
    for i in range(n):
        w -= cross[i] * u[i]
    if w <= 0.0:
        return None, w
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n + 1, n + 1))
    cdef double[:, ::1] ov = out
    cdef double edge, v
    for i in range(n):
        for j in range(i, n):
            v = inv[i, j] + u[i] * u[j] / w
            ov[i, j] = v
            ov[j, i] = v
        edge = -u[i] / w
        ov[i, n] = edge
        ov[n, i] = edge
    ov[n, n] = 1.0 / w
    return out, w


def remove_point_inverse(const double[:, ::1] inv, Py_ssize_t index):
    cdef Py_ssize_t n = inv.shape[0]
    cdef double s = inv[index, index]
    if s <= 0.0:
        return None, s
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n - 1, n - 1))
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j, ii, jj
    cdef double vi, v
    for i in range(n - 1):
        ii = i if i < index else i + 1
        vi = inv[ii, index]
        for j in range(i, n - 1):
            jj = j if j < index else j + 1
            v = inv[ii, jj] - vi * inv[jj, index] / s
            ov[i, j] = v
            ov[j, i] = v
    return out, s


def chol_logdet_inv(const double[:, ::1] m):
    cdef Py_ssize_t n = m.shape[0]
    if n == 0:
        return 0.0, np.zeros((0, 0))
    cdef cnp.ndarray[cnp.float64_t, ndim=2] L_arr = np.zeros((n, n))
    cdef double[:, ::1] L = L_arr
    cdef Py_ssize_t i, j, k
    cdef double pivot, acc, d
    cdef double logdet = 0.0
    for j in range(n):
        pivot = m[j, j]
        for k in range(j):
            pivot -= L[j, k] * L[j, k]
        if not pivot > 0.0:
            raise NotPositiveDefinite(j, pivot)
        d = sqrt(pivot)
        L[j, j] = d
        logdet += log(d)
        for i in range(j + 1, n):
            acc = m[i, j]
            for k in range(j):
                acc -= L[i, k] * L[j, k]
            L[i, j] = acc / d
    # forward substitution: x = L^-1, lower triangular
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x_arr = np.zeros((n, n))
    cdef double[:, ::1] x = x_arr
    for j in range(n):
        x[j, j] = 1.0 / L[j, j]
        for i in range(j + 1, n):
            acc = 0.0
            for k in range(j, i):
                acc += L[i, k] * x[k, j]
            x[i, j] = -acc / L[i, i]
    # inverse = x' x, filled symmetrically
    cdef cnp.ndarray[cnp.float64_t, ndim=2] inv_arr = np.empty((n, n))
    cdef double[:, ::1] inv = inv_arr
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for k in range(j, n):
                acc += x[k, i] * x[k, j]
            inv[i, j] = acc
            inv[j, i] = acc
    return 2.0 * logdet, inv_arr
