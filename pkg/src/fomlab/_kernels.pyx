# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Signatures mirror ``fomlab._fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def ogmg_triangle(theta_in):
    cdef const double[::1] t = np.ascontiguousarray(theta_in, dtype=np.float64)
    cdef Py_ssize_t N = t.shape[0] - 1
    cdef Py_ssize_t i, k
    H_arr = np.zeros((N, N))
    cdef double[:, ::1] H = H_arr
    for i in range(N):
        H[i, i] = 1.0 + (2.0 * t[i + 1] - 1.0) / t[i]
        if i == 0:
            continue
        H[i, i - 1] = (t[i] - 1.0) / t[i - 1] * (H[i, i] - 1.0)
        for k in range(i - 2, -1, -1):
            H[i, k] = (t[k + 1] - 1.0) / t[k] * H[i, k + 1]
    return H_arr


def ogmg_alt_triangle(theta_in):
    cdef const double[::1] t = np.ascontiguousarray(theta_in, dtype=np.float64)
    cdef Py_ssize_t N = t.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef double coef
    H_arr = np.zeros((N, N))
    cdef double[:, ::1] H = H_arr
    for i in range(N):
        H[i, i] = 1.0 + (2.0 * t[i + 1] - 1.0) / t[i]
        if i == 0:
            continue
        coef = (t[i] - 1.0) * (2.0 * t[i + 1] - 1.0) / (t[i] * (2.0 * t[i] - 1.0))
        for k in range(i - 1):
            H[i, k] = coef * H[i - 1, k]
        H[i, i - 1] = coef * (H[i - 1, i - 1] - 1.0)
    return H_arr


def ogm_triangle(theta_in):
    cdef const double[::1] t = np.ascontiguousarray(theta_in, dtype=np.float64)
    cdef Py_ssize_t N = t.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef double coef
    H_arr = np.zeros((N, N))
    cdef double[:, ::1] H = H_arr
    for i in range(N):
        H[i, i] = 1.0 + (2.0 * t[i] - 1.0) / t[i + 1]
        if i == 0:
            continue
        coef = (t[i] - 1.0) / t[i + 1]
        for k in range(i - 1):
            H[i, k] = coef * H[i - 1, k]
        H[i, i - 1] = coef * (H[i - 1, i - 1] - 1.0)
    return H_arr


cdef void _tail_sums(const double[:, ::1] H, double[:, ::1] T) nogil:
    cdef Py_ssize_t N = H.shape[0]
    cdef Py_ssize_t m, k
    for m in range(N, 0, -1):
        for k in range(N):
            T[m, k] = T[m + 1, k] + H[m - 1, k]


def tail_sums(H_in):
    cdef const double[:, ::1] H = np.ascontiguousarray(H_in, dtype=np.float64)
    cdef Py_ssize_t N = H.shape[0]
    T_arr = np.zeros((N + 2, N))
    cdef double[:, ::1] T = T_arr
    _tail_sums(H, T)
    return T_arr


def assemble_s(H_in, a_in, b_in, double c):
    cdef const double[:, ::1] H = np.ascontiguousarray(H_in, dtype=np.float64)
    cdef const double[::1] a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(b_in, dtype=np.float64)
    cdef Py_ssize_t N = H.shape[0]
    cdef Py_ssize_t i, j
    cdef double v, bsum = 0.0
    T_arr = np.zeros((N + 2, N))
    cdef double[:, ::1] T = T_arr
    _tail_sums(H, T)
    S_arr = np.zeros((N + 1, N + 1))
    cdef double[:, ::1] S = S_arr
    # row/col indices run over 0..N; a[i-1] is a_i, b[i] is b_i
    for i in range(N):
        v = a[i] + b[i] * (1.0 - 2.0 * T[i + 1, i])
        if i >= 1:
            v += a[i - 1]
        S[i, i] = 0.5 * v
        bsum += b[i]
    S[N, N] = 0.5 * (a[N - 1] + bsum + c - 2.0)
    for i in range(1, N):
        for j in range(i):
            v = a[i - 1] * H[i - 1, j] - b[i] * T[i + 1, j] - b[j] * T[i + 1, i]
            if j == i - 1:
                v -= a[i - 1]
            S[i, j] = 0.5 * v
            S[j, i] = 0.5 * v
    for j in range(N):
        v = a[N - 1] * H[N - 1, j] - b[j]
        if j == N - 1:
            v -= a[N - 1]
        S[N, j] = 0.5 * v
        S[j, N] = 0.5 * v
    return S_arr


def pivoted_cholesky(S_in, double tol):
    W_arr = np.array(S_in, dtype=np.float64, copy=True, order="C")
    cdef double[:, ::1] W = W_arr
    cdef Py_ssize_t n = W.shape[0]
    cdef Py_ssize_t k, p, i, j
    cdef Py_ssize_t rank = 0
    cdef double piv, r, tmp, residual = 0.0
    for k in range(n):
        p = k
        piv = W[k, k]
        for i in range(k + 1, n):
            if W[i, i] > piv:
                piv = W[i, i]
                p = i
        if piv <= tol:
            break
        if p != k:
            for j in range(n):
                tmp = W[k, j]; W[k, j] = W[p, j]; W[p, j] = tmp
            for i in range(n):
                tmp = W[i, k]; W[i, k] = W[i, p]; W[i, p] = tmp
        r = sqrt(piv)
        for i in range(k + 1, n):
            W[i, k] /= r
        # full trailing block: later pivots swap rows and columns
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                W[i, j] -= W[i, k] * W[j, k]
        rank += 1
    for j in range(rank, n):
        for i in range(j, n):
            if fabs(W[i, j]) > residual:
                residual = fabs(W[i, j])
    return residual <= tol, int(rank), float(residual)
