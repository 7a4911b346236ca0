# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Mirrors ``_pykernels`` function for function."""

import numpy as np

from libc.math cimport fabs


def gp(const double[::1] l, const double[::1] r,
       const signed char[:, ::1] sign, const signed char[:, ::1] index):
    cdef double[::1] out
    res = np.zeros(8)
    out = res
    cdef Py_ssize_t i, j
    cdef double li
    for i in range(8):
        li = l[i]
        if li == 0.0:
            continue
        for j in range(8):
            out[index[i, j]] += sign[i, j] * li * r[j]
    return res


def gp_batch(const double[:, ::1] L, const double[:, ::1] R,
             const signed char[:, ::1] sign, const signed char[:, ::1] index):
    cdef Py_ssize_t n = L.shape[0]
    if R.shape[0] != n:
        raise ValueError("batch sizes differ")
    res = np.zeros((n, 8))
    cdef double[:, ::1] out = res
    cdef Py_ssize_t s, i, j
    cdef double li
    for s in range(n):
        for i in range(8):
            li = L[s, i]
            if li == 0.0:
                continue
            for j in range(8):
                out[s, index[i, j]] += sign[i, j] * li * R[s, j]
    return res


cdef inline signed char _tie_sign(double nx, double ny, double nz):
    if nx != 0.0:
        return 1 if nx > 0.0 else -1
    if ny != 0.0:
        return 1 if ny > 0.0 else -1
    if nz != 0.0:
        return 1 if nz > 0.0 else -1
    return 0


def party_outcomes(const double[:, ::1] lams, double nx, double ny, double nz,
                   bint flip):
    cdef Py_ssize_t n = lams.shape[0]
    res = np.empty(n, dtype=np.int8)
    cdef signed char[::1] out = res
    cdef Py_ssize_t s
    cdef double d
    cdef signed char v
    cdef signed char tie = _tie_sign(nx, ny, nz)
    for s in range(n):
        d = lams[s, 0] * nx + lams[s, 1] * ny + lams[s, 2] * nz
        if d > 0.0:
            v = 1
        elif d < 0.0:
            v = -1
        else:
            v = tie
        out[s] = -v if flip else v
    return res


def chsh_grid_max(const double[:, ::1] M):
    """Max |M[i,j] + M[i,l] + M[k,j] - M[k,l]| over (i, k, j, l), first hit wins."""
    cdef Py_ssize_t R = M.shape[0]
    cdef Py_ssize_t i, k, j, l
    cdef Py_ssize_t bi = 0, bk = 0, bj = 0, bl = 0
    cdef double best = -1.0
    cdef double s, mij, mkj
    for i in range(R):
        for k in range(R):
            for j in range(R):
                mij = M[i, j]
                mkj = M[k, j]
                for l in range(R):
                    s = fabs(((mij + M[i, l]) + mkj) - M[k, l])
                    if s > best:
                        best = s
                        bi = i
                        bk = k
                        bj = j
                        bl = l
    return best, (bi, bk, bj, bl)
